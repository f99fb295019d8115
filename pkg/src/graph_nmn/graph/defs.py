"""Graph layers and the attention state reasoned over them."""

from typing import Iterator, Literal, Optional, Sequence, Tuple
import numpy as np
from ..tensor import Tensor


Modality = Literal["visual", "semantic", "commonsense"]
MODALITIES: Tuple[Modality, ...] = ("visual", "semantic", "commonsense")
PLACEHOLDER_LABEL = "<placeholder>"


def _frozen(values: np.ndarray) -> np.ndarray:
    ret = np.array(values)
    ret.flags.writeable = False
    return ret


class HeteroGraph:
    """One modality layer: node features, directed edges and edge features.

    Construction does not validate; run `validate_graph` on anything that came
    from a file.  The arrays are copied and frozen, so graphs can be shared
    between threads.
    """

    __slots__ = (
        "__modality",
        "__node_features",
        "__node_labels",
        "__node_attributes",
        "__edges",
        "__edge_features",
        "__edge_labels",
    )

    def __init__(
        self,
        *,
        modality: Modality,
        node_features: np.ndarray,
        node_labels: Sequence[str],
        edges: Sequence[Tuple[int, int]],
        edge_features: np.ndarray,
        edge_labels: Optional[Sequence[str]] = None,
        node_attributes: Optional[Sequence[Sequence[str]]] = None,
    ) -> None:
        self.__modality = modality
        self.__node_features = _frozen(np.asarray(node_features, dtype=np.float64))
        self.__node_labels = tuple(node_labels)
        self.__node_attributes = tuple(
            tuple(attrs) for attrs in (node_attributes or [()] * len(self.__node_labels))
        )
        self.__edges = _frozen(np.asarray(edges, dtype=np.int64).reshape(-1, 2))
        self.__edge_features = _frozen(np.asarray(edge_features, dtype=np.float64))
        self.__edge_labels = tuple(edge_labels or [""] * len(self.__edges))

    @staticmethod
    def placeholder(modality: Modality, node_dim: int, edge_dim: int) -> "HeteroGraph":
        """A single zero-feature node with no edges, standing in for an ablated layer."""
        return HeteroGraph(
            modality=modality,
            node_features=np.zeros((1, node_dim)),
            node_labels=(PLACEHOLDER_LABEL,),
            edges=(),
            edge_features=np.zeros((0, edge_dim)),
        )

    @property
    def modality(self) -> Modality:
        """Which layer this graph is."""
        return self.__modality

    @property
    def node_features(self) -> np.ndarray:
        """n x d_node matrix, read-only."""
        return self.__node_features

    @property
    def node_labels(self) -> Sequence[str]:
        """One label per node."""
        return self.__node_labels

    @property
    def node_attributes(self) -> Sequence[Sequence[str]]:
        """Attribute strings per node (detector attributes on the visual layer)."""
        return self.__node_attributes

    @property
    def edges(self) -> np.ndarray:
        """|E| x 2 array of (source, target) node indices."""
        return self.__edges

    @property
    def sources(self) -> np.ndarray:
        """Source index of every edge."""
        return self.__edges[:, 0]

    @property
    def targets(self) -> np.ndarray:
        """Target index of every edge."""
        return self.__edges[:, 1]

    @property
    def edge_features(self) -> np.ndarray:
        """|E| x d_edge matrix, read-only."""
        return self.__edge_features

    @property
    def edge_labels(self) -> Sequence[str]:
        """Relation label per edge; empty strings where the layer has none."""
        return self.__edge_labels

    @property
    def num_nodes(self) -> int:
        """n."""
        return int(self.__node_features.shape[0]) if self.__node_features.ndim == 2 else 0

    @property
    def num_edges(self) -> int:
        """|E|."""
        return int(self.__edges.shape[0])

    @property
    def node_dim(self) -> int:
        """Width of a node feature."""
        return int(self.__node_features.shape[-1])

    @property
    def edge_dim(self) -> int:
        """Width of an edge feature."""
        return int(self.__edge_features.shape[-1])

    @property
    def is_placeholder(self) -> bool:
        """Is this the stand-in for an ablated layer?"""
        return self.__node_labels == (PLACEHOLDER_LABEL,) and self.num_edges == 0

    def __repr__(self) -> str:
        return f"HeteroGraph({self.__modality}, n={self.num_nodes}, |E|={self.num_edges})"


class MultiLayerGraph:
    """The visual, semantic and commonsense layers for one image."""

    __slots__ = ("__visual", "__semantic", "__commonsense")

    def __init__(
        self,
        *,
        visual: HeteroGraph,
        semantic: HeteroGraph,
        commonsense: HeteroGraph,
    ) -> None:
        for modality, graph in zip(MODALITIES, (visual, semantic, commonsense)):
            if graph.modality != modality:
                raise ValueError(f"{modality} layer is tagged {graph.modality}")
        self.__visual = visual
        self.__semantic = semantic
        self.__commonsense = commonsense

    @property
    def visual(self) -> HeteroGraph:
        """Detected objects and their spatial relations."""
        return self.__visual

    @property
    def semantic(self) -> HeteroGraph:
        """Caption-derived names, attributes and relations."""
        return self.__semantic

    @property
    def commonsense(self) -> HeteroGraph:
        """Selected knowledge triples."""
        return self.__commonsense

    def layer(self, modality: Modality) -> HeteroGraph:
        """Look up a layer by modality."""
        if modality == "visual":
            return self.__visual
        if modality == "semantic":
            return self.__semantic
        if modality == "commonsense":
            return self.__commonsense
        raise ValueError(f"unknown modality {modality}")

    def layers(self) -> Iterator[HeteroGraph]:
        """The three layers in canonical order."""
        return iter((self.__visual, self.__semantic, self.__commonsense))

    def with_placeholder(self, modality: Modality) -> "MultiLayerGraph":
        """A copy where one layer is replaced by its placeholder."""
        parts = {m: self.layer(m) for m in MODALITIES}
        old = parts[modality]
        parts[modality] = HeteroGraph.placeholder(modality, old.node_dim, old.edge_dim)
        return MultiLayerGraph(
            visual=parts["visual"],
            semantic=parts["semantic"],
            commonsense=parts["commonsense"],
        )


class AttentionMap:
    """A distribution over the nodes of one layer."""

    __slots__ = ("__layer", "__weights")

    def __init__(self, layer: Modality, weights: Tensor) -> None:
        if len(weights.shape) != 1:
            raise ValueError(f"attention weights must be a vector, got shape {weights.shape}")
        self.__layer = layer
        self.__weights = weights

    @property
    def layer(self) -> Modality:
        """Which graph the map attends over."""
        return self.__layer

    @property
    def weights(self) -> Tensor:
        """The per-node weights."""
        return self.__weights

    @property
    def values(self) -> np.ndarray:
        """The weights as a plain array."""
        return self.__weights.data

    def __len__(self) -> int:
        return self.__weights.shape[0]

    def __repr__(self) -> str:
        return f"AttentionMap({self.__layer}, {np.array2string(self.values, precision=3)})"
