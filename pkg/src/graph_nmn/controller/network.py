"""The full model: encoder, controller, module inventory and answer head."""

from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple
import logging
import numpy as np
from ..builder import EmbeddingTable
from ..graph import MODALITIES, AttentionMap, Modality, MultiLayerGraph, uniform_attention
from ..modules import StepInputs, describe
from ..tensor import DimensionError, ParameterStore, Tensor
from .answer import AnswerParams, create_answer_params, predict_answer
from .encoder import (
    DEFAULT_MAX_QUESTION_LENGTH,
    LstmParams,
    create_lstm_params,
    encode_question,
)
from .executor import execute_step
from .inventory import (
    LayerDims,
    ModuleInventory,
    ablate_graphs,
    build_inventory,
    check_ablations,
    layer_dims,
)
from .step import ControllerParams, create_controller_params, step_controller
from .trace import LayerAttention, ReasoningTrace, StepRecord


_LOG = logging.getLogger(__name__)

DEFAULT_STEPS = 12


class GraphModuleNetwork:
    """Soft module network over a three-layer graph.

    Every parameter lives in `store` under a stable dotted name, so a
    checkpoint is the store's state plus the arguments of `create_network`.
    """

    __slots__ = (
        "__store",
        "__emb",
        "__answers",
        "__dims",
        "__encoder",
        "__controller",
        "__inventory",
        "__answer_head",
        "__steps",
        "__max_question_length",
        "__ablate",
    )

    def __init__(
        self,
        *,
        store: ParameterStore,
        emb: EmbeddingTable,
        answers: Sequence[str],
        dims: LayerDims,
        encoder: LstmParams,
        controller: ControllerParams,
        inventory: ModuleInventory,
        answer_head: AnswerParams,
        steps: int = DEFAULT_STEPS,
        max_question_length: int = DEFAULT_MAX_QUESTION_LENGTH,
        ablate: Iterable[str] = (),
    ) -> None:
        if steps < 1:
            raise ValueError(f"at least one reasoning step is needed, got {steps}")
        if controller.module_count != len(inventory):
            raise DimensionError("network", (controller.module_count,), (len(inventory),))
        if answer_head.answer_count != len(answers):
            raise DimensionError("network", (answer_head.answer_count,), (len(answers),))
        self.__store = store
        self.__emb = emb
        self.__answers = tuple(answers)
        self.__dims = {m: (int(node), int(edge)) for m, (node, edge) in dims.items()}
        self.__encoder = encoder
        self.__controller = controller
        self.__inventory = inventory
        self.__answer_head = answer_head
        self.__steps = steps
        self.__max_question_length = max_question_length
        self.__ablate = check_ablations(ablate)

    @property
    def store(self) -> ParameterStore:
        """Every trainable tensor."""
        return self.__store

    @property
    def emb(self) -> EmbeddingTable:
        """Word vectors used by the question encoder."""
        return self.__emb

    @property
    def answers(self) -> Sequence[str]:
        """Answer vocabulary, index-aligned with the logits."""
        return self.__answers

    @property
    def dims(self) -> LayerDims:
        """(node_dim, edge_dim) the network was built for, per layer."""
        return self.__dims

    @property
    def encoder(self) -> LstmParams:
        """The question LSTM."""
        return self.__encoder

    @property
    def controller(self) -> ControllerParams:
        """The step controller."""
        return self.__controller

    @property
    def inventory(self) -> ModuleInventory:
        """Module instances, in weight order."""
        return self.__inventory

    @property
    def answer_head(self) -> AnswerParams:
        """The answer classifier."""
        return self.__answer_head

    @property
    def steps(self) -> int:
        """T."""
        return self.__steps

    @property
    def max_question_length(self) -> int:
        """Questions are truncated or padded to this many words."""
        return self.__max_question_length

    @property
    def ablate(self) -> Sequence[str]:
        """Active ablations."""
        return self.__ablate

    def answer_index(self, answer: str) -> int:
        """Position of an answer in the vocabulary."""
        try:
            return self.__answers.index(answer)
        except ValueError as err:
            raise ValueError(f"answer {answer!r} is not in the vocabulary") from err

    def run(
        self,
        graphs: MultiLayerGraph,
        tokens: Sequence[str],
        ablate: Optional[Iterable[str]] = None,
    ) -> Tuple[Tensor, ReasoningTrace]:
        """`run_reasoning` with this network's parameters."""
        return run_reasoning(self, graphs, tokens, ablate)


def create_network(
    rng: np.random.Generator,
    *,
    dims: LayerDims,
    emb: EmbeddingTable,
    answers: Sequence[str],
    model_dim: int,
    steps: int = DEFAULT_STEPS,
    mlp_layers: int = 2,
    max_question_length: int = DEFAULT_MAX_QUESTION_LENGTH,
    and_lags: Tuple[int, int] = (1, 2),
    ablate: Iterable[str] = (),
) -> GraphModuleNetwork:
    """Create and initialize every parameter from the seeded generator."""
    if not answers:
        raise ValueError("the answer vocabulary is empty")
    store = ParameterStore(rng)
    encoder = create_lstm_params(store, "encoder", input_dim=emb.dim, hidden_dim=model_dim)
    inventory = build_inventory(
        store,
        dims,
        query_dim=model_dim,
        model_dim=model_dim,
        depth=mlp_layers,
        and_lags=and_lags,
    )
    controller = create_controller_params(
        store, "controller", model_dim=model_dim, module_count=len(inventory), depth=mlp_layers
    )
    answer_head = create_answer_params(
        store,
        "answer",
        node_dims={m: dims[m][0] for m in MODALITIES},
        question_dim=model_dim,
        model_dim=model_dim,
        answer_count=len(answers),
        depth=mlp_layers,
    )
    _LOG.debug(
        "created network: %d modules, %d parameter tensors, %d scalars",
        len(inventory),
        len(store),
        store.count(),
    )
    return GraphModuleNetwork(
        store=store,
        emb=emb,
        answers=answers,
        dims=dims,
        encoder=encoder,
        controller=controller,
        inventory=inventory,
        answer_head=answer_head,
        steps=steps,
        max_question_length=max_question_length,
        ablate=ablate,
    )


def run_reasoning(
    network: GraphModuleNetwork,
    graphs: MultiLayerGraph,
    tokens: Sequence[str],
    ablate: Optional[Iterable[str]] = None,
) -> Tuple[Tensor, ReasoningTrace]:
    """Encode the question, run T soft steps from uniform attention, then read out.

    `ablate` defaults to the network's own ablations.  Ablated layers are
    replaced by their placeholder; ablated module kinds get zero weight and
    are not executed.
    """
    ablations = network.ablate if ablate is None else check_ablations(ablate)
    graphs = ablate_graphs(graphs, ablations)
    enabled = network.inventory.enabled(ablations)
    found = layer_dims(graphs)
    for modality in MODALITIES:
        if found[modality] != network.dims[modality]:
            raise DimensionError(
                f"run_reasoning {modality}", found[modality], network.dims[modality]
            )

    encoding = encode_question(tokens, network.emb, network.encoder, network.max_question_length)
    features: Mapping[Modality, Tensor] = {
        g.modality: Tensor(g.node_features) for g in graphs.layers()
    }
    history: List[Dict[Modality, AttentionMap]] = [
        {g.modality: uniform_attention(g) for g in graphs.layers()}
    ]
    query = Tensor(np.zeros(network.controller.model_dim))
    records: List[StepRecord] = []
    for step in range(network.steps):
        out = step_controller(network.controller, encoding, query, enabled)
        query = out.query
        state = execute_step(
            network.inventory,
            StepInputs(graphs=graphs, features=features, query=query, history=history),
            out.module_weights,
            enabled,
        )
        history.append(state)
        records.append(
            StepRecord(
                step=step,
                module_names=network.inventory.names,
                module_weights=out.module_weights.data,
                tokens=encoding.tokens,
                word_attention=out.word_attention.data,
                layers={
                    m: LayerAttention(state[m].values, graphs.layer(m).node_labels)
                    for m in MODALITIES
                },
            )
        )

    summaries = {m: describe(history[-1][m], features[m]) for m in MODALITIES}
    logits = predict_answer(network.answer_head, summaries, encoding.question)
    return logits, ReasoningTrace(
        tokens=encoding.tokens,
        steps=records,
        answers=network.answers,
        logits=logits.data,
    )
