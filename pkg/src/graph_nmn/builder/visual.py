"""The fully connected visual graph over detected objects."""

from typing import List, Sequence, Tuple
import logging
import numpy as np
from .defs import Detection
from ..graph import HeteroGraph


_LOG = logging.getLogger(__name__)

# Objects kept per image.
DEFAULT_MAX_OBJECTS = 36
SPATIAL_FEATURE_DIM = 5


def iou(box_a: Sequence[float], box_b: Sequence[float]) -> float:
    """Intersection over union of two (x, y, w, h) boxes."""
    ax, ay, aw, ah = box_a
    bx, by, bw, bh = box_b
    inter_w = max(0.0, min(ax + aw, bx + bw) - max(ax, bx))
    inter_h = max(0.0, min(ay + ah, by + bh) - max(ay, by))
    inter = inter_w * inter_h
    union = aw * ah + bw * bh - inter
    return inter / union if union > 0.0 else 0.0


def spatial_edge_feature(box_i: Sequence[float], box_j: Sequence[float]) -> np.ndarray:
    """[(xj-xi)/wi, (yj-yi)/hi, wj/wi, hj/hi, IoU(i, j)] for the edge i -> j."""
    xi, yi, wi, hi = box_i
    xj, yj, wj, hj = box_j
    return np.array([(xj - xi) / wi, (yj - yi) / hi, wj / wi, hj / hi, iou(box_i, box_j)])


def build_visual_graph(
    detections: Sequence[Detection],
    max_objects: int = DEFAULT_MAX_OBJECTS,
) -> HeteroGraph:
    """Keep the highest-scoring detections and connect every ordered pair."""
    if not detections:
        raise ValueError("the visual graph needs at least one detection")
    if max_objects <= 0:
        raise ValueError(f"max_objects must be positive, got {max_objects}")
    # Stable sort: equal scores keep file order.
    kept = sorted(detections, key=lambda d: -d.score)[:max_objects]
    if len(kept) < len(detections):
        _LOG.debug("kept %d of %d detections", len(kept), len(detections))

    edges: List[Tuple[int, int]] = []
    features: List[np.ndarray] = []
    for i, det_i in enumerate(kept):
        for j, det_j in enumerate(kept):
            if i != j:
                edges.append((i, j))
                features.append(spatial_edge_feature(det_i.bbox, det_j.bbox))

    return HeteroGraph(
        modality="visual",
        node_features=np.stack([d.feature for d in kept]),
        node_labels=[d.label for d in kept],
        node_attributes=[d.attributes for d in kept],
        edges=edges,
        edge_features=(
            np.stack(features) if features else np.zeros((0, SPATIAL_FEATURE_DIM))
        ),
    )
