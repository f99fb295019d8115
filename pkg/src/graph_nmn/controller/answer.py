"""Answer prediction from the three graph summaries and the question vector."""

from typing import Mapping
from ..graph import MODALITIES, Modality
from ..tensor import (
    DimensionError,
    MlpParams,
    ParameterStore,
    Tensor,
    create_mlp,
    mlp_dims,
    mlp_forward,
    ops,
)


class AnswerParams:
    """One projection per graph summary (W_8..W_10), one for q (W_11), and the classifier."""

    __slots__ = ("__projections", "__w_question", "__mlp")

    def __init__(
        self,
        *,
        projections: Mapping[Modality, Tensor],
        w_question: Tensor,
        mlp: MlpParams,
    ) -> None:
        if set(projections) != set(MODALITIES):
            raise ValueError(
                f"answer head needs one projection per layer, got {sorted(projections)}"
            )
        width = w_question.shape[1]
        for modality, proj in projections.items():
            if proj.shape[1] != width:
                raise DimensionError(f"answer projection {modality}", proj.shape, w_question.shape)
        if mlp.input_dim != width * (len(MODALITIES) + 1):
            raise DimensionError("answer mlp", (mlp.input_dim,), (width * (len(MODALITIES) + 1),))
        self.__projections = dict(projections)
        self.__w_question = w_question
        self.__mlp = mlp

    def projection(self, modality: Modality) -> Tensor:
        """Projection of one layer's summary: node_dim x model_dim."""
        return self.__projections[modality]

    @property
    def w_question(self) -> Tensor:
        """W_11: model_dim x model_dim."""
        return self.__w_question

    @property
    def mlp(self) -> MlpParams:
        """The classifier over the concatenated projections."""
        return self.__mlp

    @property
    def answer_count(self) -> int:
        """Vocabulary size."""
        return self.__mlp.output_dim


def create_answer_params(
    store: ParameterStore,
    name: str,
    *,
    node_dims: Mapping[Modality, int],
    question_dim: int,
    model_dim: int,
    answer_count: int,
    depth: int = 2,
) -> AnswerParams:
    """Register the answer head for a vocabulary of `answer_count` answers."""
    if answer_count < 1:
        raise ValueError("the answer vocabulary is empty")
    return AnswerParams(
        projections={
            m: store.create(f"{name}.w_{m}", (node_dims[m], model_dim), node_dims[m])
            for m in MODALITIES
        },
        w_question=store.create(f"{name}.w_question", (question_dim, model_dim), question_dim),
        mlp=create_mlp(
            store,
            f"{name}.mlp",
            mlp_dims(model_dim * (len(MODALITIES) + 1), model_dim, answer_count, depth),
        ),
    )


def predict_answer(
    params: AnswerParams,
    summaries: Mapping[Modality, Tensor],
    question: Tensor,
) -> Tensor:
    """Logits f([y_1 W_8; y_2 W_9; y_3 W_10; q W_11]) over the answer vocabulary."""
    if params.answer_count < 1:
        raise ValueError("the answer vocabulary is empty")
    parts = [ops.matmul(summaries[m], params.projection(m)) for m in MODALITIES]
    parts.append(ops.matmul(question, params.w_question))
    return mlp_forward(params.mlp, ops.concat(parts))
