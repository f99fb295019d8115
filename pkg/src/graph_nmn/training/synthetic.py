"""Synthetic compositional question answering tasks with symbolic ground truth."""

from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple
import logging
import numpy as np
from ..builder import (
    CaptionTuple,
    Detection,
    EmbeddingTable,
    KnowledgeTriple,
    build_multilayer_graph,
    normalize_label,
    tokenize,
)
from ..graph import MultiLayerGraph
from .oracle import OracleError, ProgramStep, execute_program


_LOG = logging.getLogger(__name__)

# noun -> (UsedFor, AtLocation, IsA) tails.
DEFAULT_KNOWLEDGE: Mapping[str, Tuple[str, str, str]] = {
    "helmet": ("protect head", "construction site", "headwear"),
    "car": ("transport", "garage", "vehicle"),
    "dog": ("companionship", "kennel", "animal"),
    "bike": ("riding", "street", "bicycle"),
    "umbrella": ("stay dry", "closet", "accessory"),
    "cup": ("drinking", "kitchen", "container"),
    "ball": ("playing games", "park", "toy"),
    "knife": ("cutting", "drawer", "tool"),
    "book": ("reading", "library", "publication"),
    "chair": ("sitting", "office", "furniture"),
    "guitar": ("making music", "stage", "instrument"),
    "lamp": ("lighting", "bedroom", "light source"),
}
DEFAULT_COLORS: Tuple[str, ...] = ("red", "black", "white", "blue", "green", "yellow")
SPATIAL_RELATIONS: Tuple[str, ...] = ("near", "on", "under", "behind", "beside")

# Knowledge relations the cross-graph family asks about, with their question wording.
KNOWLEDGE_QUESTIONS: Mapping[str, Tuple[str, ...]] = {
    "UsedFor": ("what", "is", "the", "{color}", "object", "used", "for"),
    "AtLocation": ("where", "is", "the", "{color}", "object", "usually", "found"),
    "IsA": ("what", "kind", "of", "thing", "is", "the", "{color}", "object"),
}
_KNOWLEDGE_INDEX = {"UsedFor": 0, "AtLocation": 1, "IsA": 2}

# Facts every noun also has; they are never asked about.
DISTRACTOR_RELATIONS: Tuple[Tuple[str, str], ...] = (
    ("HasProperty", "useful"),
    ("CapableOf", "being moved"),
)

FAMILY_HOPS: Mapping[str, int] = {"attribute": 1, "relational": 2, "cross_graph": 3}

# Every layer of a generated image holds between these many nodes.
MIN_LAYER_NODES = 4
MAX_LAYER_NODES = 10

DEFAULT_RETRIES = 20
FEATURE_NOISE = 0.05


class TaskSizes:
    """How many objects an image may hold, and how many nodes each of its layers may have."""

    __slots__ = ("__min_objects", "__max_objects", "__min_nodes", "__max_nodes")

    def __init__(
        self,
        min_objects: int = 4,
        max_objects: int = 5,
        min_nodes: int = MIN_LAYER_NODES,
        max_nodes: int = MAX_LAYER_NODES,
    ) -> None:
        if not 1 <= min_objects <= max_objects:
            raise ValueError(f"bad object range [{min_objects}, {max_objects}]")
        if not 1 <= min_nodes <= max_nodes:
            raise ValueError(f"bad layer node range [{min_nodes}, {max_nodes}]")
        self.__min_objects = min_objects
        self.__max_objects = max_objects
        self.__min_nodes = min_nodes
        self.__max_nodes = max_nodes

    @property
    def min_objects(self) -> int:
        """Fewest objects per image."""
        return self.__min_objects

    @property
    def max_objects(self) -> int:
        """Most objects per image."""
        return self.__max_objects

    @property
    def min_nodes(self) -> int:
        """Fewest nodes in any layer."""
        return self.__min_nodes

    @property
    def max_nodes(self) -> int:
        """Most nodes in any layer."""
        return self.__max_nodes

    def fits(self, graphs: MultiLayerGraph) -> bool:
        """Is every layer within the node range?"""
        return all(self.__min_nodes <= g.num_nodes <= self.__max_nodes for g in graphs.layers())


class SyntheticTask:
    """One question over one image's graphs, with its answer and the program that derives it."""

    __slots__ = ("__graphs", "__tokens", "__answer", "__hops", "__family", "__program")

    def __init__(
        self,
        *,
        graphs: MultiLayerGraph,
        tokens: Sequence[str],
        answer: str,
        hops: int,
        family: str,
        program: Sequence[ProgramStep] = (),
    ) -> None:
        if not tokens:
            raise ValueError("a task needs a question")
        self.__graphs = graphs
        self.__tokens = tuple(tokens)
        self.__answer = answer
        self.__hops = hops
        self.__family = family
        self.__program = tuple(program)

    @property
    def graphs(self) -> MultiLayerGraph:
        """The image's three layers."""
        return self.__graphs

    @property
    def tokens(self) -> Sequence[str]:
        """The question words."""
        return self.__tokens

    @property
    def answer(self) -> str:
        """The ground-truth answer."""
        return self.__answer

    @property
    def hops(self) -> int:
        """Reasoning hops the program needs."""
        return self.__hops

    @property
    def family(self) -> str:
        """Template family."""
        return self.__family

    @property
    def program(self) -> Sequence[ProgramStep]:
        """The symbolic layout; diagnostics only, never shown to the model."""
        return self.__program

    def __repr__(self) -> str:
        return f"SyntheticTask({' '.join(self.__tokens)!r} -> {self.__answer!r})"


class SyntheticWorld:
    """Vocabulary, word vectors and knowledge base shared by every generated task."""

    __slots__ = ("__knowledge", "__colors", "__emb", "__facts")

    def __init__(
        self,
        seed: int,
        embedding_dim: int,
        knowledge: Mapping[str, Tuple[str, str, str]] = DEFAULT_KNOWLEDGE,
        colors: Sequence[str] = DEFAULT_COLORS,
    ) -> None:
        if len(knowledge) < 2 or len(colors) < 2:
            raise ValueError("a synthetic world needs at least two nouns and two colors")
        self.__knowledge = dict(knowledge)
        self.__colors = tuple(colors)
        self.__facts = {noun: self.__build_facts(noun) for noun in self.__knowledge}
        self.__emb = self.__build_embeddings(seed, embedding_dim)

    def __build_facts(self, noun: str) -> Tuple[KnowledgeTriple, ...]:
        tails = self.__knowledge[noun]
        asked = [
            KnowledgeTriple(head=noun, relation=relation, tail=tails[index], score=0.9)
            for relation, index in _KNOWLEDGE_INDEX.items()
        ]
        other = [
            KnowledgeTriple(head=noun, relation=relation, tail=tail, score=0.6)
            for relation, tail in DISTRACTOR_RELATIONS
        ]
        return (*asked, *other)

    def __build_embeddings(self, seed: int, dim: int) -> EmbeddingTable:
        words: Set[str] = set()
        phrases: List[str] = [*self.__knowledge, *self.__colors, *SPATIAL_RELATIONS, "has"]
        for tails in self.__knowledge.values():
            phrases.extend(tails)
        phrases.extend(t for _, t in DISTRACTOR_RELATIONS)
        phrases.extend(_KNOWLEDGE_INDEX)
        phrases.extend(r for r, _ in DISTRACTOR_RELATIONS)
        for template in KNOWLEDGE_QUESTIONS.values():
            phrases.extend(w for w in template if not w.startswith("{"))
        phrases.extend(("what", "color", "is", "the"))
        for phrase in phrases:
            words.update(tokenize(phrase))
        rng = np.random.default_rng(seed)
        return EmbeddingTable(
            {w: rng.normal(0.0, 1.0 / np.sqrt(dim), size=dim) for w in sorted(words)}, dim
        )

    @property
    def emb(self) -> EmbeddingTable:
        """Vectors for every word the world uses."""
        return self.__emb

    @property
    def store(self) -> Sequence[KnowledgeTriple]:
        """The whole knowledge base."""
        return tuple(fact for facts in self.__facts.values() for fact in facts)

    def facts(self, noun: str) -> Sequence[KnowledgeTriple]:
        """Every fact whose head is the noun."""
        return self.__facts[noun]

    @property
    def nouns(self) -> Sequence[str]:
        """Object names."""
        return tuple(self.__knowledge)

    @property
    def colors(self) -> Sequence[str]:
        """Attribute values."""
        return self.__colors

    def knowledge_tail(self, noun: str, relation: str) -> str:
        """The tail of one of the asked-about facts of a noun."""
        return normalize_label(self.__knowledge[noun][_KNOWLEDGE_INDEX[relation]])

    def answer_vocabulary(self, family: str) -> Sequence[str]:
        """Every answer the family can produce, sorted."""
        answers: Set[str] = set()
        if family in ("attribute", "mixed"):
            answers.update(normalize_label(c) for c in self.__colors)
        if family in ("relational", "mixed"):
            answers.update(normalize_label(n) for n in self.__knowledge)
        if family in ("cross_graph", "mixed"):
            for noun in self.__knowledge:
                answers.update(self.knowledge_tail(noun, r) for r in _KNOWLEDGE_INDEX)
        if not answers:
            raise ValueError(f"unknown question family {family}")
        return tuple(sorted(answers))


class _Scene:
    """Objects with their colors, the caption chain linking them, and the object asked about."""

    __slots__ = ("nouns", "colors", "relations", "focus", "asked")

    def __init__(
        self,
        nouns: Sequence[str],
        colors: Sequence[str],
        relations: Sequence[str],
    ) -> None:
        self.nouns = list(nouns)
        self.colors = list(colors)
        self.relations = list(relations)
        self.focus = 0
        self.asked: Optional[str] = None


def generate_synthetic_task(
    rng: np.random.Generator,
    world: SyntheticWorld,
    family: str,
    sizes: Optional[TaskSizes] = None,
    *,
    max_objects: int = 36,
    top_k: int = 50,
    score_a: float = 0.7,
    score_b: float = 0.3,
    retries: int = DEFAULT_RETRIES,
) -> SyntheticTask:
    """Sample one task of a family; "mixed" picks a family uniformly first.

    The answer is chosen first so answers are balanced, then a scene is built
    around it and the symbolic program re-derives the answer.  Scenes where
    the program fails or any layer is degenerate are resampled.
    """
    sizes = sizes or TaskSizes()
    if family == "mixed":
        family = str(rng.choice(sorted(FAMILY_HOPS)))
    if family not in FAMILY_HOPS:
        raise ValueError(f"unknown question family {family}")
    for attempt in range(retries):
        scene, tokens, answer, program = _sample(rng, world, family, sizes)
        graphs = _scene_graphs(
            rng,
            world,
            scene,
            max_objects=max_objects,
            max_nodes=sizes.max_nodes,
            top_k=top_k,
            a=score_a,
            b=score_b,
        )
        if not sizes.fits(graphs):
            _LOG.debug(
                "attempt %d: layer sizes %s outside [%d, %d], resampling",
                attempt,
                [g.num_nodes for g in graphs.layers()],
                sizes.min_nodes,
                sizes.max_nodes,
            )
            continue
        try:
            derived = execute_program(graphs, program)
        except OracleError as err:
            _LOG.debug("attempt %d: program failed (%s), resampling", attempt, err)
            continue
        if derived != answer:
            _LOG.debug("attempt %d: oracle answered %r, not %r", attempt, derived, answer)
            continue
        return SyntheticTask(
            graphs=graphs,
            tokens=tokens,
            answer=answer,
            hops=FAMILY_HOPS[family],
            family=family,
            program=program,
        )
    raise ValueError(f"could not satisfy a {family} template in {retries} attempts")


def generate_tasks(
    rng: np.random.Generator,
    world: SyntheticWorld,
    family: str,
    count: int,
    sizes: Optional[TaskSizes] = None,
    *,
    max_objects: int = 36,
    top_k: int = 50,
    score_a: float = 0.7,
    score_b: float = 0.3,
) -> List[SyntheticTask]:
    """`count` independent tasks."""
    return [
        generate_synthetic_task(
            rng,
            world,
            family,
            sizes,
            max_objects=max_objects,
            top_k=top_k,
            score_a=score_a,
            score_b=score_b,
        )
        for _ in range(count)
    ]


def _sample(
    rng: np.random.Generator,
    world: SyntheticWorld,
    family: str,
    sizes: TaskSizes,
) -> Tuple[_Scene, Sequence[str], str, Sequence[ProgramStep]]:
    count = int(rng.integers(sizes.min_objects, sizes.max_objects + 1))
    count = min(count, len(world.nouns))
    nouns = [str(n) for n in rng.choice(world.nouns, size=count, replace=False)]
    colors = [str(c) for c in rng.choice(world.colors, size=count)]
    relations = [str(r) for r in rng.choice(SPATIAL_RELATIONS, size=max(count - 1, 0))]
    scene = _Scene(nouns, colors, relations)

    if family == "attribute":
        answer = str(rng.choice(world.colors))
        target = int(rng.integers(count))
        scene.colors[target] = answer
        scene.focus = target
        tokens = ("what", "color", "is", "the", *tokenize(nouns[target]))
        program = (
            ProgramStep("find", "visual", nouns[target]),
            ProgramStep("query_attribute", "visual"),
        )
        return scene, tokens, normalize_label(answer), program

    if family == "relational":
        # Caption chain: nouns[i] <relations[i]> nouns[i + 1].
        answer_index = int(rng.integers(1, count)) if count > 1 else 0
        subject = nouns[answer_index - 1] if count > 1 else nouns[0]
        relation = relations[answer_index - 1] if count > 1 else SPATIAL_RELATIONS[0]
        scene.focus = max(answer_index - 1, 0)
        tokens = ("what", "is", "the", *tokenize(subject), *tokenize(relation))
        program = (
            ProgramStep("find", "semantic", subject),
            ProgramStep("relate", "semantic", relation),
            ProgramStep("query_label", "semantic"),
        )
        return scene, tokens, normalize_label(nouns[answer_index]), program

    relation = str(rng.choice(sorted(KNOWLEDGE_QUESTIONS)))
    target = int(rng.integers(count))
    scene.focus = target
    scene.asked = relation
    color = scene.colors[target]
    others = [c for c in world.colors if c != color]
    for i in range(count):
        if i != target:
            scene.colors[i] = str(rng.choice(others))
    tokens = tuple(w.format(color=color) for w in KNOWLEDGE_QUESTIONS[relation])
    program = (
        ProgramStep("find", "visual", color),
        ProgramStep("cross", "commonsense"),
        ProgramStep("relate", "commonsense", relation),
        ProgramStep("query_label", "commonsense"),
    )
    return scene, tokens, world.knowledge_tail(nouns[target], relation), program


def _scene_graphs(
    rng: np.random.Generator,
    world: SyntheticWorld,
    scene: _Scene,
    *,
    max_objects: int,
    max_nodes: int,
    top_k: int,
    a: float,
    b: float,
) -> MultiLayerGraph:
    emb = world.emb
    detections = []
    for noun, color in zip(scene.nouns, scene.colors):
        x, y = rng.uniform(0.0, 400.0, size=2)
        w, h = rng.uniform(20.0, 200.0, size=2)
        feature = (
            emb.phrase_vector(noun)[0]
            + emb.vector(color)
            + rng.normal(0.0, FEATURE_NOISE / np.sqrt(emb.dim), size=emb.dim)
        )
        detections.append(
            Detection(
                bbox=(x, y, w, h),
                label=noun,
                score=float(rng.uniform(0.5, 1.0)),
                feature=feature,
                attributes=(color,),
            )
        )
    captions = [
        CaptionTuple(
            subject=scene.nouns[i],
            relation=scene.relations[i],
            obj=scene.nouns[i + 1],
            attributes=(scene.colors[i],),
        )
        for i in range(len(scene.relations))
    ]
    if not captions:
        captions = [
            CaptionTuple(
                subject=scene.nouns[0],
                relation=SPATIAL_RELATIONS[0],
                obj=scene.nouns[0],
                attributes=(scene.colors[0],),
            )
        ]
    return build_multilayer_graph(
        detections=detections,
        captions=captions,
        store=_scene_facts(rng, world, scene, max_nodes),
        emb=emb,
        max_objects=max_objects,
        a=a,
        b=b,
        k=top_k,
    )


def answer_counts(tasks: Sequence[SyntheticTask]) -> Dict[str, int]:
    """How often each answer occurs."""
    ret: Dict[str, int] = {}
    for task in tasks:
        ret[task.answer] = ret.get(task.answer, 0) + 1
    return ret


def _scene_facts(
    rng: np.random.Generator,
    world: SyntheticWorld,
    scene: _Scene,
    max_nodes: int,
) -> List[KnowledgeTriple]:
    """The knowledge an image's objects retrieve, sized to fit the commonsense layer.

    The focus object keeps the asked-about fact and one other; every other
    object adds one random fact while the layer stays within `max_nodes`.
    """
    facts = world.facts(scene.nouns[scene.focus])
    chosen = [f for f in facts if f.relation == scene.asked]
    rest = [f for f in facts if f.relation != scene.asked]
    chosen.append(rest[int(rng.integers(len(rest)))])
    nodes = {normalize_label(end) for fact in chosen for end in (fact.head, fact.tail)}
    for index in rng.permutation(len(scene.nouns)).tolist():
        if index == scene.focus:
            continue
        options = world.facts(scene.nouns[index])
        fact = options[int(rng.integers(len(options)))]
        grown = nodes | {normalize_label(fact.head), normalize_label(fact.tail)}
        if len(grown) <= max_nodes:
            chosen.append(fact)
            nodes = grown
    return chosen
