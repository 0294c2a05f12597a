"""
File containing general abstract sequents, the registry of induction hypotheses and the
generalisation step shared by subtyping and typing.

A judgment is generalised by abstracting the ordinals occurring in its types: each distinct
atomic ordinal becomes a parameter of the hypothesis and the judgment is remembered under a
canonical key. A later judgment with the same key closes its branch by using the hypothesis,
provided the size-change edge created by this use keeps the call graph well-founded.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from more_itertools import unique_everseen

from szm.engine.scp import check_well_founded, edge_matrix, format_matrix
from szm.syntax.operations import canonical, free_names, ordinal_params, ordinals_of, transform
from szm.syntax.ordinals import (INF, Inf, OVar, OWitness, Ordinal, PosCtx, SecondOrder,
                                 ord_nonzero)
from szm.syntax.types import (Arrow, Exists, Forall, Join, Meet, Mu, Nu, OExists, OForall, Prod,
                              Sum, TSOApp, Type)

logger = logging.getLogger(__name__)

SUBTYPING, TYPING = "subtyping", "typing"


@dataclass
class Hypothesis:
    """
    General abstract sequent registered as an induction hypothesis.
    """
    uid: int
    kind: str
    key: tuple
    params: Tuple[OVar, ...]
    args: Tuple[Ordinal, ...]
    pattern: Tuple[bool, ...]
    judgment: object = None

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def label(self) -> str:
        return f"I_{self.uid}"


@dataclass
class Generalised:
    """
    Result of abstracting a judgment: generic types over params, and the ordinals the
    judgment instantiates them with.
    """
    kind: str
    key: tuple
    params: Tuple[OVar, ...]
    args: Tuple[Ordinal, ...]
    pattern: Tuple[bool, ...]
    types: Tuple[Type, ...]
    lifted: List[int] = field(default_factory=list)

    @property
    def arity(self) -> int:
        return len(self.params)

    def generic_context(self) -> PosCtx:
        return PosCtx(tuple(p for p, nonzero in zip(self.params, self.pattern) if nonzero))


class HypothesisRegistry:
    def __init__(self, store) -> None:
        self.store = store
        self.entries: List[Hypothesis] = []
        self.by_key: Dict[tuple, List[Hypothesis]] = {}

    def register(self, hypothesis: Hypothesis) -> None:
        self.entries.append(hypothesis)
        self.by_key.setdefault(hypothesis.key, []).append(hypothesis)

        def undo():
            self.entries.remove(hypothesis)
            self.by_key[hypothesis.key].remove(hypothesis)

        self.store.record_undo(undo)

    def candidates(self, key: tuple) -> List[Hypothesis]:
        """
        Hypotheses registered under key, newest first.
        """
        return list(reversed(self.by_key.get(key, [])))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def _decorate_infinity(a: Type, positive: bool, fresh) -> Type:
    """
    Replaces the infinite sizes of inductive types in negative positions and of coinductive
    types in positive positions by fresh parameters.
    """
    go = _decorate_infinity
    if isinstance(a, Arrow):
        return Arrow(go(a.domain, not positive, fresh), go(a.codomain, positive, fresh), a.pos)
    if isinstance(a, Prod):
        return Prod(tuple((label, go(b, positive, fresh)) for label, b in a.fields), a.pos)
    if isinstance(a, Sum):
        return Sum(tuple((label, go(b, positive, fresh)) for label, b in a.cases), a.pos)
    if isinstance(a, (Forall, Exists)):
        return type(a)(a.name, go(a.body, positive, fresh), a.pos)
    if isinstance(a, (Mu, Nu)):
        size = a.size
        if isinstance(size, Inf) and positive == isinstance(a, Nu):
            size = fresh()
        return type(a)(size, a.name, go(a.body, positive, fresh), a.pos)
    return a


def has_ordinal_quantifier(a: Type) -> bool:
    if isinstance(a, (OForall, OExists)):
        return True
    if isinstance(a, Arrow):
        return has_ordinal_quantifier(a.domain) or has_ordinal_quantifier(a.codomain)
    if isinstance(a, Prod):
        return any(has_ordinal_quantifier(b) for _, b in a.fields)
    if isinstance(a, Sum):
        return any(has_ordinal_quantifier(b) for _, b in a.cases)
    if isinstance(a, (Forall, Exists, Mu, Nu)):
        return has_ordinal_quantifier(a.body)
    if isinstance(a, (Meet, Join)):
        return has_ordinal_quantifier(a.type)
    return False


def abstract_sequent(session,
                     kind: str,
                     gamma: PosCtx,
                     types: Sequence[Type],
                     term=None,
                     decorate: bool = False) -> Generalised:
    """
    Computes the general abstract sequent of a judgment.

    Parameters
    ----------
    session : Session
        Checking session holding the unification store.
    kind : str
        SUBTYPING or TYPING.
    gamma : PosCtx
        Positivity context of the judgment.
    types : Sequence[Type]
        Types of the judgment: (A, B) for subtyping, (A, ) for typing.
    term : Term [Optional]
        Subject, part of the key of typing judgments. By default it is None.
    decorate : bool
        Whether infinite sizes at negative inductive and positive coinductive positions become
        parameters (instantiated with infinity), as done for fixpoints. By default it is False.

    Returns
    -------
    Generalised
        Generic types, parameters, arguments and key.
    """
    store = session.store
    for a in types:
        for uid in store.unset_type_uvars(a):
            store.instantiate_constraints(uid)
    types = [store.zonk(a) for a in types]
    free_ordinals = set()
    for a in types:
        free_ordinals |= {name for sort, name in free_names(a) if sort == "o"}

    def is_hole(o):
        return isinstance(o, OWitness) or (isinstance(o, OVar) and o.name in free_ordinals)

    holes = list(unique_everseen(o for a in types for o in ordinals_of(a) if is_hole(o)))
    tag = str(next(store.ids))
    if holes:
        unset = unique_everseen(uid for a in types for uid in store.unset_ord_uvars(a))
        for uid in list(unset):
            so = store.new_second_order(len(holes))
            store.bind_ordinal(uid, SecondOrder(so, tuple(holes)), gamma)
        types = [store.zonk(a) for a in types]

    params = list(ordinal_params(len(holes), tag))
    args = list(holes)
    if decorate:
        extra = []

        def fresh():
            param = OVar(f"θ{tag}_{len(holes) + len(extra) + 1}")
            extra.append(param)
            return param

        types = [_decorate_infinity(a, True, fresh) for a in types]
        params += extra
        args += [INF] * len(extra)

    lifted = []
    if params:
        for a in types:
            for uid in store.unset_type_uvars(a):
                if store.type_state(uid).status == "unset":
                    lifted.append(store.lift_to_second_order(uid, args))
        types = [store.zonk(a) for a in types]

    mapping = dict(zip(holes, params))

    def leaf(b):
        if isinstance(b, TSOApp) and b.uid in lifted:
            return TSOApp(b.uid, tuple(params), b.pos)
        return None

    generic = tuple(transform(a, type_leaf=leaf, ordinal_atom=lambda o: mapping.get(o, o))
                    for a in types)
    index = {p: i for i, p in enumerate(params)}
    pattern = tuple(ord_nonzero(gamma, h) for h in holes) + (True, ) * (len(params) - len(holes))
    key = (kind, tuple(canonical(g, index) for g in generic),
           None if term is None else canonical(term, store=store), pattern)
    return Generalised(kind, key, tuple(params), tuple(args), pattern, generic, lifted)


def try_hypotheses(session, generalised: Generalised,
                   gamma: PosCtx) -> Optional[Tuple[Hypothesis, object]]:
    """
    Looks for a registered hypothesis with the same key whose use keeps the call graph
    well-founded, trying the newest first. The accepted edge stays in the graph.

    Returns
    -------
    Optional[Tuple[Hypothesis, np.ndarray]]
        The hypothesis and the matrix of the new edge (None outside any hypothesis), or None.
    """
    frame = session.frame
    for hypothesis in session.registry.candidates(generalised.key):
        if frame is None:
            return hypothesis, None
        matrix = edge_matrix(gamma, frame.params, generalised.args, session.store.resolve_ordinal)
        edge = session.graph.add_edge(frame.uid, hypothesis.uid, matrix)
        verdict = check_well_founded(session.graph)
        if verdict:
            session.store.record_undo(lambda edge=edge: session.graph.remove_edge(edge))
            logger.debug("Hypothesis %d used from %d:\n%s", hypothesis.uid, frame.uid,
                         format_matrix(matrix))
            return hypothesis, matrix
        session.graph.remove_edge(edge)
        session.rejections.append((hypothesis, verdict))
    return None


def register(session, generalised: Generalised, gamma: PosCtx, judgment) -> Hypothesis:
    """
    Registers a new hypothesis, with the edge from the hypothesis being proved (if any).
    """
    uid = next(session.hypothesis_ids)
    hypothesis = Hypothesis(uid, generalised.kind, generalised.key, generalised.params,
                            generalised.args, generalised.pattern, judgment)
    session.registry.register(hypothesis)
    graph = session.graph
    graph.add_node(uid, hypothesis.arity)
    session.store.record_undo(lambda: graph.remove_node(uid))
    frame = session.frame
    if frame is not None:
        matrix = edge_matrix(gamma, frame.params, generalised.args, session.store.resolve_ordinal)
        edge = graph.add_edge(frame.uid, uid, matrix)
        session.store.record_undo(lambda: graph.remove_edge(edge))
    logger.debug("Registered %s hypothesis %d of arity %d", generalised.kind, uid,
                 hypothesis.arity)
    return hypothesis
