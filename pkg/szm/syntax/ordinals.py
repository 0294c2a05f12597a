"""
File containing syntactic ordinals, positivity contexts and the context-relative ordering used
by sized types.

The ordering is a syntactic approximation: reflexivity, o <= S(o), o < S(o), a witness is
strictly below its bound, transitivity, and every ordinal other than infinity is strictly below
infinity.
"""
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Tuple

_witness_ids = itertools.count(1)


class Ordinal:
    """
    Base class of syntactic ordinals.
    """


@dataclass(frozen=True)
class Inf(Ordinal):
    pass


INF = Inf()


@dataclass(frozen=True)
class Succ(Ordinal):
    pred: Ordinal

    def __new__(cls, pred: Ordinal):
        # The constructions are stationary at infinity.
        if isinstance(pred, Inf):
            return pred
        return super().__new__(cls)

    def __getnewargs__(self):
        # Reports are sent back from worker processes with --jobs.
        return (self.pred, )


@dataclass(frozen=True)
class OVar(Ordinal):
    name: str


@dataclass(frozen=True)
class OWitness(Ordinal):
    uid: int
    bound: Ordinal = field(compare=False)


@dataclass(frozen=True)
class OUVar(Ordinal):
    uid: int


@dataclass(frozen=True)
class SecondOrder(Ordinal):
    uid: int
    args: Tuple[Ordinal, ...] = ()


@dataclass(frozen=True)
class PosCtx:
    """
    Positivity context: ordinals assumed to be nonzero, plus the strict-order facts recorded
    for the witnesses in scope. Extension returns a new context.
    """
    positive: Tuple[Ordinal, ...] = ()
    facts: Tuple[Tuple[OWitness, Ordinal], ...] = ()

    def assume(self, *ordinals: Ordinal) -> "PosCtx":
        positive = self.positive
        for o in ordinals:
            if o not in positive:
                positive = positive + (o, )
        if positive is self.positive:
            return self
        return PosCtx(positive, self.facts)

    def record(self, witness: OWitness) -> "PosCtx":
        return PosCtx(self.positive, self.facts + ((witness, witness.bound), ))

    def bound_of(self, witness: OWitness) -> Optional[Ordinal]:
        for w, bound in self.facts:
            if w == witness:
                return bound
        return None

    def record_all(self, witnesses: Iterable[OWitness]) -> "PosCtx":
        """
        Records the facts of the given witnesses that are not known yet.
        """
        gamma = self
        for w in witnesses:
            if gamma.bound_of(w) is None:
                gamma = gamma.record(w)
        return gamma

    def ordinals(self) -> Tuple[Ordinal, ...]:
        """
        Ordinals in scope, positive ones first, then the recorded witnesses, oldest first.
        """
        recorded = tuple(w for w, _ in self.facts if w not in self.positive)
        return self.positive + recorded

    def __iter__(self) -> Iterator[Ordinal]:
        return iter(self.positive)

    def __contains__(self, o: Ordinal) -> bool:
        return o in self.positive

    def __len__(self) -> int:
        return len(self.positive)


def is_resolved(o: Ordinal) -> bool:
    """
    Tells whether an ordinal contains no unification variable.
    """
    if isinstance(o, Succ):
        return is_resolved(o.pred)
    return not isinstance(o, (OUVar, SecondOrder))


def _resolved(o: Ordinal, resolve: Optional[Callable]) -> Ordinal:
    if resolve is not None:
        o = resolve(o)
    assert is_resolved(o), f"Ordinal {o} contains an unset unification variable"
    return o


def _witness_bound(gamma: PosCtx, w: OWitness) -> Ordinal:
    bound = gamma.bound_of(w)
    return w.bound if bound is None else bound


def ord_leq(gamma: PosCtx, o1: Ordinal, o2: Ordinal, resolve: Callable = None) -> bool:
    """
    Decides o1 <= o2 in the positivity context gamma.

    Parameters
    ----------
    gamma : PosCtx
        Positivity context of the judgment.
    o1 : Ordinal
        Left-hand side.
    o2 : Ordinal
        Right-hand side.
    resolve : Callable [Optional]
        Function replacing bound unification variables by their values. Unset variables are
        not allowed. By default it is None.

    Returns
    -------
    bool
        True when o1 <= o2 follows from the syntactic closure, False otherwise.
    """
    o1, o2 = _resolved(o1, resolve), _resolved(o2, resolve)
    if o1 == o2 or isinstance(o2, Inf):
        return True
    if ord_less(gamma, o1, o2):
        return True
    if isinstance(o2, Succ) and ord_leq(gamma, o1, o2.pred):
        return True
    if isinstance(o1, Succ) and ord_less(gamma, o1.pred, o2):
        return True
    if isinstance(o1, OWitness) and ord_leq(gamma, _witness_bound(gamma, o1), o2):
        return True
    return False


def ord_less(gamma: PosCtx, o1: Ordinal, o2: Ordinal, resolve: Callable = None) -> bool:
    """
    Decides o1 < o2 in the positivity context gamma. Strict inequalities only come from
    successors, from witnesses and from infinity, so ord_less implies ord_leq.
    """
    o1, o2 = _resolved(o1, resolve), _resolved(o2, resolve)
    if isinstance(o1, Inf):
        return False
    if isinstance(o2, Succ) and ord_leq(gamma, o1, o2.pred):
        return True
    if isinstance(o1, OWitness) and ord_leq(gamma, _witness_bound(gamma, o1), o2):
        return True
    if isinstance(o2, Inf):
        return True
    return False


def ord_nonzero(gamma: PosCtx, o: Ordinal, resolve: Callable = None) -> bool:
    """
    Tells whether o is provably nonzero: infinity, a successor, or an ordinal recorded in
    gamma.
    """
    o = _resolved(o, resolve)
    return isinstance(o, (Inf, Succ)) or o in gamma


def fresh_witness(gamma: PosCtx,
                  bound: Ordinal,
                  ids: Iterator[int] = None) -> Tuple[OWitness, PosCtx]:
    """
    Creates a witness ordinal strictly below a nonzero bound, as done when a sized type is
    unfolded.

    Parameters
    ----------
    gamma : PosCtx
        Positivity context, in which the bound must be provably nonzero.
    bound : Ordinal
        Ordinal the witness is below.
    ids : Iterator[int] [Optional]
        Source of witness identifiers. Checking sessions pass their own counter so that the
        numbering is reproducible. By default a module level counter is used.

    Returns
    -------
    Tuple[OWitness, PosCtx]
        The witness and the context extended with the fact witness < bound.
    """
    assert ord_nonzero(gamma, bound), f"Cannot create a witness below {bound}: not nonzero"
    if ids is None:
        ids = _witness_ids
    witness = OWitness(next(ids), bound)
    return witness, gamma.record(witness)


def atoms(o: Ordinal) -> Iterator[Ordinal]:
    """
    Yields the atomic ordinals (variables, witnesses and unification variables) of o.
    """
    if isinstance(o, Succ):
        yield from atoms(o.pred)
    elif isinstance(o, SecondOrder):
        for arg in o.args:
            yield from atoms(arg)
    elif not isinstance(o, Inf):
        yield o


def map_atoms(o: Ordinal, f: Callable[[Ordinal], Ordinal]) -> Ordinal:
    """
    Rebuilds o after applying f to each of its atomic ordinals.
    """
    if isinstance(o, Inf):
        return o
    if isinstance(o, Succ):
        return Succ(map_atoms(o.pred, f))
    if isinstance(o, SecondOrder):
        return SecondOrder(o.uid, tuple(map_atoms(a, f) for a in o.args))
    return f(o)
