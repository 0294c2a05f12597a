"""
File containing the abstract syntax of types.

Types may embed closed terms (in choice operators and in the dot notation) and ordinals (in
sized types, positivity connectives and second-order applications).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

from szm.syntax.ordinals import INF, Ordinal
from szm.syntax.terms import SourcePos, Term


class Type:
    """
    Base class of types.
    """


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TVar(Type):
    name: str
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Arrow(Type):
    domain: Type
    codomain: Type
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Prod(Type):
    fields: Tuple[Tuple[str, Type], ...] = ()
    pos: Optional[SourcePos] = _pos()

    def get(self, label: str) -> Optional[Type]:
        for name, type_ in self.fields:
            if name == label:
                return type_
        return None


@dataclass(frozen=True)
class Sum(Type):
    cases: Tuple[Tuple[str, Type], ...] = ()
    pos: Optional[SourcePos] = _pos()

    def get(self, constructor: str) -> Optional[Type]:
        for name, type_ in self.cases:
            if name == constructor:
                return type_
        return None


@dataclass(frozen=True)
class Forall(Type):
    name: str
    body: Type
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Exists(Type):
    name: str
    body: Type
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class OForall(Type):
    name: str
    body: Type
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class OExists(Type):
    name: str
    body: Type
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Mu(Type):
    size: Ordinal
    name: str
    body: Type
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Nu(Type):
    size: Ordinal
    name: str
    body: Type
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class EpsIn(Type):
    """
    eps_X(t in A): a type X such that t has type A.
    """
    name: str
    term: Term
    body: Type
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class EpsNotIn(Type):
    """
    eps_X(t notin A): a type X such that t does not have type A.
    """
    name: str
    term: Term
    body: Type
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Meet(Type):
    """
    A and gamma: the type A, knowing that the ordinals of gamma are nonzero.
    """
    type: Type
    ordinals: Tuple[Ordinal, ...]
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Join(Type):
    """
    A or gamma: the type A, unless one of the ordinals of gamma is zero.
    """
    type: Type
    ordinals: Tuple[Ordinal, ...]
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class TUVar(Type):
    uid: int
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class TSOApp(Type):
    """
    Application of a second-order type unification variable to ordinals.
    """
    uid: int
    args: Tuple[Ordinal, ...] = ()
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class TDot(Type):
    """
    Dot notation h.T for the abstract type T of an existentially typed term h.
    """
    term: Term
    name: str
    pos: Optional[SourcePos] = _pos()


UNIT_TYPE = Prod(())


def mu(name: str, body: Type, size: Ordinal = INF) -> Mu:
    return Mu(size, name, body)


def nu(name: str, body: Type, size: Ordinal = INF) -> Nu:
    return Nu(size, name, body)


def pair(first: Type, second: Type) -> Prod:
    """
    Product type A x B, encoded as the record {fst : A; snd : B}.
    """
    return Prod((("fst", first), ("snd", second)))
