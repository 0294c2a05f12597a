"""
File containing source positions and the abstract syntax of terms.

Every node carries an optional source position that is ignored by equality. Nodes are
immutable and can be shared between checking sessions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Tuple

_epsilon_ids = itertools.count(1)


@dataclass(frozen=True)
class SourcePos:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class Term:
    """
    Base class of terms.
    """


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var(Term):
    name: str
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Lam(Term):
    name: str
    body: Term
    domain: Optional["Type"] = None
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class App(Term):
    function: Term
    argument: Term
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Record(Term):
    fields: Tuple[Tuple[str, Term], ...] = ()
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Proj(Term):
    term: Term
    label: str
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Cons(Term):
    name: str
    argument: Term
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Branch:
    constructor: str
    name: str
    body: Term


@dataclass(frozen=True)
class Case(Term):
    scrutinee: Term
    branches: Tuple[Branch, ...]
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Fix(Term):
    name: str
    body: Term
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Annot(Term):
    term: Term
    type: "Type"
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class OrdAbs(Term):
    name: str
    body: Term
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class TypeLet(Term):
    """
    ``let X such that x : P in t``: the names are bound in the pattern P and in the type
    annotations of t.
    """
    names: Tuple[str, ...]
    subject: Term
    pattern: "Type"
    body: Term
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class Global(Term):
    """
    Reference to a checked top-level definition.
    """
    name: str
    pos: Optional[SourcePos] = _pos()


@dataclass(frozen=True)
class EpsTerm(Term):
    """
    Choice operator eps_{x in A}(t notin B): a term of type A such that t[x := it] does not
    have type B, if such a term exists. It binds x in t. Two operators are the same iff they
    have the same identifier.
    """
    uid: int
    name: str = field(compare=False)
    domain: "Type" = field(compare=False)
    body: Term = field(compare=False)
    codomain: "Type" = field(compare=False)
    pos: Optional[SourcePos] = _pos()


def eps_term(name: str, domain, body: Term, codomain, pos: SourcePos = None) -> EpsTerm:
    """
    Builds a choice operator with a fresh identifier.
    """
    return EpsTerm(next(_epsilon_ids), name, domain, body, codomain, pos)


UNIT = Record(())
