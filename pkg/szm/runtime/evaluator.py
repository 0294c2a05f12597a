"""
File containing the call-by-value evaluator of programs. Evaluation is weak: bodies of
abstractions are never reduced. Type annotations, ordinal abstractions and type naming are
erased on the fly.

A second, substitution-based reducer (normalize) follows the reduction rules literally. It is
much slower and is used to cross-check the environment machine.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

from szm.errors import FuelExhausted, Stuck
from szm.syntax.operations import substitute
from szm.syntax.terms import (Annot, App, Case, Cons, EpsTerm, Fix, Global, Lam, OrdAbs, Proj,
                              Record, Term, TypeLet, Var)

logger = logging.getLogger(__name__)


class Value:
    """
    Base class of the values computed by the evaluator.
    """


@dataclass(frozen=True)
class Closure(Value):
    name: str
    body: Term
    env: Mapping[str, object]


@dataclass(frozen=True)
class RecordV(Value):
    fields: Tuple[Tuple[str, Value], ...]

    def get(self, label: str) -> Optional[Value]:
        for name, value in self.fields:
            if name == label:
                return value
        return None


@dataclass(frozen=True)
class ConsV(Value):
    name: str
    value: Value


@dataclass(frozen=True)
class _Recursive:
    """
    Environment entry of a fixpoint variable: it stands for the fixpoint itself, which is
    unfolded again each time the variable is used.
    """
    term: Fix
    env: Mapping[str, object]


class Machine:
    def __init__(self, fuel: int = 1000000, definitions: Dict[str, Term] = None) -> None:
        """
        Environment-based call-by-value evaluator.

        Parameters
        ----------
        fuel : int
            Maximum number of evaluation steps. By default it is 1000000.
        definitions : dict [Optional]
            Bodies of the top-level definitions, looked up by Global nodes. Their values are
            computed once. By default it is empty.
        """
        self.fuel = fuel
        self.definitions = {} if definitions is None else definitions
        self.globals: Dict[str, Value] = {}
        self.steps = 0

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.fuel:
            raise FuelExhausted(self.fuel)

    def eval(self, t: Term, env: Mapping[str, object] = None) -> Value:
        env = {} if env is None else env
        while True:
            self._tick()
            if isinstance(t, Var):
                if t.name not in env:
                    raise Stuck(t, "unbound variable")
                entry = env[t.name]
                if isinstance(entry, _Recursive):
                    t, env = entry.term, entry.env
                    continue
                return entry
            if isinstance(t, Global):
                return self._global(t)
            if isinstance(t, Lam):
                return Closure(t.name, t.body, env)
            if isinstance(t, App):
                function = self.eval(t.function, env)
                argument = self.eval(t.argument, env)
                if not isinstance(function, Closure):
                    raise Stuck(t, "application of a value that is not a function")
                t, env = function.body, {**function.env, function.name: argument}
                continue
            if isinstance(t, Record):
                return RecordV(tuple((label, self.eval(u, env)) for label, u in t.fields))
            if isinstance(t, Proj):
                record = self.eval(t.term, env)
                value = record.get(t.label) if isinstance(record, RecordV) else None
                if value is None:
                    raise Stuck(t, f"projection on a value without field {t.label}")
                return value
            if isinstance(t, Cons):
                return ConsV(t.name, self.eval(t.argument, env))
            if isinstance(t, Case):
                scrutinee = self.eval(t.scrutinee, env)
                if not isinstance(scrutinee, ConsV):
                    raise Stuck(t, "case analysis on a value that is not a constructor")
                branch = next((b for b in t.branches if b.constructor == scrutinee.name), None)
                if branch is None:
                    raise Stuck(t, f"no branch for constructor {scrutinee.name}")
                t, env = branch.body, {**env, branch.name: scrutinee.value}
                continue
            if isinstance(t, Fix):
                t, env = t.body, {**env, t.name: _Recursive(t, env)}
                continue
            if isinstance(t, (Annot, )):
                t = t.term
                continue
            if isinstance(t, (OrdAbs, TypeLet)):
                t = t.body
                continue
            if isinstance(t, EpsTerm):
                raise Stuck(t, "choice operators cannot be evaluated")
            raise TypeError(f"Unexpected term {t!r}")

    def _global(self, t: Global) -> Value:
        if t.name not in self.globals:
            if t.name not in self.definitions:
                raise Stuck(t, "unknown definition")
            self.globals[t.name] = self.eval(self.definitions[t.name])
        return self.globals[t.name]


def evaluate(t: Term, fuel: int = 1000000, definitions: Dict[str, Term] = None) -> Value:
    """
    Evaluates a closed term to a value.

    Parameters
    ----------
    t : Term
        Term without choice operators.
    fuel : int
        Maximum number of evaluation steps. By default it is 1000000.
    definitions : dict [Optional]
        Bodies of the top-level definitions the term refers to. By default it is empty.

    Returns
    -------
    Value
        Weak call-by-value normal form.

    Raises
    ------
    Stuck
        When no reduction rule applies to a term that is not a value.
    FuelExhausted
        When more than fuel steps are needed.
    """
    machine = Machine(fuel, definitions)
    value = machine.eval(t)
    logger.debug("Evaluated in %d steps", machine.steps)
    return value


def count_steps(t: Term, fuel: int = 1000000, definitions: Dict[str, Term] = None) -> int:
    machine = Machine(fuel, definitions)
    machine.eval(t)
    return machine.steps


def _erase(t: Term) -> Term:
    while isinstance(t, (Annot, OrdAbs, TypeLet)):
        t = t.term if isinstance(t, Annot) else t.body
    return t


def _is_value(t: Term) -> bool:
    t = _erase(t)
    if isinstance(t, Lam):
        return True
    if isinstance(t, Record):
        return all(_is_value(u) for _, u in t.fields)
    if isinstance(t, Cons):
        return _is_value(t.argument)
    return False


class _Reducer:
    def __init__(self, fuel: int, definitions: Dict[str, Term]) -> None:
        self.fuel = fuel
        self.definitions = definitions
        self.steps = 0

    def normalize(self, t: Term) -> Term:
        while not _is_value(t):
            self.steps += 1
            if self.steps > self.fuel:
                raise FuelExhausted(self.fuel)
            t = self.step(_erase(t))
        return self._strip(t)

    def _strip(self, t: Term) -> Term:
        t = _erase(t)
        if isinstance(t, Record):
            return Record(tuple((label, self._strip(u)) for label, u in t.fields))
        if isinstance(t, Cons):
            return Cons(t.name, self._strip(t.argument))
        return t

    def step(self, t: Term) -> Term:
        """
        One call-by-value reduction step, inside the leftmost innermost evaluation context.
        """
        if isinstance(t, Global):
            if t.name not in self.definitions:
                raise Stuck(t, "unknown definition")
            return self.definitions[t.name]
        if isinstance(t, Fix):
            return substitute(t.body, t.name, t)
        if isinstance(t, App):
            if not _is_value(t.function):
                return App(self.step(_erase(t.function)), t.argument)
            if not _is_value(t.argument):
                return App(t.function, self.step(_erase(t.argument)))
            function = _erase(t.function)
            if not isinstance(function, Lam):
                raise Stuck(t, "application of a value that is not a function")
            return substitute(function.body, function.name, t.argument)
        if isinstance(t, Record):
            fields = list(t.fields)
            for i, (label, u) in enumerate(fields):
                if not _is_value(u):
                    fields[i] = (label, self.step(_erase(u)))
                    return Record(tuple(fields))
        if isinstance(t, Cons):
            return Cons(t.name, self.step(_erase(t.argument)))
        if isinstance(t, Proj):
            if not _is_value(t.term):
                return Proj(self.step(_erase(t.term)), t.label)
            record = _erase(t.term)
            if isinstance(record, Record):
                for label, u in record.fields:
                    if label == t.label:
                        return u
            raise Stuck(t, f"projection on a value without field {t.label}")
        if isinstance(t, Case):
            if not _is_value(t.scrutinee):
                return Case(self.step(_erase(t.scrutinee)), t.branches)
            scrutinee = _erase(t.scrutinee)
            if isinstance(scrutinee, Cons):
                for branch in t.branches:
                    if branch.constructor == scrutinee.name:
                        return substitute(branch.body, branch.name, scrutinee.argument)
            raise Stuck(t, "no branch applies")
        raise Stuck(t, "no reduction rule applies")


def normalize(t: Term, fuel: int = 1000000, definitions: Dict[str, Term] = None) -> Term:
    """
    Reduces a closed term to a value by substitution, following the call-by-value rules
    (including Y x.t ≻ t[x := Y x.t]) one step at a time.
    """
    return _Reducer(fuel, {} if definitions is None else definitions).normalize(t)


def to_term(v: Value) -> Term:
    """
    Term representation of a first-order value (records and constructors).
    """
    if isinstance(v, RecordV):
        return Record(tuple((label, to_term(u)) for label, u in v.fields))
    if isinstance(v, ConsV):
        return Cons(v.name, to_term(v.value))
    raise ValueError("Functions have no first-order representation")


def _show(v: Value, atomic: bool) -> str:
    if isinstance(v, Closure):
        return "<fun>"
    if isinstance(v, RecordV):
        return "{" + "; ".join(f"{label} = {_show(u, False)}" for label, u in v.fields) + "}"
    if v.value == RecordV(()):
        return v.name
    text = f"{v.name} {_show(v.value, True)}"
    return f"({text})" if atomic else text


def show_value(v: Value) -> str:
    """
    Prints a value in surface syntax: constructors applied to the empty record are printed
    alone (Z, S (S Z)), functions as <fun>.
    """
    return _show(v, False)
