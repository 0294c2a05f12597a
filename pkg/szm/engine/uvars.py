"""
File containing the store of unification variables: type variables with their delayed field
constraints, ordinal variables with their bounds, and second-order variables depending on
ordinals. Every mutation is recorded on a trail so that the search can be rolled back.
"""
import itertools
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from szm.errors import Clash, ConstraintClash, NoPositiveSolution, OccursCheck, Unsolvable
from szm.syntax.operations import ordinal_params, transform
from szm.syntax.ordinals import (INF, OUVar, OVar, Ordinal, PosCtx, SecondOrder, Succ,
                                 fresh_witness, is_resolved, ord_leq, ord_less,
                                 ord_nonzero)
from szm.syntax.terms import (Annot, App, Case, Cons, EpsTerm, Fix, Lam, OrdAbs, Proj, Record,
                              Term, TypeLet)
from szm.syntax.types import (Arrow, EpsIn, EpsNotIn, Exists, Forall, Join, Meet, Mu, Nu,
                              OExists, OForall, Prod, Sum, TDot, TSOApp, TUVar, TVar, Type)

logger = logging.getLogger(__name__)

UNSET, BOUND, RECORD, VARIANT = "unset", "bound", "record-upper", "variant-lower"


@dataclass(frozen=True)
class TypeUVarState:
    uid: int
    status: str = UNSET
    value: Optional[Type] = None
    fields: Tuple[Tuple[str, Type], ...] = ()
    pos: object = None


@dataclass(frozen=True)
class OrdUVarState:
    """
    Ordinal unification variable with the constraints lower <= O < upper.
    """
    uid: int
    lower: Optional[Ordinal] = None
    upper: Optional[Ordinal] = None
    value: Optional[Ordinal] = None


@dataclass(frozen=True)
class SecondOrderUVar:
    """
    Ordinal variable depending on arity ordinals, solved by a projection (1-based index) or
    by an imitation (a constant ordinal).
    """
    uid: int
    arity: int
    projection: Optional[int] = None
    constant: Optional[Ordinal] = None

    @property
    def solved(self) -> bool:
        return self.projection is not None or self.constant is not None


@dataclass(frozen=True)
class TypeSecondOrderUVar:
    """
    Type variable depending on arity ordinals, solved by a type over its parameters.
    """
    uid: int
    arity: int
    params: Tuple[OVar, ...] = ()
    body: Optional[Type] = None


# Hook used to check delayed constraints: (gamma, term, left, right) -> ProofTree.
SubtypeHook = Callable[[PosCtx, Term, Type, Type], object]


class UVarStore:
    def __init__(self) -> None:
        self.types: Dict[int, TypeUVarState] = {}
        self.ordinals: Dict[int, OrdUVarState] = {}
        self.second_order: Dict[int, SecondOrderUVar] = {}
        self.type_second_order: Dict[int, TypeSecondOrderUVar] = {}
        self.trail: List[Callable[[], None]] = []
        self.ids = itertools.count(1)
        self.witness_ids = itertools.count(1)
        self.subtype_hook: Optional[SubtypeHook] = None

    # Trail

    def _set(self, table: dict, uid: int, state) -> None:
        old = table.get(uid)

        def undo():
            if old is None:
                del table[uid]
            else:
                table[uid] = old

        self.trail.append(undo)
        table[uid] = state

    def record_undo(self, undo: Callable[[], None]) -> None:
        """
        Registers an action to run when the store is rolled back past this point.
        """
        self.trail.append(undo)

    def snapshot(self) -> int:
        return len(self.trail)

    def rollback(self, snapshot: int) -> None:
        assert 0 <= snapshot <= len(self.trail), (
            f"Stale snapshot {snapshot}: the trail only has {len(self.trail)} entries")
        while len(self.trail) > snapshot:
            self.trail.pop()()

    # Creation

    def new_type_uvar(self, pos=None) -> TUVar:
        uid = next(self.ids)
        self._set(self.types, uid, TypeUVarState(uid, pos=pos))
        return TUVar(uid)

    def new_ord_uvar(self, lower: Ordinal = None, upper: Ordinal = None) -> OUVar:
        uid = next(self.ids)
        self._set(self.ordinals, uid, OrdUVarState(uid, lower, upper))
        return OUVar(uid)

    def new_second_order(self, arity: int) -> int:
        uid = next(self.ids)
        self._set(self.second_order, uid, SecondOrderUVar(uid, arity))
        return uid

    def new_type_second_order(self, arity: int) -> int:
        uid = next(self.ids)
        self._set(self.type_second_order, uid, TypeSecondOrderUVar(uid, arity))
        return uid

    # Reading

    def type_state(self, uid: int) -> TypeUVarState:
        return self.types[uid]

    def ord_state(self, uid: int) -> OrdUVarState:
        return self.ordinals[uid]

    def head(self, a: Type) -> Type:
        """
        Looks through bound type variables and solved second-order applications until the
        head constructor of a is known.
        """
        while True:
            if isinstance(a, TUVar):
                state = self.types[a.uid]
                if state.status != BOUND:
                    return a
                a = state.value
            elif isinstance(a, TSOApp):
                so = self.type_second_order[a.uid]
                if so.body is None:
                    return a
                a = self.instantiate_second_order(so, a.args)
            else:
                return a

    def instantiate_second_order(self, so: TypeSecondOrderUVar, args: Sequence[Ordinal]) -> Type:
        mapping = dict(zip(so.params, args))
        return transform(so.body, ordinal_atom=lambda o: mapping.get(o, o))

    def resolve_ordinal(self, o: Ordinal) -> Ordinal:
        """
        Replaces the bound ordinal variables of o by their values, recursively.
        """
        def atom(a):
            if isinstance(a, OUVar):
                value = self.ordinals[a.uid].value
                return a if value is None else self.resolve_ordinal(value)
            return a

        if isinstance(o, SecondOrder):
            so = self.second_order[o.uid]
            args = tuple(self.resolve_ordinal(a) for a in o.args)
            if so.projection is not None:
                return args[so.projection - 1]
            if so.constant is not None:
                return self.resolve_ordinal(so.constant)
            return SecondOrder(o.uid, args)
        if isinstance(o, Succ):
            return Succ(self.resolve_ordinal(o.pred))
        return atom(o)

    def zonk(self, node, into_epsilon: bool = False):
        """
        Replaces every solved unification variable of a type or a term by its value.
        """
        def leaf(a):
            resolved = self.head(a)
            if resolved is a:
                return None
            return self.zonk(resolved, into_epsilon)

        return transform(node, type_leaf=leaf, ordinal_map=self.resolve_ordinal,
                         into_epsilon=into_epsilon)

    # Occurrences

    def polarity(self, uid: int, a: Type) -> set:
        """
        Polarities ("+", "-") of the occurrences of the type variable uid in a. Occurrences
        inside choice operators and inside embedded terms count as both.
        """
        found = set()
        self._polarity(uid, a, True, found, set())
        return found

    def _polarity(self, uid: int, a, positive: bool, found: set, seen: set) -> None:
        if a is None or len(found) == 2:
            return
        if isinstance(a, Term):
            if self._occurs_in_term(uid, a, seen):
                found.update(("+", "-"))
            return
        a = self.head(a)
        go = self._polarity
        if isinstance(a, TUVar):
            if a.uid == uid:
                found.add("+" if positive else "-")
        elif isinstance(a, Arrow):
            go(uid, a.domain, not positive, found, seen)
            go(uid, a.codomain, positive, found, seen)
        elif isinstance(a, Prod):
            for _, b in a.fields:
                go(uid, b, positive, found, seen)
        elif isinstance(a, Sum):
            for _, b in a.cases:
                go(uid, b, positive, found, seen)
        elif isinstance(a, (Forall, Exists, OForall, OExists, Mu, Nu)):
            go(uid, a.body, positive, found, seen)
        elif isinstance(a, (Meet, Join)):
            go(uid, a.type, positive, found, seen)
        elif isinstance(a, (EpsIn, EpsNotIn)):
            inner = set()
            go(uid, a.term, True, inner, seen)
            go(uid, a.body, True, inner, seen)
            if inner:
                found.update(("+", "-"))
        elif isinstance(a, TDot):
            go(uid, a.term, True, found, seen)

    def _occurs_in_term(self, uid: int, t: Term, seen: set) -> bool:
        if id(t) in seen:
            return False
        seen.add(id(t))
        types, terms = [], []
        if isinstance(t, EpsTerm):
            types, terms = [t.domain, t.codomain], [t.body]
        elif isinstance(t, Lam):
            types, terms = [t.domain], [t.body]
        elif isinstance(t, App):
            terms = [t.function, t.argument]
        elif isinstance(t, Record):
            terms = [u for _, u in t.fields]
        elif isinstance(t, (Proj, Annot)):
            terms = [t.term]
            if isinstance(t, Annot):
                types = [t.type]
        elif isinstance(t, Cons):
            terms = [t.argument]
        elif isinstance(t, Case):
            terms = [t.scrutinee] + [b.body for b in t.branches]
        elif isinstance(t, (Fix, OrdAbs)):
            terms = [t.body]
        elif isinstance(t, TypeLet):
            types, terms = [t.pattern], [t.subject, t.body]
        for a in types:
            found = set()
            self._polarity(uid, a, True, found, seen)
            if found:
                return True
        return any(self._occurs_in_term(uid, u, seen) for u in terms)

    # Type variables

    def bind_type_uvar(self, uid: int, a: Type, gamma: PosCtx = None, term: Term = None) -> list:
        """
        Binds a type unification variable after an occur check.

        Parameters
        ----------
        uid : int
            Variable to bind. It must be unset or constrained.
        a : Type
            Value. If the variable only occurs positively in it, the variable is bound to the
            inductive type muX.a[U := X] instead.
        gamma : PosCtx [Optional]
            Context used to check the delayed field constraints. By default it is empty.
        term : Term [Optional]
            Subject of the judgment that caused the binding, for error messages.

        Returns
        -------
        list
            The proofs of the delayed constraints checked after binding.
        """
        gamma = PosCtx() if gamma is None else gamma
        a = self.head(a)
        if isinstance(a, TUVar):
            return self.unify_uvars(uid, a.uid, gamma, term)
        state = self.types[uid]
        assert state.status != BOUND, f"Unification variable ?{uid} is already bound"
        polarity = self.polarity(uid, a)
        if "-" in polarity:
            raise OccursCheck(term, TUVar(uid), a, f"?{uid} occurs in its own definition")
        if polarity:
            a = self.zonk(a)
            name = f"X{uid}"
            body = transform(a, type_leaf=lambda b: TVar(name)
                             if isinstance(b, TUVar) and b.uid == uid else None)
            a = Mu(INF, name, body)
        logger.debug("Binding ?%d", uid)
        self._set(self.types, uid, replace(state, status=BOUND, value=a))
        return self._check_constraints(state, a, gamma, term)

    def _check_constraints(self, state: TypeUVarState, a: Type, gamma: PosCtx, term) -> list:
        if state.status not in (RECORD, VARIANT):
            return []
        assert self.subtype_hook is not None, "No subtyping procedure to check constraints"
        if state.status == RECORD:
            left, right = a, Prod(state.fields)
        else:
            left, right = Sum(state.fields), a
        try:
            return [self.subtype_hook(gamma, term, left, right)]
        except Clash as clash:
            raise ConstraintClash(term, left, right,
                                  f"delayed constraint of ?{state.uid}: {clash}") from clash

    def unify_uvars(self, u: int, v: int, gamma: PosCtx = None, term: Term = None) -> list:
        """
        Identifies two type unification variables, merging their delayed constraints.
        """
        gamma = PosCtx() if gamma is None else gamma
        if u == v:
            return []
        su, sv = self.types[u], self.types[v]
        proofs = []
        if su.status == UNSET:
            self._set(self.types, u, replace(su, status=BOUND, value=TUVar(v)))
        elif sv.status == UNSET:
            self._set(self.types, v, replace(sv, status=BOUND, value=TUVar(u)))
        elif su.status != sv.status:
            raise Clash(term, self.constraint_type(su), self.constraint_type(sv),
                        "record and variant constraints on one variable")
        else:
            for label, a in su.fields:
                proofs += self.constrain_field(v, su.status, label, a, gamma, term)
            self._set(self.types, u, replace(su, status=BOUND, value=TUVar(v), fields=()))
        return proofs

    @staticmethod
    def constraint_type(state: TypeUVarState) -> Type:
        if state.status == RECORD:
            return Prod(state.fields)
        if state.status == VARIANT:
            return Sum(state.fields)
        return TUVar(state.uid)

    def constrain_field(self,
                        uid: int,
                        kind: str,
                        label: str,
                        a: Type,
                        gamma: PosCtx = None,
                        term: Term = None) -> list:
        """
        Records a delayed constraint: U is below a record with the field label : a
        (record-upper) or above a variant with the case label of a (variant-lower). A label
        constrained twice keeps the tighter of the two bounds: the old one is compared with
        the new one first, and the store is rolled back before the other comparison is tried.
        """
        gamma = PosCtx() if gamma is None else gamma
        state = self.types[uid]
        assert state.status != BOUND, f"Unification variable ?{uid} is already bound"
        if state.status not in (UNSET, kind):
            other = Prod(((label, a), )) if kind == RECORD else Sum(((label, a), ))
            raise Clash(term, self.constraint_type(state), other,
                        "record and variant constraints on one variable")
        fields = dict(state.fields)
        proofs = []
        if label in fields:
            old = fields[label]
            # The smaller upper bound and the larger lower bound are kept.
            subject = Proj(term, label) if kind == RECORD else term
            smaller, larger = (old, a) if kind == RECORD else (a, old)
            snapshot = self.snapshot()
            try:
                proofs.append(self.subtype_hook(gamma, subject, smaller, larger))
            except Clash:
                self.rollback(snapshot)
                proofs.append(self.subtype_hook(gamma, subject, larger, smaller))
                fields[label] = a
        else:
            fields[label] = a
        self._set(self.types, uid, replace(state, status=kind, fields=tuple(fields.items())))
        return proofs

    def instantiate_constraints(self, uid: int) -> None:
        """
        Binds a constrained variable to the type described by its own constraints.
        """
        state = self.types[uid]
        if state.status in (RECORD, VARIANT):
            self._set(self.types, uid,
                      replace(state, status=BOUND, value=self.constraint_type(state)))

    # Ordinal variables

    def bind_ordinal(self, uid: int, o: Ordinal, gamma: PosCtx) -> bool:
        """
        Binds an ordinal variable if o satisfies its bounds. Returns False otherwise.
        """
        state = self.ordinals[uid]
        assert state.value is None, f"Ordinal variable ?o{uid} is already bound"
        o = self.resolve_ordinal(o)
        if o == OUVar(uid):
            return True
        if isinstance(o, OUVar):
            target = self.ordinals[o.uid]
            lower = target.lower if state.lower is None else state.lower
            upper = target.upper if state.upper is None else state.upper
            self._set(self.ordinals, o.uid, replace(target, lower=lower, upper=upper))
        elif is_resolved(o):
            if state.lower is not None and not self._holds(ord_leq, gamma, state.lower, o):
                return False
            if state.upper is not None and not self._holds(ord_less, gamma, o, state.upper):
                return False
        self._set(self.ordinals, uid, replace(state, value=o))
        return True

    def _holds(self, relation, gamma: PosCtx, o1: Ordinal, o2: Ordinal) -> bool:
        o1, o2 = self.resolve_ordinal(o1), self.resolve_ordinal(o2)
        if not (is_resolved(o1) and is_resolved(o2)):
            return True
        return relation(gamma, o1, o2)

    def resolve_ord_uvar(self,
                         uid: int,
                         gamma: PosCtx,
                         term: Term = None,
                         left: Type = None,
                         right: Type = None) -> Ordinal:
        """
        Commits an unset ordinal variable to a value compatible with its bounds.

        Parameters
        ----------
        uid : int
            Ordinal variable.
        gamma : PosCtx
            Positivity context. Its positive ordinals, then its witnesses, are tried first.
        term, left, right : optional
            Judgment reported when no solution exists.

        Returns
        -------
        Ordinal
            The value: the first ordinal of gamma within the bounds; otherwise the lower bound
            or a fresh successor when there is no upper bound; otherwise the lower bound if it
            is strictly below the upper one, a witness below a nonzero upper bound, or the
            predecessor of a successor upper bound.
        """
        state = self.ordinals[uid]
        assert state.value is None, f"Ordinal variable ?o{uid} is already bound"
        lower = None if state.lower is None else self.resolve_ordinal(state.lower)
        upper = None if state.upper is None else self.resolve_ordinal(state.upper)
        value = None
        for o in gamma.ordinals():
            if ((lower is None or self._holds(ord_leq, gamma, lower, o))
                    and (upper is None or self._holds(ord_less, gamma, o, upper))):
                value = o
                break
        if value is None:
            if upper is None:
                value = lower if lower is not None else Succ(self.new_ord_uvar())
            elif not is_resolved(upper):
                value = None
            elif lower is not None and self._holds(ord_less, gamma, lower, upper):
                value = lower
            elif lower is None and ord_nonzero(gamma, upper):
                value, _ = fresh_witness(gamma, upper, self.witness_ids)
            elif isinstance(upper, Succ) and (lower is None
                                              or self._holds(ord_leq, gamma, lower, upper.pred)):
                value = upper.pred
        if value is None:
            raise NoPositiveSolution(term, left, right, f"no solution for ?o{uid}")
        self._set(self.ordinals, uid, replace(state, value=value))
        logger.debug("Ordinal ?o%d resolved", uid)
        return value

    # Second-order variables

    def solve_second_order(self,
                           uid: int,
                           gamma: PosCtx,
                           args: Sequence[Ordinal],
                           target: Ordinal,
                           below: bool = True,
                           term: Term = None) -> Ordinal:
        """
        Solves the constraint V(args) <= target (or target <= V(args) when below is False),
        trying the projections in argument order and then an imitation by a constant.

        Returns
        -------
        Ordinal
            The value of V(args).
        """
        so = self.second_order[uid]
        assert not so.solved, f"Second-order variable ?o{uid} is already solved"
        target = self.resolve_ordinal(target)
        args = [self.resolve_ordinal(a) for a in args]

        def fits(o):
            if below:
                return self._holds(ord_leq, gamma, o, target)
            return self._holds(ord_leq, gamma, target, o)

        for k, arg in enumerate(args, start=1):
            if fits(arg):
                self._set(self.second_order, uid, replace(so, projection=k))
                return arg
        candidates = [target] if is_resolved(target) else []
        candidates.append(INF)
        for constant in candidates:
            if fits(constant):
                self._set(self.second_order, uid, replace(so, constant=constant))
                return constant
        raise Unsolvable(term, None, None, f"no projection or imitation for ?o{uid}")

    def solve_type_second_order(self,
                                uid: int,
                                args: Sequence[Ordinal],
                                a: Type,
                                term: Term = None) -> None:
        """
        Solves V(args) = a by abstracting, in a, the atomic arguments (first matching
        position first). Other ordinals of a are kept as constants.
        """
        so = self.type_second_order[uid]
        assert so.body is None, f"Second-order variable ?{uid} is already solved"
        a = self.zonk(a)
        occurs = []
        transform(a, type_leaf=lambda b: occurs.append(b)
                  if isinstance(b, TSOApp) and b.uid == uid else None)
        if occurs:
            raise OccursCheck(term, TSOApp(uid, tuple(args)), a,
                              f"?{uid} occurs in its own definition")
        params = ordinal_params(so.arity, f"?{uid}")
        mapping = {}
        for param, arg in zip(params, args):
            arg = self.resolve_ordinal(arg)
            if arg not in mapping and not isinstance(arg, Succ) and arg != INF:
                mapping[arg] = param
        body = transform(a, ordinal_atom=lambda o: mapping.get(o, o))
        self._set(self.type_second_order, uid, replace(so, params=params, body=body))

    def lift_to_second_order(self, uid: int, args: Sequence[Ordinal]) -> int:
        """
        Replaces an unset type variable by a fresh second-order variable V applied to args,
        returning V.
        """
        v = self.new_type_second_order(len(args))
        state = self.types[uid]
        self._set(self.types, uid, replace(state, status=BOUND, value=TSOApp(v, tuple(args))))
        return v

    def unset_type_uvars(self, a: Type) -> List[int]:
        """
        Unset or constrained type variables of a, in order of first occurrence.
        """
        found = []

        def leaf(b):
            if isinstance(b, TUVar) and b.uid not in found:
                found.append(b.uid)
            return None

        transform(self.zonk(a), type_leaf=leaf)
        return found

    def unset_ord_uvars(self, node) -> List[int]:
        found = []

        def atom(o):
            if isinstance(o, OUVar) and o.uid not in found:
                found.append(o.uid)
            return o

        transform(self.zonk(node), ordinal_atom=atom)
        return found

