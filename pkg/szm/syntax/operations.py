"""
File containing the traversals shared by every module: free names, capture-avoiding
substitution of terms, types and ordinals, canonical forms (used for alpha-equivalence and as
keys of induction hypotheses), term sizes and positions.
"""
from dataclasses import replace
from typing import Callable, Dict, FrozenSet, Iterable, Optional, Tuple

from szm.syntax.ordinals import (INF, Inf, OUVar, OVar, OWitness, Ordinal, SecondOrder, Succ,
                                 map_atoms)
from szm.syntax.terms import (Annot, App, Branch, Case, Cons, EpsTerm, Fix, Global, Lam,
                              OrdAbs, Proj, Record, SourcePos, Term, TypeLet, Var, eps_term)
from szm.syntax.types import (Arrow, EpsIn, EpsNotIn, Exists, Forall, Join, Meet, Mu, Nu,
                              OExists, OForall, Prod, Sum, TDot, TSOApp, TUVar, TVar, Type)

TERM, TYPE, ORD = "t", "T", "o"

Name = Tuple[str, str]

_EMPTY: FrozenSet[Name] = frozenset()

_free_cache: Dict[int, Tuple[object, FrozenSet[Name]]] = {}
_FREE_CACHE_LIMIT = 200000


def free_names(node) -> FrozenSet[Name]:
    """
    Returns the free names of a term, a type or an ordinal as pairs (sort, name) where the
    sort is TERM, TYPE or ORD.
    """
    if node is None:
        return _EMPTY
    cached = _free_cache.get(id(node))
    if cached is not None and cached[0] is node:
        return cached[1]
    result = _free_names(node)
    if len(_free_cache) > _FREE_CACHE_LIMIT:
        _free_cache.clear()
    _free_cache[id(node)] = (node, result)
    return result


def _union(*sets: Iterable[Name]) -> FrozenSet[Name]:
    result = _EMPTY
    for s in sets:
        if s:
            result = result | s
    return result


def _free_names(node) -> FrozenSet[Name]:
    fn = free_names
    if isinstance(node, Ordinal):
        if isinstance(node, OVar):
            return frozenset({(ORD, node.name)})
        if isinstance(node, Succ):
            return fn(node.pred)
        if isinstance(node, SecondOrder):
            return _union(*(fn(a) for a in node.args))
        return _EMPTY
    # Terms
    if isinstance(node, Var):
        return frozenset({(TERM, node.name)})
    if isinstance(node, (Global, EpsTerm)):
        if isinstance(node, EpsTerm):
            return _union(fn(node.domain), fn(node.body) - {(TERM, node.name)},
                          fn(node.codomain))
        return _EMPTY
    if isinstance(node, Lam):
        return _union(fn(node.domain), fn(node.body) - {(TERM, node.name)})
    if isinstance(node, App):
        return _union(fn(node.function), fn(node.argument))
    if isinstance(node, Record):
        return _union(*(fn(t) for _, t in node.fields))
    if isinstance(node, Proj):
        return fn(node.term)
    if isinstance(node, Cons):
        return fn(node.argument)
    if isinstance(node, Case):
        return _union(fn(node.scrutinee),
                      *(fn(b.body) - {(TERM, b.name)} for b in node.branches))
    if isinstance(node, Fix):
        return fn(node.body) - {(TERM, node.name)}
    if isinstance(node, Annot):
        return _union(fn(node.term), fn(node.type))
    if isinstance(node, OrdAbs):
        return fn(node.body) - {(ORD, node.name)}
    if isinstance(node, TypeLet):
        bound = {(TYPE, n) for n in node.names}
        return _union(fn(node.subject), fn(node.pattern) - bound, fn(node.body) - bound)
    # Types
    if isinstance(node, TVar):
        return frozenset({(TYPE, node.name)})
    if isinstance(node, Arrow):
        return _union(fn(node.domain), fn(node.codomain))
    if isinstance(node, Prod):
        return _union(*(fn(a) for _, a in node.fields))
    if isinstance(node, Sum):
        return _union(*(fn(a) for _, a in node.cases))
    if isinstance(node, (Forall, Exists)):
        return fn(node.body) - {(TYPE, node.name)}
    if isinstance(node, (OForall, OExists)):
        return fn(node.body) - {(ORD, node.name)}
    if isinstance(node, (Mu, Nu)):
        return _union(fn(node.size), fn(node.body) - {(TYPE, node.name)})
    if isinstance(node, (EpsIn, EpsNotIn)):
        return _union(fn(node.term), fn(node.body) - {(TYPE, node.name)})
    if isinstance(node, (Meet, Join)):
        return _union(fn(node.type), *(fn(o) for o in node.ordinals))
    if isinstance(node, TSOApp):
        return _union(*(fn(o) for o in node.args))
    if isinstance(node, TDot):
        return fn(node.term)
    if isinstance(node, TUVar):
        return _EMPTY
    raise TypeError(f"Unexpected syntax node {node!r}")


def fresh_name(base: str, avoid) -> str:
    """
    Returns base decorated with primes so that it does not belong to avoid.
    """
    name = base
    while name in avoid:
        name += "'"
    return name


class _Substitution:
    """
    Simultaneous capture-avoiding substitution of terms, types and ordinals for names.
    """

    def __init__(self, mapping: Dict[Name, object]) -> None:
        self.mapping = mapping
        self.range_names = _union(*(free_names(v) for v in mapping.values()))

    def _enter(self, sort: str, name: str, *bodies) -> Tuple[str, "_Substitution"]:
        """
        Returns the (possibly renamed) binder and the substitution to apply under it.
        """
        mapping = dict(self.mapping)
        mapping.pop((sort, name), None)
        if (sort, name) in self.range_names:
            avoid = {n for s, n in self.range_names if s == sort}
            for body in bodies:
                avoid |= {n for s, n in free_names(body) if s == sort}
            new = fresh_name(name, avoid)
            mapping[(sort, name)] = {TERM: Var, TYPE: TVar, ORD: OVar}[sort](new)
            return new, _Substitution(mapping)
        if len(mapping) == len(self.mapping):
            return name, self
        return name, _Substitution(mapping)

    def _relevant(self, node) -> bool:
        free = free_names(node)
        return any(key in free for key in self.mapping)

    def apply(self, node):
        if node is None or not self.mapping or not self._relevant(node):
            return node
        if isinstance(node, Ordinal):
            return map_atoms(node, self._ordinal_atom)
        if isinstance(node, Term):
            return self._term(node)
        return self._type(node)

    def _ordinal_atom(self, o: Ordinal) -> Ordinal:
        if isinstance(o, OVar):
            return self.mapping.get((ORD, o.name), o)
        return o

    def _term(self, t: Term) -> Term:
        ap = self.apply
        if isinstance(t, Var):
            return self.mapping.get((TERM, t.name), t)
        if isinstance(t, Lam):
            name, inner = self._enter(TERM, t.name, t.body)
            return Lam(name, inner.apply(t.body), ap(t.domain), t.pos)
        if isinstance(t, App):
            return App(ap(t.function), ap(t.argument), t.pos)
        if isinstance(t, Record):
            return Record(tuple((label, ap(u)) for label, u in t.fields), t.pos)
        if isinstance(t, Proj):
            return Proj(ap(t.term), t.label, t.pos)
        if isinstance(t, Cons):
            return Cons(t.name, ap(t.argument), t.pos)
        if isinstance(t, Case):
            branches = []
            for b in t.branches:
                name, inner = self._enter(TERM, b.name, b.body)
                branches.append(Branch(b.constructor, name, inner.apply(b.body)))
            return Case(ap(t.scrutinee), tuple(branches), t.pos)
        if isinstance(t, Fix):
            name, inner = self._enter(TERM, t.name, t.body)
            return Fix(name, inner.apply(t.body), t.pos)
        if isinstance(t, Annot):
            return Annot(ap(t.term), ap(t.type), t.pos)
        if isinstance(t, OrdAbs):
            name, inner = self._enter(ORD, t.name, t.body)
            return OrdAbs(name, inner.apply(t.body), t.pos)
        if isinstance(t, TypeLet):
            names, inner = [], self
            for n in t.names:
                n, inner = inner._enter(TYPE, n, t.pattern, t.body)
                names.append(n)
            return TypeLet(tuple(names), ap(t.subject), inner.apply(t.pattern),
                           inner.apply(t.body), t.pos)
        if isinstance(t, EpsTerm):
            # A new choice operator is built: the old one keeps denoting its own witness.
            name, inner = self._enter(TERM, t.name, t.body)
            return eps_term(name, ap(t.domain), inner.apply(t.body), ap(t.codomain), t.pos)
        raise TypeError(f"Unexpected term {t!r}")

    def _type(self, a: Type) -> Type:
        ap = self.apply
        if isinstance(a, TVar):
            return self.mapping.get((TYPE, a.name), a)
        if isinstance(a, Arrow):
            return Arrow(ap(a.domain), ap(a.codomain), a.pos)
        if isinstance(a, Prod):
            return Prod(tuple((label, ap(b)) for label, b in a.fields), a.pos)
        if isinstance(a, Sum):
            return Sum(tuple((label, ap(b)) for label, b in a.cases), a.pos)
        if isinstance(a, (Forall, Exists)):
            name, inner = self._enter(TYPE, a.name, a.body)
            return type(a)(name, inner.apply(a.body), a.pos)
        if isinstance(a, (OForall, OExists)):
            name, inner = self._enter(ORD, a.name, a.body)
            return type(a)(name, inner.apply(a.body), a.pos)
        if isinstance(a, (Mu, Nu)):
            name, inner = self._enter(TYPE, a.name, a.body)
            return type(a)(ap(a.size), name, inner.apply(a.body), a.pos)
        if isinstance(a, (EpsIn, EpsNotIn)):
            name, inner = self._enter(TYPE, a.name, a.body)
            return type(a)(name, ap(a.term), inner.apply(a.body), a.pos)
        if isinstance(a, (Meet, Join)):
            return type(a)(ap(a.type), tuple(ap(o) for o in a.ordinals), a.pos)
        if isinstance(a, TSOApp):
            return TSOApp(a.uid, tuple(ap(o) for o in a.args), a.pos)
        if isinstance(a, TDot):
            return TDot(ap(a.term), a.name, a.pos)
        return a


def substitute(t: Term, x: str, u: Term) -> Term:
    """
    Capture-avoiding substitution t[x := u]. It descends into choice operators and into the
    terms embedded in types. The same object is returned when x is not free in t.
    """
    return _Substitution({(TERM, x): u}).apply(t)


def subst_type(a, name: str, b: Type):
    """
    Capture-avoiding substitution of the type b for the type variable name, in a type or a
    term.
    """
    return _Substitution({(TYPE, name): b}).apply(a)


def subst_types(node, mapping: Dict[str, Type]):
    return _Substitution({(TYPE, n): b for n, b in mapping.items()}).apply(node)


def subst_ordinal(node, name: str, o: Ordinal):
    """
    Substitutes the ordinal o for the ordinal variable name in a type or a term.
    """
    return _Substitution({(ORD, name): o}).apply(node)


def instantiate(node, types: Dict[str, Type], ordinals: Dict[str, Ordinal]):
    """
    Simultaneous substitution of types and ordinals for the parameters of an abbreviation.
    """
    mapping = {(TYPE, n): b for n, b in types.items()}
    mapping.update({(ORD, n): o for n, o in ordinals.items()})
    return _Substitution(mapping).apply(node)


def _identical(a, b) -> bool:
    if a is b:
        return True
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(_identical(x, y) for x, y in zip(a, b))
    if isinstance(a, Branch) and isinstance(b, Branch):
        return a.constructor == b.constructor and a.name == b.name and a.body is b.body
    if isinstance(a, (str, int, Ordinal)) and type(a) is type(b):
        return a == b
    return False


def _unchanged(old, new) -> bool:
    """
    Tells whether new was rebuilt from the very same children as old.
    """
    if type(old) is not type(new) or not hasattr(old, "__dataclass_fields__"):
        return False
    return all(_identical(getattr(old, f), getattr(new, f)) for f in old.__dataclass_fields__)


def transform(node,
              type_leaf: Callable[[Type], Optional[Type]] = None,
              ordinal_atom: Callable[[Ordinal], Ordinal] = None,
              into_epsilon: bool = False,
              ordinal_map: Callable[[Ordinal], Ordinal] = None):
    """
    Rebuilds a type or a term bottom-up, replacing unification variables through type_leaf
    and atomic ordinals through ordinal_atom. The replacements must not contain names bound
    in node, which holds for unification variables, witnesses and generalisation parameters.

    Parameters
    ----------
    node : Type or Term or Ordinal
        Node to rebuild.
    type_leaf : Callable [Optional]
        Applied to TUVar and TSOApp nodes (after their arguments are rebuilt). It returns the
        replacement or None to keep the node. By default it is None.
    ordinal_atom : Callable [Optional]
        Applied to every atomic ordinal. By default it is None.
    into_epsilon : bool
        Whether the types embedded in choice-operator terms are rebuilt too. Choice operators
        keep their identifiers. By default it is False.
    ordinal_map : Callable [Optional]
        Applied to every whole ordinal before ordinal_atom. By default it is None.

    Returns
    -------
    Type or Term or Ordinal
        The rebuilt node, the same object when nothing changed.
    """
    memo: Dict[int, object] = {}

    def ordinal(o):
        if ordinal_map is not None:
            o = ordinal_map(o)
        if ordinal_atom is None:
            return o
        return map_atoms(o, ordinal_atom)

    def go(n):
        if n is None:
            return None
        key = id(n)
        if key in memo:
            return memo[key]
        result = visit(n)
        if result is not n and _unchanged(n, result):
            result = n
        memo[key] = result
        return result

    def visit(n):
        if isinstance(n, Ordinal):
            return ordinal(n)
        if isinstance(n, (TUVar, TSOApp)):
            if isinstance(n, TSOApp):
                n = TSOApp(n.uid, tuple(ordinal(o) for o in n.args), n.pos)
            if type_leaf is not None:
                replaced = type_leaf(n)
                if replaced is not None:
                    return replaced
            return n
        if isinstance(n, (TVar, Var, Global)):
            return n
        if isinstance(n, EpsTerm):
            if not into_epsilon:
                return n
            domain, codomain = go(n.domain), go(n.codomain)
            if domain is n.domain and codomain is n.codomain:
                return n
            return replace(n, domain=domain, codomain=codomain)
        if isinstance(n, (Mu, Nu)):
            return type(n)(ordinal(n.size), n.name, go(n.body), n.pos)
        if isinstance(n, (Meet, Join)):
            return type(n)(go(n.type), tuple(ordinal(o) for o in n.ordinals), n.pos)
        if isinstance(n, Prod):
            return Prod(tuple((label, go(b)) for label, b in n.fields), n.pos)
        if isinstance(n, Sum):
            return Sum(tuple((label, go(b)) for label, b in n.cases), n.pos)
        if isinstance(n, Record):
            return Record(tuple((label, go(u)) for label, u in n.fields), n.pos)
        if isinstance(n, Case):
            return Case(go(n.scrutinee),
                        tuple(Branch(b.constructor, b.name, go(b.body)) for b in n.branches),
                        n.pos)
        if isinstance(n, Arrow):
            return Arrow(go(n.domain), go(n.codomain), n.pos)
        if isinstance(n, (Forall, Exists, OForall, OExists)):
            return type(n)(n.name, go(n.body), n.pos)
        if isinstance(n, (EpsIn, EpsNotIn)):
            return type(n)(n.name, go(n.term), go(n.body), n.pos)
        if isinstance(n, TDot):
            return TDot(go(n.term), n.name, n.pos)
        if isinstance(n, Lam):
            return Lam(n.name, go(n.body), go(n.domain), n.pos)
        if isinstance(n, App):
            return App(go(n.function), go(n.argument), n.pos)
        if isinstance(n, Proj):
            return Proj(go(n.term), n.label, n.pos)
        if isinstance(n, Cons):
            return Cons(n.name, go(n.argument), n.pos)
        if isinstance(n, Fix):
            return Fix(n.name, go(n.body), n.pos)
        if isinstance(n, Annot):
            return Annot(go(n.term), go(n.type), n.pos)
        if isinstance(n, OrdAbs):
            return OrdAbs(n.name, go(n.body), n.pos)
        if isinstance(n, TypeLet):
            return TypeLet(n.names, go(n.subject), go(n.pattern), go(n.body), n.pos)
        raise TypeError(f"Unexpected syntax node {n!r}")

    return go(node)


def map_ordinals(node, f: Callable[[Ordinal], Ordinal]):
    """
    Applies f to every atomic ordinal of a type or a term.
    """
    return transform(node, ordinal_atom=f)


def ordinals_of(node, into_epsilon: bool = False) -> Iterable[Ordinal]:
    """
    Yields the atomic ordinals of a type or a term, in order of occurrence, with repetitions.
    """
    found = []

    def collect(o):
        found.append(o)
        return o

    transform(node, ordinal_atom=collect, into_epsilon=into_epsilon)
    return found


class _Canon:
    """
    Computes canonical forms: nested tuples with de Bruijn indices, record and variant labels
    sorted, choice-operator terms encoded by identifier.
    """

    def __init__(self, holes: Dict[Ordinal, int] = None, store=None) -> None:
        self.holes = holes
        self.store = store

    def ordinal(self, o: Ordinal, ords: Tuple[str, ...]):
        if self.store is not None:
            o = self.store.resolve_ordinal(o)
        if self.holes is not None and o in self.holes:
            return ("hole", self.holes[o])
        if isinstance(o, Inf):
            return ("inf", )
        if isinstance(o, Succ):
            return ("S", self.ordinal(o.pred, ords))
        if isinstance(o, OVar):
            if o.name in ords:
                return ("obv", len(ords) - 1 - ords[::-1].index(o.name))
            return ("ovar", o.name)
        if isinstance(o, OWitness):
            return ("w", o.uid)
        if isinstance(o, OUVar):
            return ("ouvar", o.uid)
        return ("so", o.uid, tuple(self.ordinal(a, ords) for a in o.args))

    def term(self, t: Term, env):
        terms, types, ords = env
        if isinstance(t, Var):
            if t.name in terms:
                return ("bv", len(terms) - 1 - terms[::-1].index(t.name))
            return ("fv", t.name)
        if isinstance(t, EpsTerm):
            return ("eps", t.uid)
        if isinstance(t, Global):
            return ("global", t.name)
        if isinstance(t, Lam):
            dom = None if t.domain is None else self.type(t.domain, env)
            return ("lam", dom, self.term(t.body, (terms + (t.name, ), types, ords)))
        if isinstance(t, App):
            return ("app", self.term(t.function, env), self.term(t.argument, env))
        if isinstance(t, Record):
            return ("rec", tuple(sorted((label, self.term(u, env)) for label, u in t.fields)))
        if isinstance(t, Proj):
            return ("proj", self.term(t.term, env), t.label)
        if isinstance(t, Cons):
            return ("cons", t.name, self.term(t.argument, env))
        if isinstance(t, Case):
            branches = sorted(
                (b.constructor, self.term(b.body, (terms + (b.name, ), types, ords)))
                for b in t.branches)
            return ("case", self.term(t.scrutinee, env), tuple(branches))
        if isinstance(t, Fix):
            return ("fix", self.term(t.body, (terms + (t.name, ), types, ords)))
        if isinstance(t, Annot):
            return ("annot", self.term(t.term, env), self.type(t.type, env))
        if isinstance(t, OrdAbs):
            return ("olam", self.term(t.body, (terms, types, ords + (t.name, ))))
        if isinstance(t, TypeLet):
            inner = (terms, types + tuple(t.names), ords)
            return ("tlet", len(t.names), self.term(t.subject, env), self.type(t.pattern, inner),
                    self.term(t.body, inner))
        raise TypeError(f"Unexpected term {t!r}")

    def type(self, a: Type, env):
        terms, types, ords = env
        if self.store is not None:
            a = self.store.head(a)
        if isinstance(a, TVar):
            if a.name in types:
                return ("tbv", len(types) - 1 - types[::-1].index(a.name))
            return ("tfv", a.name)
        if isinstance(a, Arrow):
            return ("->", self.type(a.domain, env), self.type(a.codomain, env))
        if isinstance(a, Prod):
            return ("prod", tuple(sorted((label, self.type(b, env)) for label, b in a.fields)))
        if isinstance(a, Sum):
            return ("sum", tuple(sorted((label, self.type(b, env)) for label, b in a.cases)))
        inner = (terms, types + (getattr(a, "name", None), ), ords)
        if isinstance(a, Forall):
            return ("forall", self.type(a.body, inner))
        if isinstance(a, Exists):
            return ("exists", self.type(a.body, inner))
        if isinstance(a, (OForall, OExists)):
            tag = "oforall" if isinstance(a, OForall) else "oexists"
            return (tag, self.type(a.body, (terms, types, ords + (a.name, ))))
        if isinstance(a, (Mu, Nu)):
            tag = "mu" if isinstance(a, Mu) else "nu"
            return (tag, self.ordinal(a.size, ords), self.type(a.body, inner))
        if isinstance(a, (EpsIn, EpsNotIn)):
            tag = "in" if isinstance(a, EpsIn) else "notin"
            return (tag, self.term(a.term, env), self.type(a.body, inner))
        if isinstance(a, (Meet, Join)):
            tag = "meet" if isinstance(a, Meet) else "join"
            return (tag, self.type(a.type, env), tuple(self.ordinal(o, ords) for o in a.ordinals))
        if isinstance(a, TUVar):
            return ("uvar", a.uid)
        if isinstance(a, TSOApp):
            return ("soapp", a.uid, tuple(self.ordinal(o, ords) for o in a.args))
        if isinstance(a, TDot):
            return ("dot", self.term(a.term, env), a.name)
        raise TypeError(f"Unexpected type {a!r}")


def canonical(node, holes: Dict[Ordinal, int] = None, store=None):
    """
    Computes the canonical form of a term, a type or an ordinal.

    Parameters
    ----------
    node : Term or Type or Ordinal
        Node to canonicalise.
    holes : dict [Optional]
        Atomic ordinals to encode as numbered holes. By default it is None.
    store : UVarStore [Optional]
        Store used to look through bound unification variables. By default it is None.

    Returns
    -------
    tuple
        A hashable value; two nodes are alpha-equivalent iff their canonical forms are equal.
    """
    canon = _Canon(holes, store)
    env = ((), (), ())
    if isinstance(node, Ordinal):
        return canon.ordinal(node, ())
    if isinstance(node, Term):
        return canon.term(node, env)
    return canon.type(node, env)


def alpha_equal(a, b) -> bool:
    """
    Tells whether two terms or two types are equal up to renaming of bound names. Labels of
    records, variants and case analyses are compared as sets.
    """
    return canonical(a) == canonical(b)


def term_size(t: Term) -> int:
    """
    Number of term constructors of t, where choice operators and references to top-level
    definitions count zero. Types are not counted.
    """
    if isinstance(t, (EpsTerm, Global)):
        return 0
    if isinstance(t, Var):
        return 1
    if isinstance(t, (Lam, Fix, OrdAbs)):
        return 1 + term_size(t.body)
    if isinstance(t, App):
        return 1 + term_size(t.function) + term_size(t.argument)
    if isinstance(t, Record):
        return 1 + sum(term_size(u) for _, u in t.fields)
    if isinstance(t, (Proj, Annot)):
        return 1 + term_size(t.term)
    if isinstance(t, Cons):
        return 1 + term_size(t.argument)
    if isinstance(t, Case):
        return 1 + term_size(t.scrutinee) + sum(term_size(b.body) for b in t.branches)
    if isinstance(t, TypeLet):
        return 1 + term_size(t.subject) + term_size(t.body)
    raise TypeError(f"Unexpected term {t!r}")


def position_of(node) -> Optional[SourcePos]:
    """
    Source position of a node, or None for nodes built by the checker.
    """
    return getattr(node, "pos", None)


def display_epsilon(e) -> str:
    """
    Short form of a choice operator: the name it binds and its position.
    """
    pos = position_of(e)
    if pos is None:
        return "<internal>"
    return f"{e.name}@{pos}"


def ordinal_params(count: int, tag: str = "") -> Tuple[OVar, ...]:
    """
    Ordinal variables used as parameters of general abstract sequents and of second-order
    solutions. The tag keeps the parameters of different owners apart.
    """
    return tuple(OVar(f"θ{tag}_{i}") for i in range(1, count + 1))


__all__ = [
    "TERM", "TYPE", "ORD", "INF", "free_names", "fresh_name", "substitute", "subst_type",
    "subst_types", "subst_ordinal", "instantiate", "transform", "map_ordinals", "ordinals_of",
    "canonical", "alpha_equal", "term_size", "position_of", "display_epsilon", "ordinal_params"
]
