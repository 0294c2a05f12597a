"""
File containing the pretty printer. Terms and types written by users are printed in the Unicode
surface syntax accepted by the parser; choice operators are shortened to the name they bind and
their position, witnesses are printed as κ_n and unification variables as ?n.
"""
from szm.syntax.ordinals import Inf, OUVar, OVar, OWitness, Ordinal, SecondOrder, Succ
from szm.syntax.operations import display_epsilon
from szm.syntax.terms import (Annot, App, Case, Cons, EpsTerm, Fix, Global, Lam, OrdAbs, Proj,
                              Record, Term, TypeLet, Var)
from szm.syntax.types import (Arrow, EpsIn, EpsNotIn, Exists, Forall, Join, Meet, Mu, Nu,
                              OExists, OForall, Prod, Sum, TDot, TSOApp, TUVar, TVar, Type)

# Precedence levels, shared by terms and types.
BINDER, APP, ATOM = 0, 1, 2


def show_ordinal(o: Ordinal) -> str:
    if isinstance(o, Inf):
        return "∞"
    if isinstance(o, Succ):
        return f"S({show_ordinal(o.pred)})"
    if isinstance(o, OVar):
        return o.name
    if isinstance(o, OWitness):
        return f"κ_{o.uid}"
    if isinstance(o, OUVar):
        return f"?o{o.uid}"
    if isinstance(o, SecondOrder):
        args = ", ".join(show_ordinal(a) for a in o.args)
        return f"?o{o.uid}({args})"
    return repr(o)


def _paren(text: str, needed: bool) -> str:
    return f"({text})" if needed else text


def _show_ords(ordinals) -> str:
    return ", ".join(show_ordinal(o) for o in ordinals)


def show_type(a: Type, level: int = BINDER) -> str:
    """
    Prints a type. The level is the precedence of the surrounding context: binders extend as
    far right as possible, arrows associate to the right.
    """
    if a is None:
        return "_"
    if isinstance(a, TVar):
        return a.name
    if isinstance(a, TUVar):
        return f"?{a.uid}"
    if isinstance(a, TSOApp):
        return f"?{a.uid}({_show_ords(a.args)})"
    if isinstance(a, TDot):
        return f"{show_term(a.term, ATOM)}.{a.name}"
    if isinstance(a, (EpsIn, EpsNotIn)):
        return display_epsilon(a)
    if isinstance(a, Prod):
        fields = "; ".join(f"{label} : {show_type(b)}" for label, b in a.fields)
        return "{" + fields + "}"
    if isinstance(a, Sum):
        cases = " | ".join(label if b == Prod(()) else f"{label} of {show_type(b)}"
                           for label, b in a.cases)
        return f"[{cases}]"
    if isinstance(a, Arrow):
        text = f"{show_type(a.domain, ATOM)} → {show_type(a.codomain, BINDER)}"
        return _paren(text, level > APP)
    if isinstance(a, (Meet, Join)):
        symbol = "∧" if isinstance(a, Meet) else "∨"
        text = f"{show_type(a.type, ATOM)} {symbol} {_show_ords(a.ordinals)}"
        return _paren(text, level > APP)
    if isinstance(a, (Forall, Exists, OForall, OExists)):
        symbol = "∀" if isinstance(a, (Forall, OForall)) else "∃"
        return _paren(f"{symbol}{a.name}.{show_type(a.body)}", level > BINDER)
    if isinstance(a, (Mu, Nu)):
        symbol = "μ" if isinstance(a, Mu) else "ν"
        if not isinstance(a.size, Inf):
            symbol += f"_{show_ordinal(a.size)} "
        return _paren(f"{symbol}{a.name}.{show_type(a.body)}", level > BINDER)
    return repr(a)


def show_term(t: Term, level: int = BINDER) -> str:
    """
    Prints a term. Choice operators are printed as name@position.
    """
    if t is None:
        return "_"
    if isinstance(t, (Var, Global)):
        return t.name
    if isinstance(t, EpsTerm):
        return display_epsilon(t)
    if isinstance(t, Record):
        fields = "; ".join(f"{label} = {show_term(u)}" for label, u in t.fields)
        return "{" + fields + "}"
    if isinstance(t, Proj):
        return f"{show_term(t.term, ATOM)}.{t.label}"
    if isinstance(t, Annot):
        return f"({show_term(t.term)} : {show_type(t.type)})"
    if isinstance(t, Cons):
        if t.argument == Record(()):
            return t.name
        return _paren(f"{t.name} {show_term(t.argument, ATOM)}", level > APP)
    if isinstance(t, App):
        text = f"{show_term(t.function, APP)} {show_term(t.argument, ATOM)}"
        return _paren(text, level > APP)
    if isinstance(t, Lam):
        binder = t.name if t.domain is None else f"({t.name} : {show_type(t.domain)})"
        return _paren(f"λ{binder}.{show_term(t.body)}", level > BINDER)
    if isinstance(t, Fix):
        return _paren(f"fix {t.name}.{show_term(t.body)}", level > BINDER)
    if isinstance(t, OrdAbs):
        return _paren(f"Λ{t.name}.{show_term(t.body)}", level > BINDER)
    if isinstance(t, Case):
        branches = []
        for b in t.branches:
            pattern = b.constructor if b.name == "_" else f"{b.constructor} {b.name}"
            branches.append(f"{pattern} → {show_term(b.body, APP)}")
        text = f"case {show_term(t.scrutinee)} of " + " | ".join(branches)
        return _paren(text, level > BINDER)
    if isinstance(t, TypeLet):
        text = (f"let {', '.join(t.names)} such that {show_term(t.subject, APP)} : "
                f"{show_type(t.pattern)} in {show_term(t.body)}")
        return _paren(text, level > BINDER)
    return repr(t)


def show_context(gamma) -> str:
    return _show_ords(gamma)


def show_judgment(judgment) -> str:
    """
    Prints a typing judgment γ ⊢ t : A or a local subtyping judgment γ ⊢ t : A ⊂ B.
    """
    from szm.syntax.judgments import LocalSub

    context = show_context(judgment.ctx)
    prefix = f"{context} ⊢ " if context else "⊢ "
    if isinstance(judgment, LocalSub):
        return (f"{prefix}{show_term(judgment.term)} : {show_type(judgment.left)} ⊂ "
                f"{show_type(judgment.right)}")
    return f"{prefix}{show_term(judgment.term)} : {show_type(judgment.type)}"
