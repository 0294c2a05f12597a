"""
File containing the local subtyping engine. A judgment γ ⊢ t : A ⊂ B states that if t has type
A then it also has type B. Rules are tried in a fixed order: positivity connectives, unification
variables, sized comparison, generalisation, right quantifiers, left quantifiers and finally the
structural rules (arrow, product, sum, and the unfolding of inductive and coinductive types).
"""
import logging

from szm.engine.hypotheses import SUBTYPING, abstract_sequent, register, try_hypotheses
from szm.engine.uvars import RECORD, UNSET, VARIANT
from szm.errors import Clash, NoPositiveSolution, Unsolvable
from szm.syntax.judgments import HypothesisLink, LocalSub, ProofTree, leaf
from szm.syntax.operations import canonical, subst_ordinal, subst_type
from szm.syntax.ordinals import (INF, Inf, OUVar, PosCtx, SecondOrder, Succ, is_resolved, ord_leq,
                                 ord_nonzero)
from szm.syntax.terms import App, Branch, Case, Proj, Term, Var, eps_term
from szm.syntax.types import (Arrow, EpsIn, EpsNotIn, Exists, Forall, Join, Meet, Mu, Nu, OExists,
                              OForall, Prod, Sum, TSOApp, TUVar, Type)

logger = logging.getLogger(__name__)


def subtype(session, gamma: PosCtx, t: Term, a: Type, b: Type) -> ProofTree:
    """
    Proves the local subtyping judgment γ ⊢ t : A ⊂ B.

    Parameters
    ----------
    session : Session
        Checking session (unification store, hypothesis registry, call graph and budget).
    gamma : PosCtx
        Positivity context.
    t : Term
        Closed subject of the judgment.
    a : Type
        Type the subject is known to have.
    b : Type
        Type the subject is used with.

    Returns
    -------
    ProofTree
        Derivation of the judgment.

    Raises
    ------
    Clash
        When no rule applies.
    BudgetExhausted
        When the step budget of the session is spent.
    """
    return _subtype(session, gamma, t, a, b)


def subsume(session, gamma: PosCtx, t: Term, a: Type, b: Type) -> ProofTree:
    """
    Same as subtype, but the positivity of a sized type on either side is made explicit first:
    an inductive left-hand side of size κ is checked against B ∨ κ, and a coinductive
    right-hand side of size κ against A ∧ κ, so that the size is assumed nonzero when it is
    unfolded.
    """
    a, b = _wrap(session, gamma, a, b)
    return _subtype(session, gamma, t, a, b)


def generalise_sub(session, gamma: PosCtx, t: Term, a: Type, b: Type,
                   judgment: LocalSub = None) -> ProofTree:
    """
    Generalisation step of subtyping. The judgment is abstracted into a general abstract
    sequent; if a registered hypothesis matches it (keeping the call graph well-founded) the
    branch is closed by an H node. Otherwise the sequent is registered and proved generically
    under an I node.

    The generic subject is a choice operator, unless the types mention the subject itself
    (through a choice over it). The subject is then kept and becomes part of the key.

    A hypothesis with the same key already stands for the judgment: when all its uses are
    rejected by the size-change check, the judgment fails instead of registering a copy.
    """
    judgment = LocalSub(gamma, t, a, b) if judgment is None else judgment
    generalised = abstract_sequent(session, SUBTYPING, gamma, (a, b))
    keep_subject = _mentions(session, t, a, b)
    if keep_subject:
        key = generalised.key
        generalised.key = key[:2] + (canonical(t, store=session.store), ) + key[3:]
    rejected = len(session.rejections)
    hit = try_hypotheses(session, generalised, gamma)
    if hit is not None:
        hypothesis, matrix = hit
        return leaf(f"H_{hypothesis.uid}", judgment, HypothesisLink(hypothesis.uid, matrix))
    if len(session.rejections) > rejected:
        hypothesis, _ = session.rejections[-1]
        raise Clash(t, a, b, f"no well-founded use of hypothesis {hypothesis.uid}")

    ga, gb = generalised.types
    generic_gamma = generalised.generic_context()
    subject = t if keep_subject else eps_term("x", ga, Var("x"), gb)
    generic = LocalSub(generic_gamma, subject, ga, gb)
    hypothesis = register(session, generalised, gamma, generic)
    outer = session.frame
    session.frame = hypothesis
    try:
        proof = _subtype(session, generic_gamma, subject, ga, gb, root=True)
    finally:
        session.frame = outer
    return ProofTree(hypothesis.label, judgment, [proof], HypothesisLink(hypothesis.uid))


def _contains(form, part) -> bool:
    if form == part:
        return True
    return isinstance(form, tuple) and any(_contains(f, part) for f in form)


def _mentions(session, t: Term, a: Type, b: Type) -> bool:
    """
    Tells whether the closed term t occurs in the types a or b, after zonking.
    """
    store = session.store
    part = canonical(t, store=store)
    return any(_contains(canonical(store.zonk(c), store=store), part) for c in (a, b))


def _sized_key(session, a: Type):
    return canonical(type(a)(INF, a.name, a.body), store=session.store)


def _same_family(session, a: Type, b: Type) -> bool:
    """
    Tells whether a and b are the same inductive (or coinductive) type up to their sizes.
    """
    if not (type(a) is type(b) and isinstance(a, (Mu, Nu))):
        return False
    return _sized_key(session, a) == _sized_key(session, b)


def _nonzero(session, gamma: PosCtx, o) -> bool:
    o = session.resolve_ordinal(o)
    return is_resolved(o) and ord_nonzero(gamma, o)


def _wrap(session, gamma: PosCtx, a: Type, b: Type):
    ha, hb = session.head(a), session.head(b)
    if isinstance(ha, Mu) and not isinstance(hb, (TUVar, Join)):
        size = session.resolve_ordinal(ha.size)
        if (is_resolved(size) and not ord_nonzero(gamma, size)
                and not _same_family(session, ha, hb)):
            b = Join(b, (size, ), b.pos)
    if isinstance(hb, Nu) and not isinstance(ha, (TUVar, Meet)):
        size = session.resolve_ordinal(hb.size)
        if (is_resolved(size) and not ord_nonzero(gamma, size)
                and not _same_family(session, ha, hb)):
            a = Meet(a, (size, ), a.pos)
    return a, b


def _unfold(a: Type, size) -> Type:
    return subst_type(a.body, a.name, type(a)(size, a.name, a.body, a.pos))


def _resolved_ordinals(session, ordinals):
    return [o for o in map(session.resolve_ordinal, ordinals) if is_resolved(o)]


def _subtype(session, gamma: PosCtx, t: Term, a: Type, b: Type, root: bool = False) -> ProofTree:
    judgment = LocalSub(gamma, t, a, b)
    session.tick(judgment)
    a, b = session.head(a), session.head(b)
    store = session.store
    if a is b or canonical(a, store=store) == canonical(b, store=store):
        return leaf("=", judgment)

    proof = _positivity_rule(session, gamma, t, a, b, judgment)
    if proof is not None:
        return proof

    if isinstance(a, (TUVar, TSOApp)) or isinstance(b, (TUVar, TSOApp)):
        proof = _uvar_rule(session, gamma, t, a, b, judgment)
        if proof is not None:
            return proof

    if _same_family(session, a, b):
        lower, upper = (a.size, b.size) if isinstance(a, Mu) else (b.size, a.size)
        if _ord_constraint(session, gamma, lower, upper, t):
            return leaf("≤", judgment)

    sized = isinstance(a, (Mu, Nu)) or isinstance(b, (Mu, Nu))
    if sized and not root and not _has_unset_type_uvars(session, a, b):
        return generalise_sub(session, gamma, t, a, b, judgment)

    proof = _right_quantifier_rule(session, gamma, t, a, b, judgment)
    if proof is None:
        proof = _left_quantifier_rule(session, gamma, t, a, b, judgment)
    if proof is None:
        proof = _structural_rule(session, gamma, t, a, b, judgment)
    return proof


def _has_unset_type_uvars(session, a: Type, b: Type) -> bool:
    store = session.store
    uids = store.unset_type_uvars(a) + store.unset_type_uvars(b)
    return any(store.type_state(uid).status == UNSET for uid in uids)


def _positivity_rule(session, gamma, t, a, b, judgment):
    if isinstance(b, Join):
        inner_gamma = gamma.assume(*_resolved_ordinals(session, b.ordinals))
        inner = session.head(b.type)
        if (isinstance(a, Mu) and _nonzero(session, inner_gamma, a.size)
                and not _same_family(session, a, inner)):
            w, unfold_gamma = session.fresh_witness(inner_gamma, session.resolve_ordinal(a.size))
            unfolded = _unfold(a, w)
            premise = _subtype(session, unfold_gamma, t, unfolded, b.type)
            join = ProofTree("∨_r", LocalSub(unfold_gamma, t, unfolded, b), [premise])
            return ProofTree("μ_l", judgment, [join])
        return ProofTree("∨_r", judgment, [_subtype(session, inner_gamma, t, a, b.type)])
    if isinstance(a, Meet):
        inner_gamma = gamma.assume(*_resolved_ordinals(session, a.ordinals))
        inner = session.head(a.type)
        if (isinstance(b, Nu) and _nonzero(session, inner_gamma, b.size)
                and not _same_family(session, inner, b)):
            w, unfold_gamma = session.fresh_witness(inner_gamma, session.resolve_ordinal(b.size))
            unfolded = _unfold(b, w)
            premise = _subtype(session, unfold_gamma, t, a.type, unfolded)
            meet = ProofTree("∧_l", LocalSub(unfold_gamma, t, a, unfolded), [premise])
            return ProofTree("ν_r", judgment, [meet])
        return ProofTree("∧_l", judgment, [_subtype(session, inner_gamma, t, a.type, b)])
    if isinstance(a, Join):
        if all(_nonzero(session, gamma, o) for o in a.ordinals):
            return ProofTree("∨_l", judgment, [_subtype(session, gamma, t, a.type, b)])
        raise Clash(t, a, b, "the positivity of the left-hand side is not established")
    if isinstance(b, Meet):
        if all(_nonzero(session, gamma, o) for o in b.ordinals):
            return ProofTree("∧_r", judgment, [_subtype(session, gamma, t, a, b.type)])
        raise Clash(t, a, b, "the positivity of the right-hand side is not established")
    return None


def _uvar_rule(session, gamma, t, a, b, judgment):
    store = session.store
    if isinstance(a, TUVar) and isinstance(b, TUVar):
        return ProofTree("=", judgment, store.unify_uvars(a.uid, b.uid, gamma, t))
    if isinstance(a, TUVar) and isinstance(b, Prod):
        proofs = _constrain_all(store, a.uid, RECORD, b.fields, gamma, t)
        return ProofTree("⊂", judgment, proofs)
    if isinstance(b, TUVar) and isinstance(a, Sum):
        proofs = _constrain_all(store, b.uid, VARIANT, a.cases, gamma, t)
        return ProofTree("⊂", judgment, proofs)
    if isinstance(a, TUVar):
        return ProofTree("=", judgment, store.bind_type_uvar(a.uid, b, gamma, t))
    if isinstance(b, TUVar):
        return ProofTree("=", judgment, store.bind_type_uvar(b.uid, a, gamma, t))
    if isinstance(a, TSOApp):
        store.solve_type_second_order(a.uid, a.args, b, t)
        return _subtype(session, gamma, t, a, b)
    if isinstance(b, TSOApp):
        store.solve_type_second_order(b.uid, b.args, a, t)
        return _subtype(session, gamma, t, a, b)
    return None


def _constrain_all(store, uid: int, kind: str, fields, gamma: PosCtx, t: Term) -> list:
    """
    Adds one field constraint per label. If one of them clashes, the constraints already added
    are rolled back with it.
    """
    snapshot = store.snapshot()
    proofs = []
    try:
        for label, c in fields:
            proofs += store.constrain_field(uid, kind, label, c, gamma, t)
    except Clash:
        store.rollback(snapshot)
        raise
    return proofs


def _ord_constraint(session, gamma: PosCtx, lower, upper, t: Term = None) -> bool:
    """
    Establishes lower ≤ upper, binding unification variables when needed. Returns False when
    the constraint cannot be established, leaving the store unchanged.
    """
    store = session.store
    lower, upper = store.resolve_ordinal(lower), store.resolve_ordinal(upper)
    if is_resolved(lower) and is_resolved(upper):
        return ord_leq(gamma, lower, upper)
    if isinstance(upper, OUVar):
        return store.bind_ordinal(upper.uid, lower, gamma)
    if isinstance(lower, OUVar):
        return store.bind_ordinal(lower.uid, upper, gamma)
    if isinstance(upper, Succ):
        return _ord_constraint(session, gamma, lower, upper.pred, t)
    if isinstance(lower, Succ):
        if isinstance(upper, Succ):
            return _ord_constraint(session, gamma, lower.pred, upper.pred, t)
        pred = store.resolve_ordinal(lower.pred)
        if isinstance(pred, OUVar) and is_resolved(upper) and ord_nonzero(gamma, upper):
            w, _ = session.fresh_witness(gamma, upper)
            return store.bind_ordinal(pred.uid, w, gamma)
        return False
    try:
        if isinstance(upper, SecondOrder):
            store.solve_second_order(upper.uid, gamma, upper.args, lower, below=False, term=t)
            return True
        if isinstance(lower, SecondOrder):
            store.solve_second_order(lower.uid, gamma, lower.args, upper, below=True, term=t)
            return True
    except Unsolvable:
        return False
    return False


def _resolve_if_unset(session, o, gamma, t, a, b) -> None:
    if isinstance(o, OUVar) and isinstance(session.resolve_ordinal(o), OUVar):
        session.store.resolve_ord_uvar(session.resolve_ordinal(o).uid, gamma, t, a, b)


def _right_quantifier_rule(session, gamma, t, a, b, judgment):
    store = session.store
    if isinstance(b, Forall):
        choice = EpsNotIn(b.name, t, b.body, b.pos)
        premise = subsume(session, gamma, t, a, subst_type(b.body, b.name, choice))
        return ProofTree("∀_r", judgment, [premise])
    if isinstance(b, OForall):
        w, inner_gamma = session.fresh_witness(gamma, INF)
        premise = subsume(session, inner_gamma, t, a, subst_ordinal(b.body, b.name, w))
        return ProofTree("∀_or", judgment, [premise])
    if isinstance(b, Exists):
        u = store.new_type_uvar(b.pos)
        premise = subsume(session, gamma, t, a, subst_type(b.body, b.name, u))
        return ProofTree("∃_r", judgment, [premise])
    if isinstance(b, OExists):
        o = store.new_ord_uvar()
        premise = subsume(session, gamma, t, a, subst_ordinal(b.body, b.name, o))
        return ProofTree("∃_or", judgment, [premise])
    return None


def _left_quantifier_rule(session, gamma, t, a, b, judgment):
    store = session.store
    if isinstance(a, Exists):
        choice = EpsIn(a.name, t, a.body, a.pos)
        premise = subsume(session, gamma, t, subst_type(a.body, a.name, choice), b)
        return ProofTree("∃_l", judgment, [premise])
    if isinstance(a, OExists):
        w, inner_gamma = session.fresh_witness(gamma, INF)
        premise = subsume(session, inner_gamma, t, subst_ordinal(a.body, a.name, w), b)
        return ProofTree("∃_ol", judgment, [premise])
    if isinstance(a, Forall):
        u = store.new_type_uvar(a.pos)
        premise = subsume(session, gamma, t, subst_type(a.body, a.name, u), b)
        return ProofTree("∀_l", judgment, [premise])
    if isinstance(a, OForall):
        o = store.new_ord_uvar()
        premise = subsume(session, gamma, t, subst_ordinal(a.body, a.name, o), b)
        return ProofTree("∀_ol", judgment, [premise])
    return None


def _below(session, size, gamma, t, a, b):
    """
    Size for unfolding a type on the side where any smaller ordinal will do. An unset size is
    committed first, preferring the ordinals of gamma.
    """
    size = session.resolve_ordinal(size)
    if isinstance(size, OUVar):
        try:
            size = session.store.resolve_ord_uvar(size.uid, gamma, t, a, b)
        except NoPositiveSolution:
            pass
    if isinstance(size, Inf):
        return INF
    if isinstance(size, Succ):
        return size.pred
    return session.store.new_ord_uvar(upper=size)


def _structural_rule(session, gamma, t, a, b, judgment):
    if isinstance(a, Arrow) and isinstance(b, Arrow):
        u = eps_term("x", b.domain, App(t, Var("x")), b.codomain)
        inner_gamma = gamma.assume(*session.positivity(b.domain))
        # The codomain goes first: it fixes the unification variables the domain is compared with.
        codomain = subsume(session, inner_gamma, App(t, u), a.codomain, b.codomain)
        domain = subsume(session, inner_gamma, u, b.domain, a.domain)
        return ProofTree("→", judgment, [domain, codomain])
    if isinstance(a, Prod) and isinstance(b, Prod):
        premises = []
        for label, c in b.fields:
            d = a.get(label)
            if d is None:
                raise Clash(t, a, b, f"field {label} is missing")
            premises.append(subsume(session, gamma, Proj(t, label), d, c))
        return ProofTree("×", judgment, premises)
    if isinstance(a, Sum) and isinstance(b, Sum):
        premises = []
        for constructor, c in a.cases:
            d = b.get(constructor)
            if d is None:
                raise Clash(t, a, b, f"constructor {constructor} is not accepted")
            subject = Case(t, (Branch(constructor, "x", Var("x")), ))
            premises.append(subsume(session, gamma, subject, c, d))
        return ProofTree("+", judgment, premises)

    blocked = None
    if isinstance(a, Mu):
        size = session.resolve_ordinal(a.size)
        if is_resolved(size) and ord_nonzero(gamma, size):
            w, inner_gamma = session.fresh_witness(gamma, size)
            return ProofTree("μ_l", judgment,
                             [subsume(session, inner_gamma, t, _unfold(a, w), b)])
        blocked = "the size of the inductive type is not known to be positive"
    if isinstance(b, Nu):
        size = session.resolve_ordinal(b.size)
        if is_resolved(size) and ord_nonzero(gamma, size):
            w, inner_gamma = session.fresh_witness(gamma, size)
            return ProofTree("ν_r", judgment,
                             [subsume(session, inner_gamma, t, a, _unfold(b, w))])
        blocked = blocked or "the size of the coinductive type is not known to be positive"
    if isinstance(a, Nu):
        size = _below(session, a.size, gamma, t, a, b)
        premise = subsume(session, gamma, t, _unfold(a, size), b)
        _resolve_if_unset(session, size, gamma, t, a, b)
        return ProofTree("ν_l", judgment, [premise])
    if isinstance(b, Mu):
        size = _below(session, b.size, gamma, t, a, b)
        premise = subsume(session, gamma, t, a, _unfold(b, size))
        _resolve_if_unset(session, size, gamma, t, a, b)
        return ProofTree("μ_r", judgment, [premise])
    logger.debug("No subtyping rule applies")
    raise Clash(t, a, b, blocked)
