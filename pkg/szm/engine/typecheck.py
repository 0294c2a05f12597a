"""
File containing the typing engine: one syntax-directed rule per term constructor, with local
subtyping at the points where the expected type is only known up to subtyping, and circular
proofs for fixpoints built by a breadth-first search over their unrollings.
"""
import logging
from dataclasses import dataclass, replace
from typing import List, Optional

from szm.engine.hypotheses import (TYPING, Generalised, Hypothesis, abstract_sequent,
                                   has_ordinal_quantifier, register, try_hypotheses)
from szm.engine.scp import CallGraph, check_well_founded
from szm.engine.session import Session
from szm.engine.subtype import subsume
from szm.engine.uvars import UNSET
from szm.errors import BudgetExhausted, Clash, NotWellFounded, UnrollDepthExceeded
from szm.syntax.judgments import HypothesisLink, LocalSub, ProofTree, Typing
from szm.syntax.operations import subst_ordinal, subst_types, substitute, transform
from szm.syntax.ordinals import INF, Inf, PosCtx
from szm.syntax.terms import (Annot, App, Case, Cons, EpsTerm, Fix, Global, Lam, OrdAbs, Proj,
                              Record, Term, TypeLet, Var, eps_term)
from szm.syntax.types import Arrow, OForall, Prod, Sum, Type

logger = logging.getLogger(__name__)


@dataclass
class PendingFixpoint:
    """
    Typing judgment of a fixpoint whose unrolling is delayed to the next stage of the search.
    The placeholder proof node is completed when the judgment is processed.
    """
    gamma: PosCtx
    term: Fix
    type: Type
    frame: Optional[Hypothesis]
    stage: int
    proof: ProofTree

    @property
    def pos(self):
        return self.term.pos


@dataclass
class CheckResult:
    name: str
    type: Type
    proof: ProofTree
    hypotheses: List[Hypothesis]
    graph: CallGraph
    steps: int


def typecheck(session, gamma: PosCtx, t: Term, c: Type) -> ProofTree:
    """
    Proves the typing judgment γ ⊢ t : C. Fixpoints met on the way are only queued: the proof
    is complete once run_breadth_first has emptied the queue of the session.

    Parameters
    ----------
    session : Session
        Checking session.
    gamma : PosCtx
        Positivity context.
    t : Term
        Closed term.
    c : Type
        Expected type, possibly containing unification variables.

    Returns
    -------
    ProofTree
        Derivation of the judgment.
    """
    judgment = Typing(gamma, t, c)
    session.last_typing = judgment
    session.tick()
    store = session.store

    if isinstance(t, EpsTerm):
        return ProofTree(":", judgment, [subsume(session, gamma, t, t.domain, c)])

    if isinstance(t, Global):
        a = session.globals.get(t.name)
        assert a is not None, f"Global definition {t.name} has no checked type"
        return ProofTree(":", judgment, [subsume(session, gamma, t, a, c)])

    if isinstance(t, Lam):
        head = session.head(c)
        premises = []
        if isinstance(head, Arrow) and t.domain is None:
            domain, codomain = head.domain, head.codomain
        else:
            domain = store.new_type_uvar(t.pos) if t.domain is None else t.domain
            codomain = store.new_type_uvar(t.pos)
            premises.append(subsume(session, gamma, t, Arrow(domain, codomain, t.pos), c))
        inner_gamma = session.scope(gamma.assume(*session.positivity(domain)), domain)
        x = eps_term(t.name, domain, t.body, codomain, t.pos)
        premises.append(typecheck(session, inner_gamma, substitute(t.body, t.name, x), codomain))
        return ProofTree("→_i", judgment, premises)

    if isinstance(t, App):
        u = store.new_type_uvar(t.pos)
        if isinstance(t.function, Lam) and t.function.domain is None:
            # let-style redex: the argument informs the bound variable
            argument = typecheck(session, gamma, t.argument, u)
            function = typecheck(session, gamma, t.function, Arrow(u, c, t.pos))
        else:
            function = typecheck(session, gamma, t.function, Arrow(u, c, t.pos))
            argument = typecheck(session, gamma, t.argument, u)
        return ProofTree("→_e", judgment, [function, argument])

    if isinstance(t, Record):
        fields = tuple((label, store.new_type_uvar(t.pos)) for label, _ in t.fields)
        premises = [subsume(session, gamma, t, Prod(fields, t.pos), c)]
        for (_, u), (_, a) in zip(t.fields, fields):
            premises.append(typecheck(session, gamma, u, a))
        return ProofTree("×_i", judgment, premises)

    if isinstance(t, Proj):
        premise = typecheck(session, gamma, t.term, Prod(((t.label, c), ), t.pos))
        return ProofTree("×_e", judgment, [premise])

    if isinstance(t, Cons):
        u = store.new_type_uvar(t.pos)
        premises = [subsume(session, gamma, t, Sum(((t.name, u), ), t.pos), c),
                    typecheck(session, gamma, t.argument, u)]
        return ProofTree("+_i", judgment, premises)

    if isinstance(t, Case):
        cases = tuple((b.constructor, store.new_type_uvar(t.pos)) for b in t.branches)
        premises = [typecheck(session, gamma, t.scrutinee, Sum(cases, t.pos))]
        for branch, (_, u) in zip(t.branches, cases):
            x = eps_term(branch.name, u, branch.body, c, t.pos)
            inner_gamma = session.scope(gamma.assume(*session.positivity(u)), u)
            premises.append(typecheck(session, inner_gamma,
                                      substitute(branch.body, branch.name, x), c))
        return ProofTree("+_e", judgment, premises)

    if isinstance(t, Annot):
        premises = [typecheck(session, gamma, t.term, t.type),
                    subsume(session, gamma, t, t.type, c)]
        return ProofTree(":", judgment, premises)

    if isinstance(t, OrdAbs):
        head = session.head(c)
        w, inner_gamma = session.fresh_witness(gamma, INF)
        body = subst_ordinal(t.body, t.name, w)
        if isinstance(head, OForall):
            c = subst_ordinal(head.body, head.name, w)
        return ProofTree("Λ_o", judgment, [typecheck(session, inner_gamma, body, c)])

    if isinstance(t, TypeLet):
        mapping = {name: store.new_type_uvar(t.pos) for name in t.names}
        premises = [typecheck(session, gamma, t.subject, subst_types(t.pattern, mapping)),
                    typecheck(session, gamma, subst_types(t.body, mapping), c)]
        return ProofTree("let", judgment, premises)

    if isinstance(t, Fix):
        proof = ProofTree("Y", judgment)
        session.pending.append(
            PendingFixpoint(gamma, t, c, session.frame, session.stage + 1, proof))
        return proof

    assert not isinstance(t, Var), f"Free variable {t.name} reached the checker"
    raise TypeError(f"Unexpected term {t!r}")


def generalise_fix(session, gamma: PosCtx, term: Fix, a: Type) -> Generalised:
    """
    General abstract sequent of a fixpoint typing judgment. When the type has no ordinal
    quantifier, the infinite sizes of negative inductive and positive coinductive types are
    abstracted too; otherwise only the ordinals already present are.
    """
    decorate = not has_ordinal_quantifier(session.zonk(a))
    return abstract_sequent(session, TYPING, gamma, (a, ), term, decorate)


def _rejected(item: PendingFixpoint, session) -> NotWellFounded:
    _, verdict = session.rejections[-1]
    return NotWellFounded(item.term, verdict.node, verdict.matrix)


def _close_fixpoint(session, item: PendingFixpoint) -> None:
    session.frame, session.stage = item.frame, item.stage
    if item.stage > session.unroll_depth:
        if session.rejections:
            raise _rejected(item, session)
        raise UnrollDepthExceeded(item.term, session.unroll_depth)

    generalised = generalise_fix(session, item.gamma, item.term, item.type)
    rejections = len(session.rejections)
    hit = try_hypotheses(session, generalised, item.gamma)
    if hit is not None:
        hypothesis, matrix = hit
        item.proof.label = f"H_{hypothesis.uid}"
        item.proof.link = HypothesisLink(hypothesis.uid, matrix)
        return
    if generalised.arity == 0 and len(session.rejections) > rejections:
        # Nothing can decrease: another unrolling would be rejected the same way.
        raise _rejected(item, session)

    mapping = {arg: param for arg, param in zip(generalised.args, generalised.params)
               if not isinstance(arg, Inf)}
    term = transform(item.term, ordinal_atom=lambda o: mapping.get(o, o), into_epsilon=True)
    (a, ) = generalised.types
    generic_gamma = generalised.generic_context()
    generic = Typing(generic_gamma, term, a)
    hypothesis = register(session, generalised, item.gamma, generic)
    logger.debug("Stage %d: unrolling fixpoint under hypothesis %d", item.stage, hypothesis.uid)
    session.frame = hypothesis
    premise = typecheck(session, generic_gamma, substitute(term.body, term.name, term), a)
    item.proof.label = hypothesis.label
    item.proof.link = HypothesisLink(hypothesis.uid)
    item.proof.premises = [ProofTree("Y", generic, [premise])]


def run_breadth_first(session) -> None:
    """
    Processes the queued fixpoint judgments in the order they were met. Each one is closed by
    an induction hypothesis when the call graph allows it, and is otherwise generalised,
    registered and unrolled, which may queue the fixpoints of the next stage.
    """
    while session.pending:
        _close_fixpoint(session, session.pending.popleft())
    session.frame = None


def _zonk_proof(session, proof: ProofTree) -> ProofTree:
    for node in proof.walk():
        conclusion = node.conclusion
        if isinstance(conclusion, Typing):
            node.conclusion = replace(conclusion, type=session.zonk(conclusion.type))
        elif isinstance(conclusion, LocalSub):
            node.conclusion = replace(conclusion, left=session.zonk(conclusion.left),
                                      right=session.zonk(conclusion.right))
    return proof


def _zonk_clash(session, clash: Clash) -> None:
    clash.term = None if clash.term is None else session.zonk(clash.term)
    clash.left = None if clash.left is None else session.zonk(clash.left)
    clash.right = None if clash.right is None else session.zonk(clash.right)


def _close_constraints(session, a: Type) -> None:
    # A variable only known through field constraints becomes the type they describe.
    store = session.store
    while True:
        constrained = [uid for uid in store.unset_type_uvars(a)
                       if store.type_state(uid).status != UNSET]
        if not constrained:
            return
        for uid in constrained:
            store.instantiate_constraints(uid)


def check_definition(session: Session, name: str, term: Term, a: Optional[Type]) -> CheckResult:
    """
    Checks a top-level definition against its declared type.

    Parameters
    ----------
    session : Session
        Checking session. It is reset before the check.
    name : str
        Name of the definition, used for reporting.
    term : Term
        Closed body of the definition.
    a : Type
        Declared type. Without it the term is checked against a fresh unification variable
        and the result carries the type found.

    Returns
    -------
    CheckResult
        Proof tree, registered hypotheses, call graph and number of rule applications.

    Raises
    ------
    TypeCheckError
        When the definition is rejected.
    """
    session.reset()
    if a is None:
        a = session.store.new_type_uvar(term.pos)
    try:
        proof = typecheck(session, PosCtx(), term, a)
        run_breadth_first(session)
    except Clash as clash:
        _zonk_clash(session, clash)
        raise
    except RecursionError:
        # A search too deep for the interpreter stack is interrupted like a spent budget.
        logger.debug("Stack exhausted after %d steps", session.steps)
        raise BudgetExhausted(session.last_typing, None)
    verdict = check_well_founded(session.graph)
    if not verdict:
        raise NotWellFounded(term, verdict.node, verdict.matrix)
    _close_constraints(session, a)
    logger.info("Definition %s accepted in %d steps with %d hypotheses", name, session.steps,
                len(session.registry))
    return CheckResult(name, session.zonk(a), _zonk_proof(session, proof),
                       list(session.registry), session.graph, session.steps)
