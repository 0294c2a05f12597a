"""
File containing the checking session: the state shared by the subtyping and typing engines
while a top-level definition is checked (unification store, hypothesis registry, call graph,
step budget and pending fixpoints).
"""
import itertools
import logging
from collections import deque
from typing import Dict, Optional, Tuple

from szm.engine.hypotheses import HypothesisRegistry
from szm.engine.scp import CallGraph
from szm.engine.uvars import UVarStore
from szm.errors import BudgetExhausted, Clash
from szm.syntax.operations import ordinals_of, subst_type
from szm.syntax.ordinals import Inf, OWitness, Ordinal, PosCtx, fresh_witness, is_resolved
from szm.syntax.terms import Annot, EpsTerm, Global, Term
from szm.syntax.types import EpsIn, Exists, Mu, TDot, Type
from szm.utils.io import get_default_configs, merge_configs

logger = logging.getLogger(__name__)


class Session:
    def __init__(self, configs: dict = None, globals_: Dict[str, Type] = None) -> None:
        """
        State of the checker for one top-level definition at a time.

        Parameters
        ----------
        configs : dict [Optional]
            Checker configurations. Only unroll_depth and step_budget are used here. Missing
            keys take the values of the default template. By default it is None.
        globals_ : dict [Optional]
            Declared types of the top-level definitions checked so far. By default it is
            empty.
        """
        self.configs = merge_configs(get_default_configs(), configs or {})
        self.unroll_depth = self.configs["unroll_depth"]
        self.step_budget = self.configs["step_budget"]
        self.globals = {} if globals_ is None else globals_
        self.reset()

    def reset(self) -> None:
        """
        Starts a new top-level definition: fresh store, registry, call graph and budget.
        """
        from szm.engine.subtype import subsume

        self.store = UVarStore()
        self.store.subtype_hook = lambda gamma, t, a, b: subsume(self, gamma, t, a, b)
        self.registry = HypothesisRegistry(self.store)
        self.graph = CallGraph()
        self.hypothesis_ids = itertools.count(1)
        self.frame = None
        self.steps = 0
        self.stage = 0
        self.last_typing = None
        self.pending = deque()
        self.rejections = []

    def tick(self, judgment=None) -> None:
        """
        Counts one rule application, interrupting the search when the budget is spent.
        """
        self.steps += 1
        if self.steps > self.step_budget:
            logger.debug("Step budget of %d exhausted", self.step_budget)
            raise BudgetExhausted(self.last_typing, judgment)

    def fresh_witness(self, gamma: PosCtx, bound: Ordinal) -> Tuple[Ordinal, PosCtx]:
        return fresh_witness(gamma, bound, self.store.witness_ids)

    def head(self, a: Type) -> Type:
        """
        Head-normal form of a type: solved unification variables and dot notations are
        replaced by their values.
        """
        a = self.store.head(a)
        while isinstance(a, TDot):
            a = self.store.head(self.resolve_dot(a))
        return a

    def resolve_ordinal(self, o: Ordinal) -> Ordinal:
        return self.store.resolve_ordinal(o)

    def zonk(self, node):
        return self.store.zonk(node)

    def type_of_subject(self, h: Term) -> Optional[Type]:
        if isinstance(h, Global):
            return self.globals.get(h.name)
        if isinstance(h, EpsTerm):
            return h.domain
        if isinstance(h, Annot):
            return h.type
        return None

    def resolve_dot(self, dot: TDot) -> Type:
        """
        Computes h.T = eps_T(h in B) by peeling the existential binders of the type of h,
        earlier binders being replaced by their own dot notations.
        """
        a = self.type_of_subject(dot.term)
        a = None if a is None else self.store.head(a)
        while isinstance(a, Exists):
            if a.name == dot.name:
                return EpsIn(a.name, dot.term, a.body, dot.pos)
            a = self.store.head(subst_type(a.body, a.name, TDot(dot.term, a.name, dot.pos)))
        raise Clash(dot.term, a, dot, f"no abstract type named {dot.name}")

    def positivity(self, a: Type) -> Tuple[Ordinal, ...]:
        """
        Ordinals that are nonzero when a is inhabited: the size of an inductive head.
        """
        a = self.head(a)
        if isinstance(a, Mu):
            size = self.resolve_ordinal(a.size)
            if is_resolved(size) and not isinstance(size, Inf):
                return (size, )
        return ()

    def scope(self, gamma: PosCtx, a: Type) -> PosCtx:
        """
        Context in which a variable of type a is used: the witnesses occurring in a are
        recorded, so that the sizes they stand for can be chosen again.
        """
        witnesses = [o for o in ordinals_of(self.zonk(a)) if isinstance(o, OWitness)]
        return gamma.record_all(witnesses)
