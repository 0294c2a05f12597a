import itertools
import unittest

import numpy as np

from szm.syntax.operations import (ORD, TERM, alpha_equal, canonical, display_epsilon, free_names,
                                   fresh_name, position_of, subst_ordinal, subst_type,
                                   substitute, term_size)
from szm.syntax.ordinals import INF, OVar
from szm.syntax.printer import show_term, show_type
from szm.syntax.terms import (App, Branch, Case, Cons, Fix, Global, Lam, Proj, Record, SourcePos,
                              Var, eps_term)
from szm.syntax.types import Arrow, EpsIn, EpsNotIn, Forall, Mu, Prod, Sum, TVar, mu
from szm.utils.parser import parse_term, parse_type

NAT = "type Nat = μN.[Z | S of N]"


class Test_Substitution(unittest.TestCase):
    def test_capture_avoidance(self):
        t = substitute(Lam("y", Var("x")), "x", Var("y"))
        self.assertEqual(t.name, "y'")
        self.assertEqual(t.body, Var("y"))

    def test_shadowed(self):
        t = Lam("x", Var("x"))
        self.assertIs(substitute(t, "x", Var("z")), t)

    def test_not_free(self):
        t = App(Var("y"), Global("g"))
        self.assertIs(substitute(t, "x", Var("z")), t)

    def test_application(self):
        t = substitute(App(Var("x"), Var("x")), "x", Var("z"))
        self.assertEqual(t, App(Var("z"), Var("z")))

    def test_type_capture(self):
        a = subst_type(Forall("Y", Arrow(TVar("X"), TVar("Y"))), "X", TVar("Y"))
        self.assertEqual(a.name, "Y'")
        self.assertEqual(a.body, Arrow(TVar("Y"), TVar("Y'")))

    def test_ordinal(self):
        body = Sum((("Z", Prod(())), ("S", TVar("N"))))
        a = subst_ordinal(Mu(OVar("a"), "N", body), "a", INF)
        self.assertEqual(a, mu("N", body))

    def test_free_names(self):
        t = Lam("x", App(Var("x"), Var("y")))
        self.assertEqual(free_names(t), frozenset({(TERM, "y")}))
        self.assertEqual(free_names(Mu(OVar("a"), "N", TVar("N"))), frozenset({(ORD, "a")}))

    def test_fresh_name(self):
        self.assertEqual(fresh_name("x", {"y"}), "x")
        self.assertEqual(fresh_name("x", {"x", "x'"}), "x''")


class Test_Equivalence(unittest.TestCase):
    def test_alpha_equal_terms(self):
        self.assertTrue(alpha_equal(Lam("x", Var("x")), Lam("y", Var("y"))))
        self.assertFalse(alpha_equal(Lam("x", Var("y")), Lam("y", Var("y"))))

    def test_alpha_equal_types(self):
        self.assertTrue(alpha_equal(parse_type("∀X.X → X"), parse_type("forall Y. Y -> Y")))
        self.assertFalse(alpha_equal(parse_type("∀X.∀Y.X → Y"), parse_type("∀X.∀Y.Y → X")))

    def test_labels_as_sets(self):
        self.assertEqual(canonical(parse_type("{l : {}; m : [A]}")),
                         canonical(parse_type("{m : [A]; l : {}}")))
        self.assertEqual(canonical(parse_type("[A | B of {}]")),
                         canonical(parse_type("[B of {} | A]")))

    def test_sizes(self):
        self.assertNotEqual(canonical(parse_type("∀a.μ_a N.[Z | S of N]")),
                            canonical(parse_type("∀a.μ_S(a) N.[Z | S of N]")))
        self.assertEqual(canonical(parse_type("∀a.μ_a N.[Z | S of N]")),
                         canonical(parse_type("forall b. mu_b M. [Z | S of M]")))


class Test_Printer(unittest.TestCase):
    def test_round_trip(self):
        for text in ["∀X.X → X",
                     "∀a.(μ_a N.[Z | S of N]) → μ_a N.[Z | S of N]",
                     "∃X.{x : X; f : X → {}}",
                     "νX.{hd : {}; tl : X}",
                     "(∀X.X) → ∀X.{l : X}"]:
            a = parse_type(text)
            self.assertEqual(show_type(a), text)
            self.assertEqual(parse_type(show_type(a)), a)

    def test_terms(self):
        self.assertEqual(show_term(parse_term("fun x. x")), "λx.x")
        self.assertEqual(show_term(parse_term("S (S Z)")), "S (S Z)")
        self.assertEqual(show_term(parse_term("{l = Z}.l")), "{l = Z}.l")
        pred = parse_term("λn. case n of Z → Z | S p → p", NAT)
        self.assertEqual(show_term(pred), "λn.case n of Z → Z | S p → p")


class Test_Size(unittest.TestCase):
    def test_term_size(self):
        self.assertEqual(term_size(Var("x")), 1)
        self.assertEqual(term_size(Lam("x", App(Var("x"), Var("x")))), 4)
        self.assertEqual(term_size(App(Global("g"), Var("x"))), 2)
        self.assertEqual(term_size(parse_term("{l = Z}.l")), 4)


class Test_Positions(unittest.TestCase):
    def test_epsilon_term(self):
        pos = SourcePos("file.szm", 3, 7)
        e = eps_term("x", TVar("X"), Var("x"), TVar("X"), pos)
        self.assertEqual(position_of(e), pos)
        self.assertEqual(display_epsilon(e), "x@file.szm:3:7")

    def test_epsilon_type(self):
        e = EpsNotIn("X", Var("x"), TVar("X"), SourcePos("file.szm", 10, 2))
        self.assertEqual(display_epsilon(e), "X@file.szm:10:2")

    def test_internal(self):
        e = EpsIn("X", Var("x"), TVar("X"))
        self.assertIsNone(position_of(e))
        self.assertEqual(display_epsilon(e), "<internal>")


class Test_Properties(unittest.TestCase):
    """
    Substitution and alpha-equivalence on randomly generated terms over the names x, y and z.
    """

    NAMES = ["x", "y", "z"]

    def random_term(self, rng, depth):
        if depth == 0 or rng.random() < 0.2:
            return Var(self.NAMES[rng.integers(3)])
        kind = rng.integers(6)
        if kind == 0:
            return Lam(self.NAMES[rng.integers(3)], self.random_term(rng, depth - 1))
        if kind == 1:
            return App(self.random_term(rng, depth - 1), self.random_term(rng, depth - 1))
        if kind == 2:
            return Record((("l", self.random_term(rng, depth - 1)),
                           ("m", self.random_term(rng, depth - 1))))
        if kind == 3:
            return Proj(self.random_term(rng, depth - 1), "l")
        if kind == 4:
            branches = (Branch("A", self.NAMES[rng.integers(3)], self.random_term(rng, depth - 1)),
                        Branch("B", self.NAMES[rng.integers(3)], self.random_term(rng, depth - 1)))
            return Case(Cons("A", self.random_term(rng, depth - 1)), branches)
        return Fix(self.NAMES[rng.integers(3)], self.random_term(rng, depth - 1))

    def rename(self, t, ids, env=None):
        """
        Gives every binder of t a new name, keeping the free names.
        """
        env = {} if env is None else env
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name))
        if isinstance(t, Lam):
            name = f"b{next(ids)}"
            return Lam(name, self.rename(t.body, ids, {**env, t.name: name}))
        if isinstance(t, Fix):
            name = f"b{next(ids)}"
            return Fix(name, self.rename(t.body, ids, {**env, t.name: name}))
        if isinstance(t, App):
            return App(self.rename(t.function, ids, env), self.rename(t.argument, ids, env))
        if isinstance(t, Record):
            return Record(tuple((label, self.rename(u, ids, env)) for label, u in t.fields))
        if isinstance(t, Proj):
            return Proj(self.rename(t.term, ids, env), t.label)
        if isinstance(t, Cons):
            return Cons(t.name, self.rename(t.argument, ids, env))
        branches = []
        for b in t.branches:
            name = f"b{next(ids)}"
            body = self.rename(b.body, ids, {**env, b.name: name})
            branches.append(Branch(b.constructor, name, body))
        return Case(self.rename(t.scrutinee, ids, env), tuple(branches))

    def corpus(self, seed, count=150):
        rng = np.random.default_rng(seed)
        return [self.random_term(rng, 4) for _ in range(count)]

    def test_substitute_variable_by_itself(self):
        for t in self.corpus(0):
            for x in self.NAMES:
                self.assertTrue(alpha_equal(substitute(t, x, Var(x)), t), show_term(t))

    def test_substitution_commutes_with_renaming(self):
        ids = itertools.count()
        arguments = [Var("y"), Lam("y", App(Var("x"), Var("y"))), Global("g")]
        for t in self.corpus(1):
            renamed = self.rename(t, ids)
            self.assertTrue(alpha_equal(renamed, t), show_term(t))
            for u in arguments:
                self.assertTrue(alpha_equal(substitute(renamed, "x", u), substitute(t, "x", u)),
                                show_term(t))

    def test_alpha_equivalence_is_an_equivalence(self):
        ids = itertools.count()
        terms = self.corpus(2, 40)
        terms += [self.rename(t, ids) for t in terms[:20]]
        related = {(i, j): alpha_equal(s, t)
                   for (i, s), (j, t) in itertools.product(enumerate(terms), repeat=2)}
        for i in range(len(terms)):
            self.assertTrue(related[i, i])
        for (i, j), value in related.items():
            self.assertEqual(value, related[j, i])
        for i, j, k in itertools.product(range(len(terms)), repeat=3):
            if related[i, j] and related[j, k]:
                self.assertTrue(related[i, k])


if __name__ == '__main__':
    unittest.main()
