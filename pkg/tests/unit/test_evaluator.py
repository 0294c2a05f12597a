import os
import unittest

from szm.errors import FuelExhausted, Stuck
from szm.runtime.evaluator import count_steps, evaluate, normalize, show_value, to_term
from szm.syntax.terms import UNIT, App, Cons, Global
from szm.utils.parser import parse_program, parse_term

DATA = os.path.join("tests", "data")

PEANO = """
type Nat = μN.[Z | S of N]
val add : Nat → Nat → Nat = fix add. λn m. case n of Z → m | S p → S (add p m)
"""


def load(name):
    with open(os.path.join(DATA, name), encoding="utf-8") as f:
        return parse_program(f.read(), name)


def peano(n):
    t = Cons("Z", UNIT)
    for _ in range(n):
        t = Cons("S", t)
    return t


def scott(n):
    t = Global("zero_s")
    for _ in range(n):
        t = App(Global("succ_s"), t)
    return t


class Test_Evaluation(unittest.TestCase):
    def test_projection(self):
        self.assertEqual(show_value(evaluate(parse_term("{l = Z; m = {}}.l"))), "Z")

    def test_case(self):
        value = evaluate(parse_term("case S (S Z) of Z → Z | S p → p"))
        self.assertEqual(show_value(value), "S Z")

    def test_application(self):
        value = evaluate(parse_term("(λx y. {fst = y; snd = x}) (Z) (S Z)"))
        self.assertEqual(show_value(value), "{fst = S Z; snd = Z}")

    def test_erasure(self):
        value = evaluate(parse_term("(Λa. (λx. x : ∀X.X → X)) Z"))
        self.assertEqual(show_value(value), "Z")

    def test_functions(self):
        self.assertEqual(show_value(evaluate(parse_term("λx. x"))), "<fun>")

    def test_stuck(self):
        for text in ["{}.l", "Z.l", "case {} of Z → Z", "case S Z of Z → Z", "{} {}"]:
            with self.assertRaises(Stuck):
                evaluate(parse_term(text))

    def test_fuel(self):
        with self.assertRaises(FuelExhausted) as context:
            evaluate(parse_term("fix x. x"), fuel=1000)
        self.assertEqual(context.exception.steps, 1000)

    def test_unknown_definition(self):
        with self.assertRaises(Stuck):
            evaluate(Global("missing"))


class Test_Oracle(unittest.TestCase):
    def test_peano_addition(self):
        definitions = parse_program(PEANO).bodies()
        for n in range(11):
            for m in (0, 3, 10):
                t = App(App(Global("add"), peano(n)), peano(m))
                value = evaluate(t, definitions=definitions)
                self.assertEqual(to_term(value), peano(n + m))
                self.assertEqual(normalize(t, definitions=definitions), to_term(value))

    def test_scott_addition(self):
        definitions = load("scott.szm").bodies()
        for n in range(11):
            for m in (0, 3, 10):
                t = App(Global("to_nat"), App(App(Global("add_s"), scott(n)), scott(m)))
                value = evaluate(t, definitions=definitions)
                self.assertEqual(to_term(value), peano(n + m))
                self.assertEqual(normalize(t, definitions=definitions), to_term(value))

    def test_functions_have_no_term(self):
        with self.assertRaises(ValueError):
            to_term(evaluate(parse_term("λx. x")))


class Test_Complexity(unittest.TestCase):
    def test_scott_predecessor_is_constant(self):
        definitions = load("scott.szm").bodies()
        costs = set()
        for k in range(1, 21):
            total = count_steps(App(Global("pred"), scott(k)), definitions=definitions)
            costs.add(total - count_steps(scott(k), definitions=definitions))
        self.assertEqual(len(costs), 1)


class Test_Programs(unittest.TestCase):
    expected = {
        "basics.szm": ["S Z", "False", "{fst = True; snd = Z}"],
        "id_rebuild.szm": ["S (S (S Z))"],
        "church.szm": ["S (S Z)", "T", "F"],
        "scott.szm": ["S Z", "S (S (S Z))"],
        "lists.szm": [
            "Cons {fst = S Z; snd = Cons {fst = S (S Z); snd = Nil}}",
            "Cons {fst = Z; snd = Cons {fst = S Z; snd = Cons {fst = S (S Z); snd = Nil}}}"
        ],
        "streams.szm": ["S (S Z)"],
    }

    def test_evaluations(self):
        for name, outputs in self.expected.items():
            source = load(name)
            values = [show_value(evaluate(e.term, definitions=source.bodies()))
                      for e in source.evals]
            self.assertEqual(values, outputs, name)


if __name__ == '__main__':
    unittest.main()
