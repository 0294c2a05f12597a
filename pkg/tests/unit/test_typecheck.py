import os
import sys
import unittest

from szm.engine.scp import SCEntry
from szm.engine.session import Session
from szm.engine.typecheck import check_definition
from szm.errors import (BudgetExhausted, Clash, NotWellFounded, OccursCheck,
                        UnrollDepthExceeded)
from szm.syntax.printer import show_type
from szm.syntax.types import Sum
from szm.utils.parser import parse_program

DATA = os.path.join("tests", "data")


def check_source(text, configs=None):
    """
    Checks every definition of a source text in order, as the command line does.
    """
    session = Session(configs)
    results = {}
    for definition in parse_program(text).values:
        result = check_definition(session, definition.name, definition.term, definition.type)
        session.globals[definition.name] = result.type
        results[definition.name] = result
    return results


def check_file(name, configs=None):
    # Circular proofs of the larger examples are deep.
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    with open(os.path.join(DATA, name), encoding="utf-8") as f:
        return check_source(f.read(), configs)


class Test_Accepted(unittest.TestCase):
    def test_basics(self):
        results = check_file("basics.szm")
        self.assertEqual(list(results), ["id", "id_again", "id_named", "swap", "not", "pred",
                                         "two"])
        self.assertEqual(show_type(results["id"].type), "∀X.X → X")
        for result in results.values():
            self.assertEqual(result.hypotheses, [])
            self.assertGreater(result.steps, 0)

    def test_proof_root(self):
        result = check_source("val id : ∀X.X → X = λx. x")["id"]
        self.assertEqual(result.proof.label, "→_i")
        self.assertEqual(result.proof.conclusion.type, result.type)

    def test_untyped_definition(self):
        result = check_source("val two = S (S Z)")["two"]
        self.assertIsInstance(result.type, Sum)
        self.assertIsInstance(result.type.get("S"), Sum)

    def test_rebuilt_identity(self):
        result = check_file("id_rebuild.szm")["id_nat"]
        self.assertGreaterEqual(len(result.hypotheses), 2)
        labels = result.proof.labels()
        self.assertTrue(any(label.startswith("I_") for label in labels))
        closing = [node for node in result.proof.walk() if node.label.startswith("H_")]
        self.assertTrue(closing)
        self.assertTrue(
            any(node.link.matrix is not None and (node.link.matrix == SCEntry.LESS).any()
                for node in closing))
        self.assertTrue(result.graph.edges)

    def test_lists(self):
        results = check_file("lists.szm")
        self.assertEqual(list(results), ["map", "partition", "append", "quicksort", "leq"])
        for name in ["map", "partition", "append", "leq"]:
            self.assertTrue(results[name].hypotheses, name)
            self.assertTrue(results[name].graph.edges, name)

    def test_size_preserving_map(self):
        result = check_file("lists.szm")["map"]
        closing = [node for node in result.proof.walk() if node.label.startswith("H_")]
        self.assertTrue(
            any(node.link.matrix is not None and (node.link.matrix == SCEntry.LESS).any()
                for node in closing))

    def test_scott(self):
        results = check_file("scott.szm")
        self.assertEqual(list(results), ["zero_s", "succ_s", "pred", "zeta", "delta", "rec_s",
                                         "add_s", "to_nat"])

    def test_scott_recursor(self):
        # The recursor relies on NS being a subtype of N', which needs circular subtyping.
        result = check_file("scott.szm")["rec_s"]
        self.assertTrue(result.hypotheses)
        self.assertTrue(all(h.kind == "subtyping" for h in result.hypotheses))

    def test_church(self):
        results = check_file("church.szm")
        self.assertEqual(list(results), ["zero_c", "succ_c", "pred_c", "rec_c", "leq_c",
                                         "to_nat"])
        for name in ["pred_c", "rec_c", "leq_c"]:
            self.assertGreater(results[name].steps, 0, name)

    def test_streams(self):
        results = check_file("streams.szm")
        self.assertEqual(list(results), ["coiter", "head", "tail", "nats"])

    def test_abstract_types(self):
        results = check_file("iso.szm")
        self.assertEqual(list(results), ["trivial", "roundtrip"])


class Test_Rejected(unittest.TestCase):
    def test_self_application(self):
        with self.assertRaises(OccursCheck):
            check_file("bad_omega.szm")

    def test_fixpoint_without_decrease(self):
        with self.assertRaises(NotWellFounded) as context:
            check_file("bad_yx.szm")
        self.assertEqual(context.exception.matrix.shape, (0, 0))
        self.assertIn("not well-founded", str(context.exception))

    def test_clash(self):
        with self.assertRaises(Clash) as context:
            check_file("bad_clash.szm")
        message = str(context.exception)
        self.assertIn("has type", message)
        self.assertIn("is used with type", message)

    def test_unroll_depth(self):
        with self.assertRaises(UnrollDepthExceeded) as context:
            check_file("id_rebuild.szm", {"unroll_depth": 1})
        self.assertEqual(context.exception.depth, 1)

    def test_step_budget(self):
        with self.assertRaises(BudgetExhausted) as context:
            check_file("loop.szm", {"step_budget": 5})
        self.assertTrue(str(context.exception).startswith("interrupted: last judgment"))

    def test_session_is_reset(self):
        session = Session()
        source = parse_program("type Nat = μN.[Z | S of N]\n"
                               "val pred : Nat → Nat = λn. case n of Z → Z | S p → p")
        definition = source.values[0]
        steps = [check_definition(session, definition.name, definition.term,
                                  definition.type).steps for _ in range(3)]
        self.assertEqual(len(set(steps)), 1)
        self.assertEqual(session.steps, steps[0])


if __name__ == '__main__':
    unittest.main()
