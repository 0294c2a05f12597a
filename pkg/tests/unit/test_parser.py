import glob
import os
import unittest

from szm.engine.session import Session
from szm.errors import ParseError, UnboundName
from szm.syntax.ordinals import OVar
from szm.syntax.terms import App, Cons, Fix, Global, Lam, Record, SourcePos, Var
from szm.syntax.types import (Arrow, EpsIn, Exists, Forall, Mu, OForall, Prod, Sum, TDot, TVar,
                              pair)
from szm.utils.parser import parse_program, parse_term, parse_type, tokenize

DATA = os.path.join("tests", "data")

ISO = """
type Iso = ∃T.∃U.{f : T → U; g : U → T}
val h : Iso = {f = λx. x; g = λx. x}
val k : h.T → h.T = λx. x
"""


class Test_Definitions(unittest.TestCase):
    def test_identity(self):
        source = parse_program("val id : ∀X.X → X = λx. x", "id.szm")
        (definition, ) = source.values
        self.assertEqual(definition.name, "id")
        self.assertEqual(definition.type, Forall("X", Arrow(TVar("X"), TVar("X"))))
        self.assertEqual(definition.term, Lam("x", Var("x")))
        self.assertEqual(definition.pos, SourcePos("id.szm", 1, 1))

    def test_evals_and_comments(self):
        source = parse_program("// nothing to check\nval z = Z\neval z // trailing\n")
        self.assertEqual(len(source.values), 1)
        self.assertEqual([e.term for e in source.evals], [Global("z")])
        self.assertEqual(source.bodies(), {"z": Cons("Z", Record(()))})

    def test_untyped(self):
        (definition, ) = parse_program("val two = S (S Z)").values
        self.assertIsNone(definition.type)

    def test_corpus(self):
        files = sorted(glob.glob(os.path.join(DATA, "*.szm")))
        self.assertTrue(files)
        for path in files:
            with open(path, encoding="utf-8") as f:
                source = parse_program(f.read(), path)
            self.assertTrue(source.values, path)


class Test_Syntax(unittest.TestCase):
    def test_ascii_aliases(self):
        pairs = [("forall X. X -> X", "∀X.X → X"),
                 ("forall a. mu_a N. [Z | S of N]", "∀a.μ_a N.[Z | S of N]"),
                 ("nu X. {hd : {}; tl : X}", "νX.{hd : {}; tl : X}"),
                 ("exists X. X * X", "∃X.X × X")]
        for ascii, unicode in pairs:
            self.assertEqual(parse_type(ascii), parse_type(unicode))
        self.assertEqual(parse_term("ofun a. fun x. x"), parse_term("Λa.λx.x"))
        self.assertEqual(parse_term("Y x. x"), Fix("x", Var("x")))
        self.assertEqual(parse_term("fix x. x"), Fix("x", Var("x")))

    def test_tokens(self):
        tokens = tokenize("mu_a N")
        self.assertEqual([t.text for t in tokens], ["μ", "_", "a", "N", ""])
        self.assertEqual([t.pos.column for t in tokens[:4]], [1, 3, 4, 6])

    def test_ordinal_binders(self):
        self.assertEqual(parse_type("∀a.{}"), OForall("a", Prod(())))
        self.assertEqual(parse_type("forall o a b. {}"),
                         OForall("a", OForall("b", Prod(()))))
        self.assertEqual(parse_type("∀X.∀a.X"), Forall("X", OForall("a", TVar("X"))))

    def test_sugar(self):
        self.assertEqual(parse_term("let x = Z in x"),
                         App(Lam("x", Var("x")), Cons("Z", Record(()))))
        self.assertEqual(parse_term("(Z, {})"),
                         Record((("fst", Cons("Z", Record(()))), ("snd", Record(())))))
        self.assertEqual(parse_type("{} × {}"), pair(Prod(()), Prod(())))

    def test_constructors(self):
        self.assertEqual(parse_term("S (S Z)"),
                         Cons("S", Cons("S", Cons("Z", Record(())))))
        self.assertEqual(parse_term("λn. S n"), Lam("n", Cons("S", Var("n"))))

    def test_list(self):
        expected = Forall(
            "A",
            OForall(
                "a",
                Mu(OVar("a"), "L",
                   Sum((("Nil", Prod(())), ("Cons", pair(TVar("A"), TVar("L"))))))))
        self.assertEqual(parse_type("∀A.∀a.List(A, a)"), expected)

    def test_abbreviation(self):
        prelude = "type Nat(a) = μ_a N.[Z | S of N]"
        a = parse_type("∀b.Nat(b) → Nat(S(b))", prelude)
        body = Sum((("Z", Prod(())), ("S", TVar("N"))))
        self.assertEqual(a.body.domain, Mu(OVar("b"), "N", body))
        self.assertEqual(a.body.codomain.size.pred, OVar("b"))


class Test_DotNotation(unittest.TestCase):
    def test_parsed(self):
        source = parse_program(ISO)
        _, k = source.values
        self.assertEqual(k.type, Arrow(TDot(Global("h"), "T"), TDot(Global("h"), "T")))

    def test_resolved(self):
        iso = parse_type("∃T.∃U.{f : T → U; g : U → T}")
        session = Session(globals_={"h": iso})
        t = session.resolve_dot(TDot(Global("h"), "T"))
        self.assertEqual(t, EpsIn("T", Global("h"), iso.body))
        u = session.resolve_dot(TDot(Global("h"), "U"))
        self.assertIsInstance(u, EpsIn)
        self.assertEqual(u.name, "U")
        self.assertEqual(u.body.get("f"), Arrow(TDot(Global("h"), "T"), TVar("U")))
        self.assertIsInstance(iso.body, Exists)


class Test_Errors(unittest.TestCase):
    def test_end_of_file(self):
        with self.assertRaises(ParseError) as context:
            parse_program("val x = (")
        error = context.exception
        self.assertEqual((error.pos.line, error.pos.column), (1, 9))
        self.assertEqual(str(error), "<input>:1:9: expected a term, reached the end of the file")

    def test_position(self):
        with self.assertRaises(ParseError) as context:
            parse_program("val x = Z\nval y = )", "f.szm")
        self.assertEqual(str(context.exception.pos), "f.szm:2:9")

    def test_duplicates(self):
        for text in ["{l : {}; l : {}}", "[A | A]"]:
            with self.assertRaises(ParseError):
                parse_type(text)
        for text in ["{l = Z; l = Z}", "case Z of Z → Z | Z → Z"]:
            with self.assertRaises(ParseError):
                parse_term(text)
        with self.assertRaises(ParseError):
            parse_program("val x = Z\nval x = Z")

    def test_unbound(self):
        with self.assertRaises(UnboundName):
            parse_term("x")
        with self.assertRaises(UnboundName):
            parse_type("X")
        with self.assertRaises(UnboundName):
            parse_type("μ_a N.N")
        self.assertTrue(issubclass(UnboundName, ParseError))

    def test_unexpected_character(self):
        with self.assertRaises(ParseError):
            parse_term("λx. x $ x")

    def test_trailing_input(self):
        with self.assertRaises(ParseError):
            parse_type("{} {}")


if __name__ == '__main__':
    unittest.main()
