import io
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout

from szm.cli import INPUT_ERROR, OK, TYPE_ERROR, check_file, run
from szm.utils.io import get_default_configs

DATA = os.path.join("tests", "data")


def data(name):
    return os.path.join(DATA, name)


class Test_CommandLine(unittest.TestCase):
    def run_cli(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = run(["check", *argv])
        return code, out.getvalue(), err.getvalue()

    def test_accepted(self):
        code, out, err = self.run_cli(data("basics.szm"))
        self.assertEqual(code, OK, err)
        lines = out.splitlines()
        self.assertIn("id : ∀X.X → X", lines)
        self.assertEqual(lines[-3:], ["S Z", "False", "{fst = True; snd = Z}"])
        self.assertEqual(err, "")

    def test_examples(self):
        values = {
            "lists.szm": ["Cons {fst = S Z; snd = Cons {fst = S (S Z); snd = Nil}}",
                          "Cons {fst = Z; snd = Cons {fst = S Z; "
                          "snd = Cons {fst = S (S Z); snd = Nil}}}"],
            "scott.szm": ["S Z", "S (S (S Z))"],
            "church.szm": ["S (S Z)", "T", "F"],
            "streams.szm": ["S (S Z)"],
            "id_rebuild.szm": ["S (S (S Z))"],
            "iso.szm": [],
        }
        for name, expected in values.items():
            code, out, err = self.run_cli(data(name))
            self.assertEqual(code, OK, f"{name}: {err}")
            if expected:
                self.assertEqual(out.splitlines()[-len(expected):], expected, name)

    def test_eval_flag(self):
        code, out, _ = self.run_cli(data("basics.szm"), "--eval", "two")
        self.assertEqual(code, OK)
        self.assertEqual(out.splitlines()[-1], "S (S Z)")

    def test_eval_missing(self):
        code, _, err = self.run_cli(data("basics.szm"), "--eval", "missing")
        self.assertEqual(code, INPUT_ERROR)
        self.assertIn("no accepted definition named missing", err)

    def test_rejected(self):
        for name in ["bad_omega.szm", "bad_yx.szm", "bad_clash.szm"]:
            code, _, err = self.run_cli(data(name))
            self.assertEqual(code, TYPE_ERROR, name)
            self.assertIn("is rejected", err)

    def test_missing_file(self):
        code, _, err = self.run_cli(data("does_not_exist.szm"))
        self.assertEqual(code, INPUT_ERROR)
        self.assertTrue(err)

    def test_syntax_error(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "broken.szm")
            with open(path, "w", encoding="utf-8") as f:
                f.write("val x = (")
            code, _, err = self.run_cli(path)
        self.assertEqual(code, INPUT_ERROR)
        self.assertIn("broken.szm:1:9", err)

    def test_step_budget(self):
        for budget in ["5", "1000"]:
            code, _, err = self.run_cli(data("loop.szm"), "--step-budget", budget)
            self.assertEqual(code, TYPE_ERROR, budget)
            self.assertIn("interrupted: last judgment", err)

    def test_configs_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "configs.yaml")
            with open(path, "w", encoding="utf-8") as f:
                f.write("step_budget: 2\n")
            code, _, err = self.run_cli(data("basics.szm"), "--configs", path)
            self.assertEqual(code, TYPE_ERROR)
            self.assertIn("interrupted", err)
            code, _, err = self.run_cli(data("basics.szm"), "--configs", path,
                                        "--step-budget", "100000")
            self.assertEqual(code, OK, err)

    def test_invalid_configs(self):
        with tempfile.TemporaryDirectory() as directory:
            unknown = os.path.join(directory, "configs.yaml")
            with open(unknown, "w", encoding="utf-8") as f:
                f.write("colour: blue\n")
            code, _, err = self.run_cli(data("basics.szm"), "--configs", unknown)
            self.assertEqual(code, INPUT_ERROR)
            self.assertIn("invalid configuration", err)
            extension = os.path.join(directory, "configs.txt")
            with open(extension, "w", encoding="utf-8") as f:
                f.write("")
            code, _, _ = self.run_cli(data("basics.szm"), "--configs", extension)
            self.assertEqual(code, INPUT_ERROR)
        code, _, _ = self.run_cli(data("basics.szm"), "--fuel", "0")
        self.assertEqual(code, INPUT_ERROR)

    def test_proof_latex(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "proofs.tex")
            code, _, err = self.run_cli(data("basics.szm"), "--proof-latex", path)
            self.assertEqual(code, OK, err)
            with open(path, encoding="utf-8") as f:
                text = f.read()
        self.assertIn(r"\begin{document}", text)
        self.assertEqual(text.count(r"\begin{prooftree}"), 7)

    def test_parallel(self):
        code, out, err = self.run_cli(data("basics.szm"), data("bad_clash.szm"), "--jobs", "2")
        self.assertEqual(code, TYPE_ERROR)
        self.assertIn("id : ∀X.X → X", out.splitlines())
        self.assertIn("bad is rejected", err)

    def test_version(self):
        with redirect_stdout(io.StringIO()), self.assertRaises(SystemExit) as context:
            run(["--version"])
        self.assertEqual(context.exception.code, 0)


class Test_CheckFile(unittest.TestCase):
    def test_report(self):
        report = check_file(data("id_rebuild.szm"), get_default_configs(), "id_nat")
        self.assertEqual(report.code, OK)
        self.assertEqual(report.output, ["id_nat : ∀a.(μ_a N.[Z | S of N]) → μ_a N.[Z | S of N]",
                                         "S (S (S Z))", "<fun>"])
        self.assertTrue(report.evaluated)
        self.assertEqual([name for name, _, _ in report.proofs], ["id_nat"])

    def test_first_rejection_stops(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "two.szm")
            with open(path, "w", encoding="utf-8") as f:
                f.write("val bad : {l : {}} = λx. x\nval id : ∀X.X → X = λx. x\neval id\n")
            report = check_file(path, get_default_configs())
        self.assertEqual(report.code, TYPE_ERROR)
        self.assertEqual(report.output, [])
        self.assertEqual(len(report.errors), 1)


if __name__ == '__main__':
    unittest.main()
