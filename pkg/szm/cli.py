"""
File containing the command line interface.

    szm check FILE... [--eval NAME] [--unroll-depth N] [--step-budget N] [--fuel N]
                      [--proof-latex PATH] [--jobs N] [--configs PATH] [--verbose]

Exit codes: 0 when every definition is accepted (and every evaluation succeeds), 1 on a type
error or an evaluation error, 2 on a syntax error or an input/output error.
"""
import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from szm import __version__
from szm.engine.session import Session
from szm.engine.typecheck import check_definition
from szm.errors import EvalError, ParseError, TypeCheckError
from szm.runtime.evaluator import evaluate, show_value
from szm.syntax.judgments import ProofTree
from szm.syntax.printer import show_type
from szm.syntax.terms import Global
from szm.syntax.types import Type
from szm.utils.io import get_default_configs, load_configs, merge_configs
from szm.utils.latex import render_document
from szm.utils.parser import parse_program

logger = logging.getLogger(__name__)

OK, TYPE_ERROR, INPUT_ERROR = 0, 1, 2
_RECURSION_LIMIT = 20000


@dataclass
class FileReport:
    path: str
    code: int = OK
    output: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    proofs: List[Tuple[str, Type, ProofTree]] = field(default_factory=list)
    evaluated: bool = False


def check_file(path: str, configs: dict, eval_name: Optional[str] = None) -> FileReport:
    """
    Parses, checks and evaluates one source file. Checking stops at the first rejected
    definition, since the following ones may depend on it.
    """
    sys.setrecursionlimit(max(sys.getrecursionlimit(), _RECURSION_LIMIT))
    report = FileReport(path)
    try:
        with open(path, encoding="utf-8") as f:
            source = parse_program(f.read(), path)
    except (OSError, ParseError) as e:
        report.code = INPUT_ERROR
        report.errors.append(str(e))
        return report

    session = Session(configs)
    for definition in source.values:
        try:
            result = check_definition(session, definition.name, definition.term,
                                      definition.type)
        except TypeCheckError as e:
            report.code = TYPE_ERROR
            report.errors.append(f"{path}: {definition.name} is rejected: {e}")
            return report
        session.globals[definition.name] = result.type
        report.proofs.append((definition.name, result.type, result.proof))
        line = f"{definition.name} : {show_type(result.type)}"
        if configs["verbose"]:
            line += f"  [{result.steps} steps, {len(result.hypotheses)} hypotheses]"
        report.output.append(line)

    terms = [e.term for e in source.evals]
    if eval_name is not None and eval_name in session.globals:
        terms.append(Global(eval_name))
        report.evaluated = True
    for term in terms:
        try:
            value = evaluate(term, configs["fuel"], source.bodies())
        except EvalError as e:
            report.code = TYPE_ERROR
            report.errors.append(f"{path}: {e}")
            return report
        report.output.append(show_value(value))
    return report


def _arguments(argv: Optional[Sequence[str]]) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="szm", description="Type checker and interpreter for System F with sized types.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    check = commands.add_parser("check", help="Check and evaluate source files")
    check.add_argument("files", nargs="+", metavar="FILE", help="Source files (.szm)")
    check.add_argument("--eval", dest="eval_name", metavar="NAME",
                       help="Evaluate the definition NAME after checking")
    check.add_argument("--unroll-depth", type=int, default=None,
                       help="Maximum number of fixpoint unrolling stages (default 8)")
    check.add_argument("--step-budget", type=int, default=None,
                       help="Rule applications allowed per definition (default 100000)")
    check.add_argument("--fuel", type=int, default=None,
                       help="Evaluation steps allowed per expression (default 1000000)")
    check.add_argument("--proof-latex", metavar="PATH", default=None,
                       help="Write the proofs of the accepted definitions to a LaTeX file")
    check.add_argument("--jobs", type=int, default=None,
                       help="Number of files checked in parallel (default 1)")
    check.add_argument("--configs", metavar="PATH", default=None,
                       help="YAML or JSON file with default values for the options above")
    check.add_argument("--verbose", action="store_true", default=None,
                       help="Print debugging information and proof statistics")
    return parser.parse_args(argv)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Runs the command line interface.

    Parameters
    ----------
    argv : Sequence[str] [Optional]
        Arguments without the program name. By default they are read from sys.argv.

    Returns
    -------
    int
        Exit code: 0 if everything was accepted, 1 on a type or evaluation error, 2 on a
        syntax or input/output error.
    """
    args = _arguments(argv)
    try:
        configs = get_default_configs()
        if args.configs is not None:
            configs = merge_configs(configs, load_configs(args.configs))
        configs = merge_configs(
            configs, {
                "unroll_depth": args.unroll_depth,
                "step_budget": args.step_budget,
                "fuel": args.fuel,
                "jobs": args.jobs,
                "verbose": args.verbose,
                "proof_latex": args.proof_latex,
            })
    except (OSError, NotImplementedError, AssertionError, ValueError) as e:
        print(f"szm: invalid configuration: {e}", file=sys.stderr)
        return INPUT_ERROR
    logging.basicConfig(level=logging.DEBUG if configs["verbose"] else logging.WARNING)

    if configs["jobs"] > 1 and len(args.files) > 1:
        # Unpickling deep proof trees needs the same limit.
        sys.setrecursionlimit(max(sys.getrecursionlimit(), _RECURSION_LIMIT))
        with ProcessPoolExecutor(max_workers=configs["jobs"]) as pool:
            reports = list(
                pool.map(check_file, args.files, [configs] * len(args.files),
                         [args.eval_name] * len(args.files)))
    else:
        reports = [check_file(path, configs, args.eval_name) for path in args.files]

    code = OK
    for report in reports:
        for line in report.output:
            print(line)
        for line in report.errors:
            print(line, file=sys.stderr)
        code = max(code, report.code)

    if args.eval_name is not None and not any(r.evaluated for r in reports) and code == OK:
        print(f"szm: no accepted definition named {args.eval_name}", file=sys.stderr)
        code = INPUT_ERROR

    if configs["proof_latex"] is not None:
        entries = [entry for report in reports for entry in report.proofs]
        try:
            with open(configs["proof_latex"], "w", encoding="utf-8") as f:
                f.write(render_document(entries))
        except OSError as e:
            print(f"szm: cannot write {configs['proof_latex']}: {e}", file=sys.stderr)
            code = max(code, INPUT_ERROR)
    return code


def main() -> int:
    return run()
