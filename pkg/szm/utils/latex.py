"""
File containing the LaTeX rendering of proof trees with the bussproofs package.
"""
from typing import Iterable, List, Tuple

from szm.syntax.judgments import ProofTree
from szm.syntax.printer import show_judgment, show_type
from szm.syntax.types import Type

_SYMBOLS = {
    "⊢": r"\vdash ",
    "⊂": r"\subset ",
    "→": r"\to ",
    "∀": r"\forall ",
    "∃": r"\exists ",
    "μ": r"\mu ",
    "ν": r"\nu ",
    "λ": r"\lambda ",
    "Λ": r"\Lambda ",
    "∞": r"\infty ",
    "∧": r"\wedge ",
    "∨": r"\vee ",
    "×": r"\times ",
    "{": r"\{",
    "}": r"\}",
    "?": r"\mathord{?}",
    "#": r"\#",
    "%": r"\%",
    "&": r"\&",
    "$": r"\$",
    "~": r"\sim ",
    "\\": r"\backslash ",
    " ": r"\ ",
}
_GREEK = dict(zip("αβγδεζηθικξοπρστυφχψω",
                  ["alpha", "beta", "gamma", "delta", "varepsilon", "zeta", "eta", "theta", "iota",
                   "kappa", "xi", "o", "pi", "rho", "sigma", "tau", "upsilon", "varphi", "chi",
                   "psi", "omega"]))
_INFERENCES = {1: "UnaryInfC", 2: "BinaryInfC", 3: "TrinaryInfC", 4: "QuaternaryInfC",
               5: "QuinaryInfC"}


def _subscript_end(text: str, start: int) -> int:
    depth, i = 0, start
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            if depth == 0:
                break
            depth -= 1
        elif depth == 0 and (ch.isspace() or ch in ".,;:"):
            break
        i += 1
    return i


def to_latex_math(text: str) -> str:
    """
    Converts the Unicode output of the pretty printer to LaTeX math mode. Subscripts such as
    the size of μ_κ_3 X are grouped.
    """
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "_" and i + 1 < len(text):
            end = _subscript_end(text, i + 1)
            out.append("_{" + to_latex_math(text[i + 1:end]) + "}")
            i = end
            continue
        if ch in _SYMBOLS:
            out.append(_SYMBOLS[ch])
        elif ch in _GREEK:
            out.append(f"\\{_GREEK[ch]} ")
        else:
            out.append(ch)
        i += 1
    return "".join(out)


def _render(node: ProofTree, lines: List[str]) -> None:
    premises = list(node.premises)
    if node.conclusion is None:
        conclusion = r"$\cdots$"
    else:
        conclusion = f"${to_latex_math(show_judgment(node.conclusion))}$"
    if not premises:
        lines.append(r"\AxiomC{}")
    while len(premises) > 5:
        # bussproofs has no rule with more than five premises: the last ones are grouped.
        premises = premises[:4] + [ProofTree("", None, premises[4:])]
    for premise in premises:
        _render(premise, lines)
    if node.label:
        lines.append(f"\\RightLabel{{${to_latex_math(node.label)}$}}")
    lines.append(f"\\{_INFERENCES[max(len(premises), 1)]}{{{conclusion}}}")


def render_proof_latex(proof: ProofTree) -> str:
    """
    Renders a proof tree as a bussproofs prooftree environment. Rule labels are written on the
    right of the inference lines, leaves are axioms with an empty premise.
    """
    lines = [r"\begin{prooftree}"]
    _render(proof, lines)
    lines.append(r"\end{prooftree}")
    return "\n".join(lines) + "\n"


def render_document(entries: Iterable[Tuple[str, Type, ProofTree]]) -> str:
    """
    Standalone article with one proof tree per checked definition, each one preceded by the
    statement of the definition.

    Parameters
    ----------
    entries : Iterable[Tuple[str, Type, ProofTree]]
        Name, declared type and proof of each accepted definition.

    Returns
    -------
    str
        The LaTeX source. Without entries the document body is empty.
    """
    body = []
    for name, a, proof in entries:
        body.append(f"\\noindent${to_latex_math(name)} : {to_latex_math(show_type(a))}$\n")
        body.append("\\begin{center}\\scriptsize\n" + render_proof_latex(proof)
                    + "\\end{center}\n")
    return ("\\documentclass{article}\n"
            "\\usepackage{amssymb}\n"
            "\\usepackage{bussproofs}\n"
            "\\begin{document}\n" + "".join(body) + "\\end{document}\n")
