"""
File containing judgments and the proof trees built by the checker.
"""
from dataclasses import dataclass, field
from typing import Iterator, List, Optional

from szm.syntax.ordinals import PosCtx
from szm.syntax.terms import Term
from szm.syntax.types import Type


@dataclass(frozen=True)
class Typing:
    ctx: PosCtx
    term: Term
    type: Type


@dataclass(frozen=True)
class LocalSub:
    """
    Local subtyping γ ⊢ t : A ⊂ B: if t has type A then it also has type B.
    """
    ctx: PosCtx
    term: Term
    left: Type
    right: Type


@dataclass
class HypothesisLink:
    """
    Reference from a generalisation node to an induction hypothesis. The matrix relates the
    parameters of the enclosing hypothesis (rows) to the arguments of this use (columns).
    """
    node: int
    matrix: object = None


@dataclass
class ProofTree:
    label: str
    conclusion: object
    premises: List["ProofTree"] = field(default_factory=list)
    link: Optional[HypothesisLink] = None

    def walk(self) -> Iterator["ProofTree"]:
        """
        Yields the nodes of the tree in prefix order.
        """
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.premises))

    def labels(self) -> List[str]:
        return [node.label for node in self.walk()]

    def size(self) -> int:
        return sum(1 for _ in self.walk())


def leaf(label: str, conclusion, link: HypothesisLink = None) -> ProofTree:
    return ProofTree(label, conclusion, [], link)
