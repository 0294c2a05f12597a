"""
File containing the exceptions raised by the parser, the type checker and the evaluator.
"""


class SzmError(Exception):
    """
    Root of every error reported to the user.
    """


class ParseError(SzmError):
    def __init__(self, message: str, pos=None) -> None:
        """
        Syntax error found while reading a source file.

        Parameters
        ----------
        message : str
            Description of the problem.
        pos : SourcePos [Optional]
            Position where the problem was found. By default it is None.
        """
        super(ParseError, self).__init__(message)
        self.message = message
        self.pos = pos

    def __str__(self) -> str:
        if self.pos is None:
            return self.message
        return f"{self.pos}: {self.message}"


class UnboundName(ParseError):
    """
    A term, type or ordinal name is used before being defined.
    """


class TypeCheckError(SzmError):
    """
    Root of the errors produced while checking a definition.
    """


class Clash(TypeCheckError):
    def __init__(self, term, left, right, reason: str = None) -> None:
        """
        No typing or subtyping rule applies to a local subtyping judgment. Clashes stop the
        proof search immediately.

        Parameters
        ----------
        term : Term
            Subject of the failing judgment.
        left : Type
            Type the term is known to have.
        right : Type
            Type the term is used with.
        reason : str [Optional]
            Short explanation appended to the message. By default it is None.
        """
        super(Clash, self).__init__()
        self.term = term
        self.left = left
        self.right = right
        self.reason = reason

    def __str__(self) -> str:
        from szm.syntax.printer import show_term, show_type
        from szm.syntax.operations import position_of

        message = (f"{show_term(self.term)} has type {show_type(self.left)} "
                   f"and is used with type {show_type(self.right)}")
        if self.reason:
            message += f" ({self.reason})"
        pos = position_of(self.term)
        if pos is not None:
            message = f"{pos}: {message}"
        return message


class OccursCheck(Clash):
    """
    A unification variable would be bound to a type containing it negatively.
    """


class ConstraintClash(Clash):
    """
    The delayed field constraints of a unification variable are not satisfied.
    """


class NoPositiveSolution(Clash):
    """
    An ordinal unification variable has no solution compatible with its bounds.
    """


class Unsolvable(Clash):
    """
    A second-order unification variable admits neither a projection nor an imitation.
    """


class BudgetExhausted(TypeCheckError):
    def __init__(self, last_typing, subtyping) -> None:
        """
        The step budget ran out, which is how a looping subtyping search is interrupted.

        Parameters
        ----------
        last_typing : Typing
            Last typing judgment the checker started.
        subtyping : LocalSub
            Subtyping judgment being proved when the budget ran out.
        """
        super(BudgetExhausted, self).__init__()
        self.last_typing = last_typing
        self.subtyping = subtyping

    def __str__(self) -> str:
        from szm.syntax.printer import show_judgment

        typing = "none" if self.last_typing is None else show_judgment(self.last_typing)
        message = f"interrupted: last judgment {typing}"
        if self.subtyping is not None:
            message += f"\n  while proving {show_judgment(self.subtyping)}"
        return message


class UnrollDepthExceeded(TypeCheckError):
    def __init__(self, term, depth: int) -> None:
        super(UnrollDepthExceeded, self).__init__()
        self.term = term
        self.depth = depth

    def __str__(self) -> str:
        from szm.syntax.printer import show_term

        return (f"fixpoint {show_term(self.term)} still open after {self.depth} unrollings")


class NotWellFounded(TypeCheckError):
    def __init__(self, term, node: int, matrix) -> None:
        """
        The circular proof built for a term contains a loop without strict decrease.

        Parameters
        ----------
        term : Term
            Term whose proof is rejected.
        node : int
            Identifier of the induction hypothesis carrying the offending loop, None when the
            call graph was too large to be checked.
        matrix : SCMatrix
            Idempotent loop matrix without a strictly decreasing diagonal entry, or None.
        """
        super(NotWellFounded, self).__init__()
        self.term = term
        self.node = node
        self.matrix = matrix

    def __str__(self) -> str:
        from szm.engine.scp import format_matrix
        from szm.syntax.printer import show_term

        if self.matrix is None:
            return (f"{show_term(self.term)} has a circular proof whose call graph is too "
                    f"large to be checked")
        return (f"{show_term(self.term)} has a circular proof that is not well-founded "
                f"(hypothesis {self.node}, loop matrix\n{format_matrix(self.matrix)})")


class EvalError(SzmError):
    """
    Root of the errors produced by the evaluator.
    """


class Stuck(EvalError):
    def __init__(self, redex, reason: str) -> None:
        super(Stuck, self).__init__()
        self.redex = redex
        self.reason = reason

    def __str__(self) -> str:
        from szm.syntax.printer import show_term

        return f"evaluation is stuck on {show_term(self.redex)}: {self.reason}"


class FuelExhausted(EvalError):
    def __init__(self, steps: int) -> None:
        super(FuelExhausted, self).__init__()
        self.steps = steps

    def __str__(self) -> str:
        return f"evaluation ran out of fuel after {self.steps} steps"
