"""
Type checker and interpreter for a Curry-style System F extended with records, polymorphic
variants, existential types and sized inductive and coinductive types. Subtyping is decided by
a syntax-directed semi-algorithm that relies on:

-Local subtyping: judgments of the form "if t has type A then it also has type B", where the
term t is usually a choice operator standing for a counterexample.

-Choice operators: free variables and typing contexts are replaced by closed terms and types
(epsilon terms), so that every judgment handled by the checker is about a closed term.

-Circular proofs: inductive and coinductive types are unfolded with ordinal witnesses, and
repeated judgments are closed by induction hypotheses. The size-change principle is used to
check that the resulting circular proofs are well-founded, both for subtyping and for the
typing of recursive programs.

Programs are written in .szm files, which can be checked, evaluated and rendered as LaTeX
proof trees from the command line (see szm.cli).
"""
__version__ = "0.3.1"
