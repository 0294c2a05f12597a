"""
Package containing the type checking engine: unification variables, size-change matrices,
induction hypotheses, local subtyping and typing.
"""
