"""
Package containing the abstract syntax of terms, types and ordinals, together with
substitution, alpha-equivalence and printing.
"""
