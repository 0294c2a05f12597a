"""
Package containing the call-by-value evaluator used to run programs.
"""
