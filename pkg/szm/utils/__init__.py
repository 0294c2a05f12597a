"""
Package containing the parser, the LaTeX renderer and configuration helpers.
"""
