"""Exact arithmetic for real quadratic fields, p-adic q-expansion calculus,
ordinary projection, tensor-induced representation analysis, and the
admissible-prime sieve.

Subpackages are importable directly:

    from hz.padic import PadicNumber
    from hz.realquad import make_field
"""

__version__ = "0.1.0"
