"""Quadratic L-functions over F_q[x], their negative moments, and the
Euler-product and sieve quantities that govern them."""

from .fq import MonicPoly, FieldParams, factorize, arith_fn
from .lfunction import LPolynomial, ShiftSpec, l_coeffs, evaluate, check_rh

__version__ = "0.1.0"

__all__ = ["MonicPoly", "FieldParams", "factorize", "arith_fn", "LPolynomial", "ShiftSpec", "l_coeffs", "evaluate", "check_rh"]
