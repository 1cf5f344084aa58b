"""zeta_q, Z(u), the arithmetic constant A(beta) and two series identities.

A(beta) is the Euler product

    prod_P (1 + sum_{j=1}^{[k/2]} C(k,2j) |P|^{-j(1+2beta)} (1+1/|P|)^{-1})
           * (1 - |P|^{-(1+2beta)})^{C(k,2)}

and it is accumulated as a sum of logarithms over degrees in ascending
order, pi_q(n) copies per degree.  The truncation tail is a rigorous bound
(see :func:`a_const_tail`), not an estimate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .enumeration import FamilySpec, iterate, multiplicative_table, prime_count
from .errors import ResourceCapError
from .fq import check_q, factorize

POLE_TOL = 1e-12


@dataclass(frozen=True)
class EulerValue:
    value: complex | float
    tail_bound: float
    cutoff_degree: int


def zeta_q(s: complex, q: int) -> complex:
    """1 / (1 - q^(1-s))."""
    denom = 1 - q ** (1 - s)
    if abs(denom) < POLE_TOL:
        raise ValueError(f"s = {s} is within {POLE_TOL} of a pole of zeta_q")
    return 1 / denom


def Z(u: complex, q: int) -> complex:
    """Z(u) = sum_f u^deg f = 1 / (1 - q u)."""
    denom = 1 - q * u
    if abs(denom) < POLE_TOL:
        raise ValueError(f"u = {u} is within {POLE_TOL} of the pole 1/q")
    return 1 / denom


def _log1p(y):
    """log(1+y), accurate for small complex y too."""
    if not isinstance(y, complex):
        return math.log1p(y)
    if abs(y) < 1e-4:
        return y - y * y / 2 + y**3 / 3 - y**4 / 4
    return cmath.log(1 + y)


def _local_log(k: int, x, n: int, q: int):
    """log of one degree-n Euler factor with x = |P|^-(1+2beta).

    Both logs go through log1p: the factor differs from 1 by far less than
    machine epsilon at moderate n, yet it is multiplied by pi_q(n) ~ q^n/n.
    """
    w = 1 / (1 + q ** (-n))
    y = sum(comb(k, 2 * j) * x**j for j in range(1, k // 2 + 1)) * w
    return _log1p(y) + comb(k, 2) * _log1p(-x)


def _kappa(k: int, xmax: float) -> float:
    C = comb(k, 2)
    s1 = sum(comb(k, 2 * j) for j in range(1, k // 2 + 1))
    s2 = s1 - (comb(k, 2) if k >= 2 else 0)
    return C + s2 + s1 * s1 / 2 + C / (2 * (1 - xmax))


def a_const_tail(k: int, beta_re: float, cutoff: int, q: int) -> float:
    """Bound on |sum over degrees > cutoff of pi_q(n) log(factor)|.

    With x = q^-n(1+2b) each factor's log is the first-order term
    -C(k,2) x/(|P|+1) plus quadratic terms in x, so it is at most
    kappa * q^-n(2+2b).  Using pi_q(n) <= q^n/n the remaining degrees sum to
    at most kappa/(cutoff+1) * rho^(cutoff+1)/(1-rho), rho = q^-(1+2b).
    """
    if k == 1:
        return 0.0
    rho = q ** -(1 + 2 * beta_re)
    xmax = rho ** (cutoff + 1)
    return _kappa(k, xmax) / (cutoff + 1) * rho ** (cutoff + 1) / (1 - rho)


def a_const(k: int, beta, cutoff: int, q: int) -> EulerValue:
    """A(beta) over primes of degree <= cutoff, with an absolute tail bound."""
    check_q(q)
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    b_re = beta.real if isinstance(beta, complex) else float(beta)
    if b_re < 0:
        raise ValueError("Re beta must be >= 0")
    if k == 1:
        return EulerValue(1.0, 0.0, cutoff)
    re_parts, im_parts = [], []
    for n in range(1, cutoff + 1):
        x = q ** (-n * (1 + 2 * beta))
        v = prime_count(q, n) * _local_log(k, x, n, q)
        if isinstance(v, complex):
            re_parts.append(v.real)
            im_parts.append(v.imag)
        else:
            re_parts.append(v)
    total = math.fsum(re_parts)
    if im_parts:
        value = cmath.exp(complex(total, math.fsum(im_parts)))
    else:
        value = math.exp(total)
    tail = a_const_tail(k, b_re, cutoff, q)
    return EulerValue(value, abs(value) * math.expm1(tail), cutoff)


# ---------------------------------------------------------------------------
# the square-term sum


def square_sum_local(k: int, d: int, e: int, q: int) -> float:
    """Contribution of P^e (deg P = d) to the square-term sum, before |l|^-(1+2b)."""
    return comb(k, 2 * e) / (1 + q ** (-d))


def square_sum_oracle(k: int, beta: float, maxdeg: int, q: int, cap: int = 50_000_000) -> float:
    """sum over tuples (h_1..h_k) with h_1...h_k = l^2, deg l <= maxdeg.

    Each tuple contributes prod mu(h_j)/|h_j|^(1/2+b) * prod_{P | l}
    (1+1/|P|)^-1.  Square-free h_j multiplying to l^2 place each P^e || l in
    exactly 2e of the k slots, so grouping by l gives C(k,2e) per prime power
    and all Mobius signs cancel.
    """
    check_q(q)
    if q**maxdeg > cap:
        raise ResourceCapError(f"q^maxdeg = {q ** maxdeg} exceeds cap {cap}")
    terms = []
    for n in range(maxdeg + 1):
        vals = multiplicative_table(q, n, lambda d, e: square_sum_local(k, d, e, q))
        terms.append(math.fsum(vals.tolist()) * q ** (-n * (1 + 2 * beta)))
    return math.fsum(terms)


def square_sum_bruteforce(k: int, beta: float, maxdeg: int, q: int) -> float:
    """Literal tuple enumeration; only for very small k, q, maxdeg."""
    pool = []
    for n in range(2 * maxdeg + 1):
        for f in iterate(FamilySpec(q, n, "squarefree")):
            primes = frozenset(p.coeffs for p, _ in factorize(f).factors)
            mu = -1 if len(primes) % 2 else 1
            pool.append((n, primes, mu * q ** (-n * (0.5 + beta))))
    terms = []

    def rec(depth, budget, odd, support, weight):
        if depth == k:
            if not odd:
                local = 1.0
                for p in support:
                    local /= 1 + q ** (-(len(p) - 1))
                terms.append(weight * local)
            return
        for n, primes, w in pool:
            if n <= budget:
                rec(depth + 1, budget - n, odd ^ primes, support | primes, weight * w)

    rec(0, 2 * maxdeg, frozenset(), frozenset(), 1.0)
    return math.fsum(terms)


def square_sum_tail(k: int, beta: float, maxdeg: int, q: int) -> float:
    """Bound on the degrees > maxdeg omitted by :func:`square_sum_oracle`.

    C(k,2e) <= C(m+e-1, e) with m = C(k,2), so each l is majorised by the
    m-fold divisor function, whose degree-n sum is C(n+m-1, m-1) q^n.
    """
    m = comb(k, 2)
    if m == 0:
        return 0.0
    rho = q ** (-2 * beta)
    if rho >= 1:
        return math.inf
    total, n = [], maxdeg + 1
    while True:
        t = comb(n + m - 1, m - 1) * rho**n
        # term ratios only decrease with n, so once below 1 the rest is
        # bounded by a geometric series
        ratio = (n + m) / (n + 1) * rho
        if ratio < 1 and (ratio < 0.5 or t / (1 - ratio) <= 1e-6 * math.fsum(total)):
            total.append(t / (1 - ratio))
            return math.fsum(total)
        total.append(t)
        n += 1


def euler_prediction(k: int, beta: float, q: int, cutoff: int = 40) -> EulerValue:
    """zeta_q(1+2b)^C(k,2) * A(b) with the tail of A carried through."""
    A = a_const(k, beta, cutoff, q)
    z = zeta_q(1 + 2 * beta, q) ** comb(k, 2)
    return EulerValue(z * A.value, abs(z) * A.tail_bound, cutoff)


# ---------------------------------------------------------------------------
# tau(l^2) generating series


def tau_square_sums(q: int, maxdeg: int) -> list[int]:
    """sum over monic l of degree n of tau(l^2), for n = 0..maxdeg."""
    return [int(multiplicative_table(q, n, lambda d, e: 2 * e + 1, dtype=np.int64).sum()) for n in range(maxdeg + 1)]


def tau_closed_form(q: int, beta, n: int):
    """u^n coefficient of Z(u/q^(1+2b))^3 / Z(u^2/q^(2+4b)).

    The quotient is (1 - u^2 q^-(1+4b)) / (1 - u q^-2b)^3.
    """
    if beta == 0:
        return Fraction(comb(n + 2, 2)) - Fraction(comb(n, 2), q)
    return q ** (-2 * n * beta) * (comb(n + 2, 2) - comb(n, 2) / q)


def tau_series_check(q: int, beta: float, maxdeg: int, tol: float = 1e-10) -> bool:
    """Brute-force series vs. closed form, coefficient by coefficient."""
    sums = tau_square_sums(q, maxdeg)
    for n, s in enumerate(sums):
        if beta == 0:
            if Fraction(s, q**n) != tau_closed_form(q, 0, n):
                return False
        else:
            lhs = s * q ** (-n * (1 + 2 * beta))
            rhs = tau_closed_form(q, beta, n)
            if abs(lhs - rhs) > tol * max(1.0, abs(rhs)):
                return False
    return True
