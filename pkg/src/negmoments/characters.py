"""Quadratic residue and Jacobi symbols over F_q[x], and the characters chi_D.

Two independent routes to the same symbol live here: :func:`residue_symbol`
raises to the power (|P|-1)/2 modulo an irreducible P, while
:func:`jacobi_symbol` never factors its modulus and instead runs a Euclidean
reduction driven by quadratic reciprocity.

The second half of the module evaluates chi_D(P) for every prime P of small
degree and every D in a lex-index range at once, which is what the family
computations are built on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .enumeration import FamilySpec, discriminant_family_size, irreducibles, iterate, monic_digits
from .errors import ResourceCapError
from .fq import MonicPoly, factorize, is_irreducible, pmod, pmul, ppowmod, pscale, trim

DEFAULT_SCALAR_CAP = 200_000


def legendre(a: int, q: int) -> int:
    a %= q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


def _tuple(f) -> tuple:
    return f.coeffs if isinstance(f, MonicPoly) else trim(f)


def residue_symbol(f, P: MonicPoly, check: bool = True) -> int:
    """(f/P) = f^((|P|-1)/2) mod P for a monic irreducible P."""
    q = P.q
    if check and not is_irreducible(P.coeffs, q):
        raise ValueError(f"modulus {P.encode()} is not irreducible")
    r = ppowmod(_tuple(f), (P.norm - 1) // 2, P.coeffs, q)
    if not r:
        return 0
    if r == (1,):
        return 1
    if r == (q - 1,):
        return -1
    raise ValueError(f"modulus {P.encode()} is not irreducible")


def jacobi_symbol(f, Q, q: int | None = None) -> int:
    """Jacobi symbol (f/Q) for monic Q, by reciprocity reduction.

    Each remainder is made monic by pulling out its leading coefficient c,
    whose symbol is legendre(c)**deg(modulus).  For q = 1 mod 4 the
    reciprocity sign is always +1.
    """
    if isinstance(Q, MonicPoly):
        q = Q.q
    b = _tuple(Q)
    if not b or b[-1] != 1:
        raise ValueError("modulus must be monic")
    half = (q - 1) // 2
    a = pmod(_tuple(f), b, q)
    result = 1
    while len(b) > 1:
        if not a:
            return 0
        db = len(b) - 1
        lc = a[-1]
        if lc != 1:
            if legendre(lc, q) == -1 and db & 1:
                result = -result
            a = pscale(a, pow(lc, q - 2, q), q)
        da = len(a) - 1
        if half & 1 and da & 1 and db & 1:
            result = -result
        a, b = pmod(b, a, q), a
    return result


def chi_D(D: MonicPoly, f: MonicPoly) -> int:
    """chi_D(f) = (D/f)."""
    return jacobi_symbol(D, f)


def _family(q: int, g: int, cap: int):
    size = discriminant_family_size(q, g)
    if size > cap:
        raise ResourceCapError(f"|H_{2 * g + 1}| = {size} exceeds cap {cap}")
    return iterate(FamilySpec(q, 2 * g + 1, "squarefree"))


def avg_chi_square(q: int, g: int, f: MonicPoly, cap: int = DEFAULT_SCALAR_CAP) -> Fraction:
    """Exact family average of chi_D(f^2) over H_{2g+1}."""
    f2 = pmul(f.coeffs, f.coeffs, q)
    total = count = 0
    for D in _family(q, g, cap):
        total += jacobi_symbol(D.coeffs, f2, q)
        count += 1
    return Fraction(total, count)


def is_square(f: MonicPoly) -> bool:
    return all(e % 2 == 0 for e in factorize(f).exponents)


def avg_chi_nonsquare(q: int, g: int, f: MonicPoly, cap: int = DEFAULT_SCALAR_CAP) -> Fraction:
    """Exact family average of chi_D(f) over H_{2g+1}, for f not a square."""
    if is_square(f):
        raise ValueError(f"{f.encode()} is a square; use avg_chi_square")
    total = count = 0
    for D in _family(q, g, cap):
        total += jacobi_symbol(D.coeffs, f.coeffs, q)
        count += 1
    return Fraction(total, count)


def square_average_limit(f: MonicPoly) -> Fraction:
    """prod_{P | f} (1 + 1/|P|)^(-1)."""
    out = Fraction(1)
    for p, _ in factorize(f).factors:
        out *= Fraction(p.norm, p.norm + 1)
    return out


# ---------------------------------------------------------------------------
# vectorized character values


def _powers_of_x(P: tuple, q: int, count: int) -> list[tuple]:
    """x^i mod P for i < count, each padded to length deg P."""
    d = len(P) - 1
    out = []
    r: tuple = (1,)
    for _ in range(count):
        out.append(tuple(r) + (0,) * (d - len(r)))
        r = pmod((0,) + tuple(r), P, q)
    return out


@lru_cache(maxsize=4096)
def char_table(P: tuple, q: int) -> np.ndarray:
    """Quadratic character of F_q[x]/P indexed by residue code sum r_j q^j."""
    d = len(P) - 1
    size = q**d
    digits = np.empty((size, d), dtype=np.int64)
    idx = np.arange(size, dtype=np.int64)
    for j in range(d):
        idx, digits[:, j] = np.divmod(idx, q)
    conv = np.zeros((size, 2 * d - 1), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            conv[:, i + j] += digits[:, i] * digits[:, j]
    red = np.array(_powers_of_x(P, q, 2 * d - 1), dtype=np.int64)
    squares = (conv @ red) % q
    weights = q ** np.arange(d, dtype=np.int64)
    codes = squares @ weights
    table = np.full(size, -1, dtype=np.int8)
    table[codes] = 1
    table[0] = 0
    return table


@dataclass
class PrimeSums:
    """Per-D prime statistics for monic D of degree n over a lex-index range.

    ``chi[:, d-1]`` is sum_{deg P = d} chi_D(P) and ``coprime[:, d-1]`` counts
    the degree-d primes not dividing D.
    """

    squarefree: np.ndarray
    chi: np.ndarray
    coprime: np.ndarray


@lru_cache(maxsize=256)
def _degree_block(q: int, n: int, d: int):
    primes = irreducibles(q, d)
    cols = []
    tops = []
    for P in primes:
        pw = _powers_of_x(P, q, n + 1)
        cols.append(np.array(pw[:n], dtype=np.float64))
        tops.append(pw[n])
    X = np.concatenate(cols, axis=1) if cols else np.zeros((n, 0))
    top = np.array(tops, dtype=np.float64).reshape(-1)
    tables = np.stack([char_table(P, q) for P in primes]) if primes else np.zeros((0, 1), np.int8)
    return primes, X, top, tables


@lru_cache(maxsize=256)
def _square_block(q: int, n: int, d: int):
    out = []
    for P in irreducibles(q, d):
        P2 = pmul(P, P, q)
        pw = _powers_of_x(P2, q, n + 1)
        out.append((np.array(pw[:n], dtype=np.int64), np.array(pw[n], dtype=np.int64)))
    return out


def prime_sums(q: int, n: int, maxdeg: int, start: int, stop: int, max_cells: int = 1 << 22) -> PrimeSums:
    """chi_D(P) sums for every monic D of degree n with lex index in [start, stop)."""
    count = stop - start
    digits = monic_digits(q, n, start, stop)
    fdigits = digits.astype(np.float64)
    chi = np.zeros((count, maxdeg), dtype=np.int64)
    coprime = np.zeros((count, maxdeg), dtype=np.int64)
    squarefree = np.ones(count, dtype=bool)
    sq_limit = n // 2
    for d in range(1, max(maxdeg, sq_limit) + 1):
        primes, X, top, tables = _degree_block(q, n, d)
        npr = len(primes)
        if npr == 0:
            continue
        weights = q ** np.arange(d, dtype=np.int32)
        step = max(1, max_cells // max(1, npr * d))
        for lo in range(0, count, step):
            hi = min(count, lo + step)
            # exact in float64: entries stay far below 2**53
            resid = (fdigits[lo:hi] @ X + top).astype(np.int32) % q
            codes = np.einsum("ijk,k->ij", resid.reshape(hi - lo, npr, d), weights)
            vals = tables[np.arange(npr)[None, :], codes]
            if d <= maxdeg:
                chi[lo:hi, d - 1] = vals.sum(axis=1, dtype=np.int64)
                coprime[lo:hi, d - 1] = np.count_nonzero(vals, axis=1)
            if d <= sq_limit:
                rows, cols = np.nonzero(vals == 0)
                if rows.size:
                    sqb = _square_block(q, n, d)
                    for j in np.unique(cols):
                        sel = rows[cols == j] + lo
                        X2, top2 = sqb[j]
                        r2 = (digits[sel] @ X2 + top2) % q
                        squarefree[sel[~r2.any(axis=1)]] = False
    return PrimeSums(squarefree, chi, coprime)
