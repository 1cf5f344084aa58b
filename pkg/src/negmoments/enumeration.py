"""Enumeration and counting of monic, square-free and irreducible polynomials.

Every family is listed in lexicographic order of the coefficient vector
``(c_0, c_1, ..., c_{n-1})`` of its members (``c_0`` varies slowest), which
is the order of ``itertools.product(range(q), repeat=n)``.  The position of a
monic polynomial of degree n in that order is its *lex index*
``sum(c_i * q**(n-1-i))``; contiguous index ranges are the unit of parallel
work everywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import islice, product
from typing import Callable, Iterator

import numpy as np

from .fq import MonicPoly, check_q, is_irreducible, is_squarefree

KINDS = ("monic", "squarefree", "irreducible")


@dataclass(frozen=True)
class FamilySpec:
    q: int
    n: int
    kind: str = "monic"

    def __post_init__(self):
        check_q(self.q)
        if self.n < 0:
            raise ValueError("degree must be >= 0")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")


def mobius_int(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def prime_count(q: int, n: int) -> int:
    """Number of monic irreducibles of degree n: (1/n) sum_{d|n} mu(d) q^(n/d)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = sum(mobius_int(d) * q ** (n // d) for d in range(1, n + 1) if n % d == 0)
    return total // n


def family_count(spec: FamilySpec) -> int:
    q, n = spec.q, spec.n
    if spec.kind == "monic":
        return q**n
    if spec.kind == "squarefree":
        # every polynomial of degree <= 1 is square-free
        return q**n if n <= 1 else q ** (n - 1) * (q - 1)
    return prime_count(q, n) if n >= 1 else 0


def discriminant_family_size(q: int, g: int) -> int:
    """|H_{2g+1}|."""
    return family_count(FamilySpec(q, 2 * g + 1, "squarefree"))


def lex_index(coeffs, q: int) -> int:
    n = len(coeffs) - 1
    idx = 0
    for c in coeffs[:n]:
        idx = idx * q + c
    return idx


def from_lex_index(idx: int, q: int, n: int) -> MonicPoly:
    low = [0] * n
    for i in range(n - 1, -1, -1):
        idx, low[i] = divmod(idx, q)
    return MonicPoly(q, tuple(low) + (1,))


def _keep(kind: str, c: tuple, q: int) -> bool:
    if kind == "monic":
        return True
    if kind == "squarefree":
        return is_squarefree(c, q)
    return is_irreducible(c, q)


def iterate(spec: FamilySpec, start: int = 0, stop: int | None = None) -> Iterator[MonicPoly]:
    """Members of the family whose lex index lies in ``[start, stop)``."""
    q, n = spec.q, spec.n
    total = q**n
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    if spec.kind == "irreducible" and start == 0 and stop == total and n <= 12:
        for c in irreducibles(q, n):
            yield MonicPoly(q, c)
        return
    for low in islice(product(range(q), repeat=n), start, stop):
        c = low + (1,)
        if _keep(spec.kind, c, q):
            yield MonicPoly(q, c)


def split_ranges(total: int, parts: int) -> list[tuple[int, int]]:
    """Cut ``[0, total)`` into ``parts`` contiguous, nearly equal ranges."""
    parts = max(1, min(parts, total)) if total else 1
    base, extra = divmod(total, parts)
    out, lo = [], 0
    for i in range(parts):
        hi = lo + base + (1 if i < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


@lru_cache(maxsize=None)
def irreducibles(q: int, n: int) -> tuple:
    """Monic irreducibles of degree n as coefficient tuples, lex order (cached)."""
    if n < 1:
        return ()
    return tuple(low + (1,) for low in product(range(q), repeat=n) if is_irreducible(low + (1,), q))


def primes_upto(q: int, maxdeg: int) -> list[tuple]:
    """All monic irreducibles of degree <= maxdeg ordered by (degree, lex)."""
    out = []
    for d in range(1, maxdeg + 1):
        out.extend(irreducibles(q, d))
    return out


# ---------------------------------------------------------------------------
# vectorized helpers


def monic_digits(q: int, n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Coefficients c_0..c_{n-1} of M_n members with lex index in [start, stop)."""
    stop = q**n if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        idx, out[:, i] = np.divmod(idx, q)
    return out


def _descending_powers(q: int, n: int) -> np.ndarray:
    return np.array([q ** (n - 1 - i) for i in range(n)], dtype=np.int64)


def _product_indices(p: tuple, q: int, n: int, chunk: int = 1 << 18) -> np.ndarray:
    """Lex indices in M_n of p*h for all h in M_{n - deg p}."""
    m = n - (len(p) - 1)
    toeplitz = np.zeros((m + 1, n + 1))
    for i in range(m + 1):
        toeplitz[i, i : i + len(p)] = p
    weights = _descending_powers(q, n)
    total = q**m
    out = np.empty(total, dtype=np.int64)
    for lo in range(0, total, chunk):
        hi = min(total, lo + chunk)
        h = np.ones((hi - lo, m + 1))
        h[:, :m] = monic_digits(q, m, lo, hi)
        prod = np.rint(h @ toeplitz).astype(np.int64) % q
        out[lo:hi] = prod[:, :n] @ weights
    return out


def multiplicative_table(
    q: int,
    n: int,
    local: Callable[[int, int], float],
    dtype=np.float64,
) -> np.ndarray:
    """Values of a multiplicative function on every f in M_n, in lex order.

    ``local(d, e)`` is the value at P**e for any prime P of degree d.  Prime
    powers of degree <= n/2 are sieved out explicitly; whatever degree is left
    over is a single prime factor of that degree.
    """
    total = q**n
    values = np.ones(total, dtype=dtype)
    if n == 0:
        return values
    smooth = np.zeros(total, dtype=np.int64)
    scratch = np.zeros(total, dtype=np.int8)
    for d in range(1, n // 2 + 1):
        emax = n // d
        factors = np.array([1] + [local(d, e) for e in range(1, emax + 1)], dtype=dtype)
        for p in irreducibles(q, d):
            base = _product_indices(p, q, n)
            scratch[base] = 1
            power = p
            for e in range(2, emax + 1):
                power = _poly_mul_tuple(power, p, q)
                scratch[_product_indices(power, q, n)] = e
            exps = scratch[base].astype(np.int64)
            values[base] *= factors[exps]
            smooth[base] += d * exps
            scratch[base] = 0
    rest = n - smooth
    big = rest > 0
    if big.any():
        leftover = np.unique(rest[big])
        for r in leftover:
            values[rest == r] *= local(int(r), 1)
    return values


def _poly_mul_tuple(a: tuple, b: tuple, q: int) -> tuple:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % q
    return tuple(out)
