"""Arithmetic in F_q and F_q[x] for an odd prime q.

Polynomials are coefficient tuples, lowest degree first, with no trailing
zeros; the zero polynomial is ``()``.  The low-level functions below take
and return such tuples and are what the hot loops use.  :class:`MonicPoly`
is the validated, hashable carrier handed across module boundaries.

The canonical text encoding of a polynomial is its comma-separated residues
from low to high degree, so ``"2,0,1"`` is x^2 + 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, isqrt
from typing import Iterable, Sequence

Poly = tuple  # tuple[int, ...]

# q*q must fit a signed 64-bit word
MAX_Q = 3037000493


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def check_q(q: int) -> int:
    if not isinstance(q, int) or isinstance(q, bool):
        raise TypeError(f"q must be an int, got {type(q).__name__}")
    if q < 3 or q % 2 == 0 or not is_prime(q):
        raise ValueError(f"q must be an odd prime, got {q}")
    if q > MAX_Q:
        raise ValueError(f"q={q} too large: q*q must fit in 64 bits")
    return q


@dataclass(frozen=True)
class FieldParams:
    q: int

    def __post_init__(self):
        check_q(self.q)


# ---------------------------------------------------------------------------
# tuple-level arithmetic


def trim(c: Iterable[int]) -> Poly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def deg(a: Poly) -> int:
    """Degree, with deg(0) = -1."""
    return len(a) - 1


def padd(a: Poly, b: Poly, q: int) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % q
    return trim(out)


def psub(a: Poly, b: Poly, q: int) -> Poly:
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % q
    return trim(out)


def pscale(a: Poly, c: int, q: int) -> Poly:
    c %= q
    if c == 0:
        return ()
    return tuple((x * c) % q for x in a)


def pmul(a: Poly, b: Poly, q: int) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(v % q for v in out)


def pdivmod(a: Poly, b: Poly, q: int) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    db = len(b) - 1
    if len(a) - 1 < db:
        return (), a
    inv = pow(b[-1], q - 2, q)
    r = list(a)
    quo = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = (r[i] * inv) % q
        if c:
            quo[i - db] = c
            off = i - db
            for j in range(db + 1):
                r[off + j] = (r[off + j] - c * b[j]) % q
    return trim(quo), trim(r[:db])


def pmod(a: Poly, b: Poly, q: int) -> Poly:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    db = len(b) - 1
    if len(a) - 1 < db:
        return a
    inv = pow(b[-1], q - 2, q)
    r = list(a)
    for i in range(len(a) - 1, db - 1, -1):
        c = (r[i] * inv) % q
        if c:
            off = i - db
            for j in range(db + 1):
                r[off + j] = (r[off + j] - c * b[j]) % q
    return trim(r[:db])


def monic(a: Poly, q: int) -> Poly:
    if not a:
        return a
    return pscale(a, pow(a[-1], q - 2, q), q)


def pgcd(a: Poly, b: Poly, q: int) -> Poly:
    """Monic gcd; gcd(0, 0) = 0."""
    while b:
        a, b = b, pmod(a, b, q)
    return monic(a, q)


def pderiv(a: Poly, q: int) -> Poly:
    return trim((i * a[i]) % q for i in range(1, len(a)))


def ppowmod(base: Poly, e: int, m: Poly, q: int) -> Poly:
    result: Poly = (1,)
    base = pmod(base, m, q)
    while e:
        if e & 1:
            result = pmod(pmul(result, base, q), m, q)
        e >>= 1
        if e:
            base = pmod(pmul(base, base, q), m, q)
    return pmod(result, m, q)


def pexact_div(a: Poly, b: Poly, q: int) -> Poly:
    quo, rem = pdivmod(a, b, q)
    if rem:
        raise ArithmeticError("inexact polynomial division")
    return quo


# ---------------------------------------------------------------------------
# monic carrier


@dataclass(frozen=True, order=False)
class MonicPoly:
    """A monic polynomial over F_q; ``coeffs`` is low degree first."""

    q: int
    coeffs: tuple

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if not c or c[-1] != 1:
            raise ValueError(f"not monic: {c}")
        if any(x < 0 or x >= self.q for x in c):
            raise ValueError(f"residues must lie in [0, {self.q}): {c}")

    @classmethod
    def one(cls, q: int) -> MonicPoly:
        return cls(q, (1,))

    @classmethod
    def x(cls, q: int) -> MonicPoly:
        return cls(q, (0, 1))

    @classmethod
    def parse(cls, text: str, q: int) -> MonicPoly:
        return cls(q, decode(text, q))

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    @property
    def norm(self) -> int:
        return self.q ** self.deg

    def encode(self) -> str:
        return encode(self.coeffs)

    def __mul__(self, other: MonicPoly) -> MonicPoly:
        return poly_mul(self, other)

    def __pow__(self, e: int) -> MonicPoly:
        out = MonicPoly.one(self.q)
        for _ in range(e):
            out = poly_mul(out, self)
        return out

    def __str__(self) -> str:
        terms = []
        for i in range(self.deg, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}{mono}")
        return " + ".join(terms)


def encode(coeffs: Sequence[int]) -> str:
    return ",".join(str(int(c)) for c in coeffs) if coeffs else "0"


def decode(text: str, q: int) -> Poly:
    """Parse the canonical encoding into a (trimmed) tuple."""
    try:
        vals = [int(tok) for tok in text.strip().split(",")]
    except ValueError:
        raise ValueError(f"malformed polynomial encoding: {text!r}") from None
    if any(v < 0 or v >= q for v in vals):
        raise ValueError(f"residue out of range [0, {q}) in {text!r}")
    return trim(vals)


def _coeffs(a) -> Poly:
    return a.coeffs if isinstance(a, MonicPoly) else trim(a)


def poly_mul(a: MonicPoly, b: MonicPoly) -> MonicPoly:
    if a.q != b.q:
        raise ValueError("operands live over different fields")
    return MonicPoly(a.q, pmul(a.coeffs, b.coeffs, a.q))


def poly_divmod(a, b, q: int | None = None) -> tuple[Poly, Poly]:
    """Divide ``a`` (monic or any coefficient tuple) by ``b``."""
    if q is None:
        q = b.q if isinstance(b, MonicPoly) else a.q
    return pdivmod(_coeffs(a), _coeffs(b), q)


# ---------------------------------------------------------------------------
# factorization


def is_squarefree(f: Poly, q: int) -> bool:
    if len(f) <= 2:
        return True
    return len(pgcd(f, pderiv(f, q), q)) == 1


def is_irreducible(f: Poly, q: int) -> bool:
    """Rabin's test for a monic f of degree >= 1."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = (0, 1)
    for p in _prime_divisors(n):
        h = ppowmod(x, q ** (n // p), f, q)
        if len(pgcd(psub(h, x, q), f, q)) != 1:
            return False
    return ppowmod(x, q**n, f, q) == x


def _prime_divisors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _pth_root(f: Poly, q: int) -> Poly:
    # a^q = a in F_q, so only the exponents shrink
    return trim(f[i] for i in range(0, len(f), q))


def _squarefree_decomposition(f: Poly, q: int) -> list[tuple[Poly, int]]:
    out = []
    if len(f) <= 1:
        return out
    fp = pderiv(f, q)
    if not fp:
        for g, m in _squarefree_decomposition(_pth_root(f, q), q):
            out.append((g, m * q))
        return out
    c = pgcd(f, fp, q)
    w = pexact_div(f, c, q)
    i = 1
    while len(w) > 1:
        y = pgcd(w, c, q)
        z = pexact_div(w, y, q)
        if len(z) > 1:
            out.append((z, i))
        i += 1
        w = y
        c = pexact_div(c, y, q)
    if len(c) > 1:
        for g, m in _squarefree_decomposition(_pth_root(c, q), q):
            out.append((g, m * q))
    return out


def _distinct_degree(f: Poly, q: int) -> list[tuple[Poly, int]]:
    out = []
    x = (0, 1)
    h = x
    i = 1
    while len(f) - 1 >= 2 * i:
        h = ppowmod(h, q, f, q)
        g = pgcd(psub(h, x, q), f, q)
        if len(g) > 1:
            out.append((g, i))
            f = pexact_div(f, g, q)
            h = pmod(h, f, q)
        i += 1
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def _splitters(n: int, q: int):
    """Deterministic candidate sequence: monic polys of degree 1..n-1, lex order."""
    from itertools import product

    for d in range(1, n):
        for low in product(range(q), repeat=d):
            yield tuple(low) + (1,)


def _equal_degree(f: Poly, d: int, q: int) -> list[Poly]:
    if len(f) - 1 == d:
        return [f]
    e = (q**d - 1) // 2
    for a in _splitters(len(f) - 1, q):
        g = pgcd(a, f, q)
        if 1 < len(g) < len(f):
            break
        b = ppowmod(a, e, f, q)
        g = pgcd(psub(b, (1,), q), f, q)
        if 1 < len(g) < len(f):
            break
    else:  # pragma: no cover - cannot happen for a product of distinct primes
        raise ArithmeticError("equal-degree splitting failed")
    return _equal_degree(g, d, q) + _equal_degree(pexact_div(f, g, q), d, q)


@lru_cache(maxsize=65536)
def _factor_tuple(f: Poly, q: int) -> tuple[tuple[Poly, int], ...]:
    exps: dict[Poly, int] = {}
    for part, mult in _squarefree_decomposition(f, q):
        for block, d in _distinct_degree(part, q):
            for p in _equal_degree(block, d, q):
                exps[p] = exps.get(p, 0) + mult
    return tuple(sorted(exps.items()))


@dataclass(frozen=True)
class Factorization:
    q: int
    factors: tuple  # ((MonicPoly, exponent), ...) in lex order of coefficient tuples

    def reconstruct(self) -> MonicPoly:
        out = MonicPoly.one(self.q)
        for p, e in self.factors:
            out = out * p**e
        return out

    @property
    def exponents(self) -> list[int]:
        return [e for _, e in self.factors]


def factorize(f: MonicPoly) -> Factorization:
    parts = _factor_tuple(f.coeffs, f.q)
    return Factorization(f.q, tuple((MonicPoly(f.q, p), e) for p, e in parts))


@dataclass(frozen=True)
class ArithValues:
    mu: int
    omega: int
    Omega: int
    nu: Fraction
    tau_of_square: int


def arith_from_exponents(exps: Sequence[int]) -> ArithValues:
    nu = Fraction(1)
    tau2 = 1
    for e in exps:
        nu /= factorial(e)
        tau2 *= 2 * e + 1
    omega = len(exps)
    mu = 0 if any(e > 1 for e in exps) else (-1) ** omega
    return ArithValues(mu, omega, sum(exps), nu, tau2)


def arith_fn(f: MonicPoly | Factorization) -> ArithValues:
    """mu, omega, Omega, nu and tau(f^2) of a monic polynomial."""
    fac = f if isinstance(f, Factorization) else factorize(f)
    return arith_from_exponents(fac.exponents)
