"""L-polynomials L(u, chi_D) for D in H_{2g+1}.

For a single discriminant the coefficients are the character sums
c_n = sum_{f in M_n} chi_D(f), taken literally.  Whole families go through
:func:`family_coeffs`, which gets the same integers from the Euler product:
the power sums of the inverse roots are

    s_n = sum_{d | n} d * sum_{deg P = d} chi_D(P)^(n/d)

and Newton's identities n c_n = sum_{i=1}^n s_i c_{n-i} turn them into
coefficients.  Only primes of degree <= g are needed because the upper half
of the polynomial follows from c_{2g-n} = q^(g-n) c_n.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np

from .characters import _powers_of_x, char_table, jacobi_symbol, prime_sums
from .enumeration import discriminant_family_size, lex_index, monic_digits
from .errors import ResourceCapError
from .fq import MonicPoly, decode, encode, factorize, is_squarefree

log = logging.getLogger(__name__)

CHUNK = 1 << 15
DEFAULT_RESOURCE_CAP = 50_000_000


@dataclass(frozen=True)
class ShiftSpec:
    beta: float
    t: float = 0.0
    k: float = 1.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")


@dataclass(frozen=True)
class LPolynomial:
    q: int
    g: int
    coeffs: tuple
    direct: bool = field(default=False, compare=False)  # every coefficient summed directly

    def __post_init__(self):
        if len(self.coeffs) != 2 * self.g + 1:
            raise ValueError(f"expected {2 * self.g + 1} coefficients, got {len(self.coeffs)}")
        if self.coeffs[0] != 1:
            raise ValueError("constant coefficient must be 1")


def symmetric_fill(half, q: int, g: int) -> tuple:
    """Complete (c_0..c_g) to (c_0..c_{2g}) with c_{2g-n} = q^(g-n) c_n."""
    half = [int(c) for c in half]
    return tuple(half + [q ** (g - n) * half[n] for n in range(g - 1, -1, -1)])


def character_sum(D: MonicPoly, n: int) -> int:
    """sum over monic f of degree n of chi_D(f)."""
    q = D.q
    return sum(jacobi_symbol(D.coeffs, low + (1,), q) for low in product(range(q), repeat=n))


def character_sums_table(D: MonicPoly, nmax: int) -> list[int]:
    """sum_{f in M_n} chi_D(f) for n <= nmax, all f at once.

    Reciprocity gives (D/f) = (-1)^(deg D deg f (q-1)/2) (f/D), and for
    square-free D the symbol (f/D) is the product over primes P | D of the
    quadratic character of f mod P, read from a residue table.
    """
    q = D.q
    primes = [p.coeffs for p, _ in factorize(D).factors]
    half = (q - 1) // 2
    out = []
    for n in range(nmax + 1):
        digits = monic_digits(q, n) if n else np.zeros((1, 0), dtype=np.int64)
        chi = np.ones(digits.shape[0], dtype=np.int64)
        for P in primes:
            d = len(P) - 1
            pw = np.array(_powers_of_x(P, q, n + 1), dtype=np.int64)
            resid = (digits @ pw[:n] + pw[n]) % q
            chi *= char_table(P, q)[resid @ (q ** np.arange(d, dtype=np.int64))]
        sign = -1 if (half * D.deg * n) % 2 else 1
        out.append(sign * int(chi.sum()))
    return out


def l_coeffs(D: MonicPoly, validate: bool = False, method: str = "table") -> LPolynomial:
    """L-polynomial of chi_D for D square-free of odd degree 2g+1.

    Coefficients are character sums over M_n, evaluated either through
    residue tables (``method="table"``) or one Jacobi symbol at a time
    (``method="jacobi"``).  With ``validate`` every coefficient up to 2g is
    summed directly, so the functional equation becomes a genuine check
    instead of a construction.
    """
    n = D.deg
    if n % 2 == 0:
        raise ValueError(f"deg D = {n} is even; the family needs odd degree")
    if not is_squarefree(D.coeffs, D.q):
        raise ValueError(f"D = {D.encode()} is not square-free")
    if method not in ("table", "jacobi"):
        raise ValueError(f"unknown method {method!r}")
    g = (n - 1) // 2
    top = 2 * g if validate else g
    if method == "table":
        sums = character_sums_table(D, top)
    else:
        sums = [character_sum(D, m) for m in range(top + 1)]
    if validate:
        return LPolynomial(D.q, g, tuple(sums), direct=True)
    return LPolynomial(D.q, g, symmetric_fill(sums, D.q, g))


def check_functional_equation(L: LPolynomial) -> bool:
    """c_{2g-n} == q^(g-n) c_n for every n, in exact integers."""
    c, q, g = L.coeffs, L.q, L.g
    return all(c[2 * g - n] == q ** (g - n) * c[n] for n in range(g + 1))


def evaluate(L: LPolynomial, shift: ShiftSpec) -> complex:
    """L at u = q^-(1/2 + beta + i t) by Horner's rule."""
    u = L.q ** (-complex(0.5 + shift.beta, shift.t))
    acc = 0j
    for c in reversed(L.coeffs):
        acc = acc * u + c
    return acc


def evaluate_real(L: LPolynomial, beta: float) -> float:
    u = L.q ** -(0.5 + beta)
    acc = 0.0
    for c in reversed(L.coeffs):
        acc = acc * u + c
    return acc


# ---------------------------------------------------------------------------
# Riemann hypothesis check


def _rational_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    while any(b):
        while b and b[-1] == 0:
            b = b[:-1]
        r = list(a)
        while len(r) >= len(b) and any(r):
            c = r[-1] / b[-1]
            off = len(r) - len(b)
            for i, x in enumerate(b):
                r[off + i] -= c * x
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        a, b = b, r
    return a


def squarefree_part(coeffs) -> list[Fraction]:
    """f / gcd(f, f') over Q, low degree first."""
    f = [Fraction(int(c)) for c in coeffs]
    df = [i * f[i] for i in range(1, len(f))]
    gcd = _rational_gcd(f, df) if any(df) else f
    if len(gcd) <= 1:
        return f
    # exact long division f / gcd
    r = list(f)
    quo = [Fraction(0)] * (len(f) - len(gcd) + 1)
    for i in range(len(quo) - 1, -1, -1):
        c = r[i + len(gcd) - 1] / gcd[-1]
        quo[i] = c
        for j, x in enumerate(gcd):
            r[i + j] -= c * x
    return quo


def lpoly_roots(L: LPolynomial) -> np.ndarray:
    """Roots of L(u) from a balanced companion matrix.

    Repeated roots are removed first (exact square-free part) and the
    variable is rescaled to v = sqrt(q) u so the roots sit near |v| = 1.
    """
    if L.g == 0:
        return np.zeros(0, dtype=complex)
    sf = squarefree_part(L.coeffs)
    scale = math.sqrt(L.q)
    a = np.array([float(c) / scale**i for i, c in enumerate(sf)])
    a = a / a[-1]
    m = len(a) - 1
    comp = np.zeros((m, m))
    comp[1:, :-1] = np.eye(m - 1)
    comp[:, -1] = -a[:-1]
    return np.linalg.eigvals(comp) / scale


def rh_deviation(L: LPolynomial) -> float:
    """max over roots of | |root| - q^(-1/2) |."""
    roots = lpoly_roots(L)
    if roots.size == 0:
        return 0.0
    return float(np.max(np.abs(np.abs(roots) - L.q**-0.5)))


def check_rh(L: LPolynomial, tol: float = 1e-8) -> bool:
    if L.g == 0:
        return True
    try:
        return rh_deviation(L) <= tol
    except np.linalg.LinAlgError as exc:
        log.warning("eigensolver failed for q=%d g=%d: %s", L.q, L.g, exc)
        return False


# ---------------------------------------------------------------------------
# whole families


@dataclass
class Family:
    """L-polynomial coefficients c_0..c_m for every D in H_{2g+1}, lex order."""

    q: int
    g: int
    indices: np.ndarray  # lex index of D in M_{2g+1}
    coeffs: np.ndarray  # shape (size, m+1), m = g or 2g

    @property
    def size(self) -> int:
        return int(self.indices.size)

    def full(self) -> np.ndarray:
        """All 2g+1 coefficients, upper half from the functional equation."""
        g, q = self.g, self.q
        c = self.coeffs[:, : g + 1]
        upper = [c[:, n] * q ** (g - n) for n in range(g - 1, -1, -1)]
        return np.column_stack([c] + upper) if upper else c.copy()

    def poly(self, i: int) -> MonicPoly:
        from .enumeration import from_lex_index

        return from_lex_index(int(self.indices[i]), self.q, 2 * self.g + 1)


def newton_coeffs(chi: np.ndarray, coprime: np.ndarray, m: int) -> np.ndarray:
    """c_0..c_m from per-degree prime character sums (columns = degree - 1)."""
    count = chi.shape[0]
    power = np.zeros((count, m + 1), dtype=np.int64)
    for n in range(1, m + 1):
        for d in range(1, n + 1):
            if n % d == 0:
                col = chi[:, d - 1] if (n // d) % 2 else coprime[:, d - 1]
                power[:, n] += d * col
    c = np.zeros((count, m + 1), dtype=np.int64)
    c[:, 0] = 1
    for n in range(1, m + 1):
        acc = np.zeros(count, dtype=np.int64)
        for i in range(1, n + 1):
            acc += power[:, i] * c[:, n - i]
        c[:, n] = acc // n
    return c


def _chunk_coeffs(q: int, g: int, m: int, lo: int, hi: int):
    sums = prime_sums(q, 2 * g + 1, m, lo, hi)
    keep = np.flatnonzero(sums.squarefree)
    coeffs = newton_coeffs(sums.chi[keep], sums.coprime[keep], m)
    return keep + lo, coeffs


def check_cap(q: int, g: int, cap: int = DEFAULT_RESOURCE_CAP) -> int:
    size = discriminant_family_size(q, g)
    if size > cap:
        raise ResourceCapError(f"family H_{2 * g + 1} over F_{q} has {size} members, cap is {cap}")
    if q ** (2 * g) >= 2**62:
        raise ResourceCapError("coefficients would overflow 64-bit integers")
    return size


def family_coeffs(
    q: int,
    g: int,
    validate: bool = False,
    threads: int = 1,
    cap: int = DEFAULT_RESOURCE_CAP,
) -> Family:
    """Coefficients for all of H_{2g+1}; ``validate`` computes up to 2g directly.

    Work is cut into fixed lex-index chunks independent of ``threads`` and
    reassembled in chunk order, so the result never depends on scheduling.
    """
    check_cap(q, g, cap)
    m = 2 * g if validate else g
    total = q ** (2 * g + 1)
    bounds = [(lo, min(total, lo + CHUNK)) for lo in range(0, total, CHUNK)]
    if m == 0:
        idx = np.arange(total, dtype=np.int64)
        return Family(q, g, idx, np.ones((total, 1), dtype=np.int64))

    def work(b):
        return _chunk_coeffs(q, g, m, *b)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    idx = np.concatenate([p[0] for p in parts])
    coeffs = np.concatenate([p[1] for p in parts])
    return Family(q, g, idx, coeffs)


def family_values(family: Family, beta: float, t: float = 0.0) -> np.ndarray:
    """L(1/2 + beta + i t, chi_D) for every D; real when t == 0."""
    full = family.full()
    if t == 0:
        u = family.q ** -(0.5 + beta)
        acc = np.zeros(family.size)
    else:
        u = family.q ** -complex(0.5 + beta, t)
        acc = np.zeros(family.size, dtype=complex)
    for n in range(full.shape[1] - 1, -1, -1):
        acc = acc * u + full[:, n]
    return acc


def pointwise_bound_findings(family: Family, betas, eps: float = 0.5, t: float = 0.0) -> list[dict]:
    """Where 1/|L| exceeds exp((1+eps) g/log_q(g) log(1/beta)).

    The bound is asymptotic in g, so these are findings, not failures.
    """
    g, q = family.g, family.q
    if g < 2:
        raise ValueError("the bound needs g >= 2")
    logq_g = math.log(g) / math.log(q)
    findings = []
    for beta in betas:
        bound = math.exp((1 + eps) * g / logq_g * math.log(1 / beta))
        inv = 1.0 / np.abs(family_values(family, beta, t))
        worst = int(np.argmax(inv))
        if inv[worst] > bound:
            findings.append({"beta": beta, "D": family.poly(worst).encode(), "inverse": float(inv[worst]), "bound": bound})
    return findings


# ---------------------------------------------------------------------------
# disk cache


class LPolyCache:
    """Text cache, one ``D=<poly>;c=<c_0>,...,<c_g>`` record per line."""

    def __init__(self, path):
        self.path = Path(path)

    @staticmethod
    def format_record(D: str, half) -> str:
        return f"D={D};c={','.join(str(int(c)) for c in half)}"

    def write(self, records) -> int:
        """Write (encoding, half-coefficients) pairs atomically; returns count."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_name(f"{self.path.name}.{os.getpid()}.tmp")
        n = 0
        with open(tmp, "w", encoding="ascii") as fh:
            for D, half in records:
                fh.write(self.format_record(D, half) + "\n")
                n += 1
        os.replace(tmp, self.path)
        return n

    def read(self) -> tuple[list[tuple[str, tuple]], int]:
        """Records plus the number of lines skipped as corrupt."""
        if not self.path.exists():
            return [], 0
        records, bad = [], 0
        with open(self.path, encoding="ascii", errors="replace") as fh:
            text = fh.read()
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        elif lines:
            # no trailing newline: the final record may be cut short
            lines.pop()
            bad += 1
        for line in lines:
            rec = self._parse(line)
            if rec is None:
                bad += 1
            else:
                records.append(rec)
        if bad:
            log.warning("%s: skipped %d corrupt line(s)", self.path, bad)
        return records, bad

    @staticmethod
    def _parse(line: str):
        try:
            dpart, cpart = line.split(";")
            if not (dpart.startswith("D=") and cpart.startswith("c=")):
                return None
            D = dpart[2:]
            half = tuple(int(x) for x in cpart[2:].split(","))
            [int(x) for x in D.split(",")]
        except ValueError:
            return None
        if not half or half[0] != 1:
            return None
        return D, half


def cache_path(cache_dir, q: int, g: int) -> Path:
    return Path(cache_dir) / f"lpoly_q{q}_g{g}.txt"


def save_family(cache_dir, family: Family) -> Path:
    path = cache_path(cache_dir, family.q, family.g)
    half = family.coeffs[:, : family.g + 1]

    def records():
        for i in range(family.size):
            yield encode(family.poly(i).coeffs), half[i]

    LPolyCache(path).write(records())
    return path


def load_family(cache_dir, q: int, g: int) -> Family | None:
    """Family from the cache, or None when missing or incomplete."""
    path = cache_path(cache_dir, q, g)
    records, bad = LPolyCache(path).read()
    if bad or len(records) != discriminant_family_size(q, g):
        return None
    idx = np.empty(len(records), dtype=np.int64)
    coeffs = np.empty((len(records), g + 1), dtype=np.int64)
    for i, (D, half) in enumerate(records):
        c = decode(D, q)
        if len(c) != 2 * g + 2 or len(half) != g + 1:
            return None
        idx[i] = lex_index(c, q)
        coeffs[i] = half
    order = np.argsort(idx, kind="stable")
    return Family(q, g, idx[order], coeffs[order])


def get_family(q: int, g: int, cache_dir=None, threads: int = 1, cap: int = DEFAULT_RESOURCE_CAP) -> Family:
    check_cap(q, g, cap)
    if cache_dir:
        fam = load_family(cache_dir, q, g)
        if fam is not None:
            return fam
    fam = family_coeffs(q, g, threads=threads, cap=cap)
    if cache_dir:
        save_family(cache_dir, fam)
    return fam


def cache_roundtrip(path, records) -> bool:
    """Write ``records`` to ``path``, read them back, and compare exactly."""
    cache = LPolyCache(path)
    records = [(D, tuple(int(c) for c in half)) for D, half in records]
    cache.write(records)
    back, bad = cache.read()
    return bad == 0 and back == records
