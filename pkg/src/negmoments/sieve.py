"""Truncated exponentials, the prime weights a_beta(P;N), short Dirichlet
polynomials over primes, and the parameter schedule that splits the primes
into degree intervals.

Everything here depends on a prime P only through its degree, so weights
are computed per degree and multiplied by per-degree character sums.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial

import mpmath
import numpy as np

from .characters import jacobi_symbol, prime_sums
from .enumeration import discriminant_family_size, irreducibles
from .errors import InfeasibleSchedule, ResourceCapError
from .fq import MonicPoly
from .lfunction import CHUNK, DEFAULT_RESOURCE_CAP

REL_TOL = 1e-14
ABS_FLOOR = 1e-30
# below this value of (N+1) beta log q the series needs too many terms
SERIES_MIN_DECAY = 0.05


def e_trunc(ell: int, x) -> float:
    """E_ell(x) = sum_{s <= ell} x^s / s!, summed exactly in rationals."""
    if ell < 0 or ell % 2:
        raise ValueError(f"ell must be even and >= 0, got {ell}")
    fx = Fraction(x)
    n, m = fx.numerator, fx.denominator
    fl = factorial(ell)
    num = 0
    power_n, falling = 1, fl
    for s in range(ell + 1):
        # n^s m^(ell-s) ell!/s!
        num += power_n * m ** (ell - s) * falling
        power_n *= n
        falling //= s + 1
    return float(Fraction(num, m**ell * fl))


def taylor_gap_check(ell: int, xs) -> float:
    """min over xs of (1+e^(-ell/2)) E_ell(x) / e^x - 1; negative means violated."""
    worst = math.inf
    for x in xs:
        if x > ell / math.e**2:
            raise ValueError(f"x = {x} is above ell/e^2")
        worst = min(worst, (1 + math.exp(-ell / 2)) * e_trunc(ell, x) * math.exp(-x) - 1)
    return worst


# ---------------------------------------------------------------------------
# a_beta(P; N)


@dataclass(frozen=True)
class ABetaParams:
    """Parameters of a_beta(.;N) plus the regime-dependent majorant B(N).

    Nbeta >= 1 counts as the large regime (gamma = 0); below it gamma = 1.
    """

    N: int
    beta: float
    t: float
    q: int
    eps: float = 0.05
    gamma: int = field(init=False)
    B: float = field(init=False)

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be > 0")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        small = self.N * self.beta < 1
        object.__setattr__(self, "gamma", 1 if small else 0)
        if small:
            B = 0.5 + self.eps
        else:
            B = 1 + 1 / math.expm1((self.N + 1) * self.beta * math.log(self.q))
        object.__setattr__(self, "B", B)

    def bound(self) -> float:
        """B(N) (log 1/(N beta))^gamma."""
        if self.gamma:
            return self.B * math.log(1 / (self.N * self.beta))
        return self.B


@dataclass(frozen=True)
class ABetaValue:
    value: float
    remainder: float
    terms: int  # 0 when the closed form was used


def _series(d: int, N: int, beta: float, q: int) -> ABetaValue:
    lq = math.log(q)
    rho = math.exp(-(N + 1) * beta * lq)
    lift = math.exp(-2 * (N + 1 - d) * beta * lq)  # rho^2 |P|^(2 beta)
    parts = []
    j = 0
    partial = 0.0
    while True:
        rj = rho**j
        term = (j + 1) * d * rj / (d + j * (N + 1)) - (j + 1) * d * rj * lift / ((j + 2) * (N + 1) - d)
        parts.append(term)
        partial += term
        j += 1
        inc = (j + 1) * rho**j
        if inc < max(REL_TOL * abs(partial), ABS_FLOOR):
            break
    rem = 2 * rho**j * (j + 1 - j * rho) / (1 - rho) ** 2
    return ABetaValue(math.fsum(parts), rem, j)


def _closed_form(d: int, N: int, beta: float, q: int) -> ABetaValue:
    """Both j-sums rewritten as 1/(1-rho) plus Lerch transcendents."""
    with mpmath.workdps(30):
        lq = mpmath.log(q)
        M = N + 1
        rho = mpmath.exp(-M * beta * lq)
        one_minus_rho = -mpmath.expm1(-M * beta * lq)
        one_minus_lift = -mpmath.expm1(-2 * (M - d) * beta * lq)
        lift = 1 - one_minus_lift
        head = d * one_minus_lift / (M * one_minus_rho)
        phi1 = mpmath.lerchphi(rho, 1, mpmath.mpf(d) / M)
        phi2 = mpmath.lerchphi(rho, 1, 2 - mpmath.mpf(d) / M)
        val = head + mpmath.mpf(d * (M - d)) / M**2 * (phi1 + lift * phi2)
        return ABetaValue(float(val), 0.0, 0)


def a_beta_detail(pdeg: int, params: ABetaParams) -> ABetaValue:
    if pdeg < 1:
        raise ValueError("prime degree must be >= 1")
    if pdeg > params.N:
        raise ValueError(f"prime degree {pdeg} exceeds N = {params.N}")
    N, beta, q = params.N, params.beta, params.q
    if (N + 1) * beta * math.log(q) >= SERIES_MIN_DECAY:
        raw = _series(pdeg, N, beta, q)
    else:
        raw = _closed_form(pdeg, N, beta, q)
    c = -math.cos(params.t * pdeg * math.log(q))
    return ABetaValue(c * raw.value, abs(c) * raw.remainder, raw.terms)


def a_beta(pdeg: int, params: ABetaParams) -> float:
    """a_beta(P;N) for any prime P of degree ``pdeg``."""
    return a_beta_detail(pdeg, params).value


def ineq_large_bound(N: int, beta: float, q: int) -> float:
    """1 + 1/(q^((N+1) beta) - 1)."""
    return 1 + 1 / math.expm1((N + 1) * beta * math.log(q))


def ineq_small_bound(N: int, beta: float, eps: float = 0.05) -> float:
    """(1/2 + eps) log(1/(N beta))."""
    return (0.5 + eps) * math.log(1 / (N * beta))


# ---------------------------------------------------------------------------
# Dirichlet polynomials over primes


def _weights(lo: int, hi: int, N: int, beta: float, t: float, q: int) -> list[float]:
    params = ABetaParams(N, beta, t, q)
    return [a_beta(d, params) * q ** (-d * (0.5 + beta)) for d in range(lo + 1, hi + 1)]


def p_interval(D: MonicPoly, lo: int, hi: int, N: int, beta: float, t: float = 0.0) -> float:
    """sum over primes P with lo < deg P <= hi of a_beta(P;N) chi_D(P) / |P|^(1/2+beta)."""
    if hi <= lo:
        return 0.0
    q = D.q
    w = _weights(lo, hi, N, beta, t, q)
    sums = [sum(jacobi_symbol(D.coeffs, P, q) for P in irreducibles(q, d)) for d in range(lo + 1, hi + 1)]
    return math.fsum(wi * si for wi, si in zip(w, sums))


def p_interval_many(chi: np.ndarray, lo: int, hi: int, N: int, beta: float, t: float, q: int) -> np.ndarray:
    """Vectorized p_interval from per-degree character sums (column d-1 = degree d)."""
    if hi <= lo:
        return np.zeros(chi.shape[0])
    w = np.array(_weights(lo, hi, N, beta, t, q))
    # integer sums times weights, degrees added in ascending order
    out = np.zeros(chi.shape[0])
    for i, d in enumerate(range(lo + 1, hi + 1)):
        out = out + w[i] * chi[:, d - 1]
    return out


def prime_majorant(lo: int, hi: int, beta: float, q: int) -> float:
    """sum over lo < deg P <= hi of |P|^(-1/2-beta)."""
    return math.fsum(len(irreducibles(q, d)) * q ** (-d * (0.5 + beta)) for d in range(lo + 1, hi + 1))


# ---------------------------------------------------------------------------
# schedule


def schedule_constants(eps: float) -> tuple[float, float, float]:
    """(a, d, r) with a (d - 1/2) / r = 1 - eps/2."""
    a = 2 * (1 - (eps / 2) ** 3)
    d = (2 + eps / 2) / (2 + eps)
    r = 1 + (eps / 2) ** 2 / (1 + eps / 2)
    return a, d, r


def log_c_max(eps: float) -> float:
    """log of the largest c with c^(1-d) <= (2 - a - eps^4)(r^(1-d) - 1)/a^d.

    Returns -inf when no positive c exists (eps >= 1/4).  The value itself
    underflows double precision for small eps, hence the logarithm.
    """
    a, d, r = schedule_constants(eps)
    base = (2 - a - eps**4) * (r ** (1 - d) - 1) / a**d
    if base <= 0:
        return -math.inf
    return math.log(base) / (1 - d)


def c_max(eps: float) -> float:
    return math.exp(log_c_max(eps))


def _floor_cg(log_c: float, g: int) -> int:
    x = log_c + math.log(g)
    return 0 if x < 0 else math.floor(math.exp(x))


def _even_floor(x: float) -> int:
    return 2 * math.floor(x / 2)


@dataclass
class SieveSchedule:
    q: int
    g: int
    k: float
    beta: float
    t: float
    eps: float
    a: float
    d: float
    r: float
    c: float
    log_c: float
    alpha: float
    N: list
    s: list
    ell: list
    K: int
    branch: str
    NK_target: int  # floor(c g)
    top_clamped: bool  # chain could not end at floor(c g)
    notes: dict = field(default_factory=dict)

    def budget_terms(self) -> tuple[int, list[int]]:
        """(sum ell_j N_j, [sum_{r<=j} ell_r N_r + s_{j+1} N_{j+1} for j < K])."""
        prefix, mixed = 0, []
        for j in range(self.K + 1):
            prefix += self.ell[j] * self.N[j]
            if j < self.K:
                mixed.append(prefix + self.s[j + 1] * self.N[j + 1])
        return prefix, mixed

    def validate(self) -> None:
        if len(self.N) != self.K + 1 or len(self.s) != self.K + 1 or len(self.ell) != self.K + 1:
            raise InfeasibleSchedule("N, s, ell must all have K+1 entries")
        if any(n < 1 for n in self.N) or any(b <= a for a, b in zip(self.N, self.N[1:])):
            raise InfeasibleSchedule(f"N must be positive and increasing, got {self.N}")
        if any(l <= 0 or l % 2 for l in self.ell):
            raise InfeasibleSchedule(f"every ell_j must be even and positive, got {self.ell}")
        total, mixed = self.budget_terms()
        if total > 2 * self.g:
            raise InfeasibleSchedule(f"sum ell_j N_j = {total} exceeds 2g = {2 * self.g}")
        for j, m in enumerate(mixed):
            if m > 2 * self.g:
                raise InfeasibleSchedule(f"mixed budget at j={j} is {m} > 2g = {2 * self.g}")

    def intervals(self) -> list[tuple[int, int]]:
        return [(0 if j == 0 else self.N[j - 1], self.N[j]) for j in range(self.K + 1)]

    def threshold(self, r: int) -> float:
        return self.ell[r] / (self.k * math.e**2)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def manual(cls, q, g, k, beta, N, s, ell, t=0.0, eps=0.1) -> "SieveSchedule":
        """A hand-picked schedule, checked against the same constraints."""
        a, d, r = schedule_constants(eps)
        lc = log_c_max(eps)
        sched = cls(
            q, g, k, beta, t, eps, a, d, r, math.exp(lc), lc,
            math.log(1 / beta) / math.log(g) if g > 1 else math.nan,
            list(N), list(s), list(ell), len(N) - 1, "manual", _floor_cg(lc, g), N[-1] != _floor_cg(lc, g),
        )
        sched.validate()
        return sched


def _large_beta_A(g: int, beta: float, k: float, eps: float, d: float, ratio: float):
    """Admissible exponent A for the N_0 = g/(log g)^A variant, or None."""
    lg = math.log(g)
    if lg <= 1 or g * beta <= 1:
        return None
    eps1 = k * eps / (8 * (2 * k - 1 + eps / 2))
    eps2 = k * eps / (4 * (2 * k - 1 + 2 * k * eps))
    lo = (0.5 + eps1) / (d - 0.5)
    slack = 2 * k - ratio
    if slack > 0:
        hi = 2 * k * math.log(g * beta) * (1 - eps2) / (slack * math.log(lg))
        if hi <= lo:
            return None
        return (lo + hi) / 2
    return lo + eps


def build_schedule(q: int, g: int, k: float, beta: float, eps: float, t: float = 0.0, c: float | None = None) -> SieveSchedule:
    """First-step interval schedule; raises InfeasibleSchedule, never clamps silently.

    The chain N_j = floor(r (N_{j-1} + 1)) is meant to stop at floor(c g).
    Whenever that target is not above N_0 (at practical g the admissible c
    is astronomically small) the schedule has K = 0 and ``top_clamped`` set.
    """
    if g < 2:
        raise InfeasibleSchedule("g must be >= 2")
    if not beta > 0 or k <= 0:
        raise ValueError("beta and k must be > 0")
    a, d, r = schedule_constants(eps)
    ratio = a * (d - 0.5) / r
    lcm = log_c_max(eps)
    if lcm == -math.inf:
        raise InfeasibleSchedule(f"no admissible c > 0 exists for eps = {eps}")
    if c is None:
        log_c = lcm
    elif not c > 0 or math.log(c) > lcm + 1e-12:
        raise InfeasibleSchedule(f"c = {c} is not in (0, exp({lcm:.6g})] for eps = {eps}")
    else:
        log_c = math.log(c)
    c = math.exp(log_c)
    lg = math.log(g)
    logq_g = lg / math.log(q)
    alpha = math.log(1 / beta) / lg
    notes: dict = {}

    if 2 * k * (1 + eps) <= 1:
        if beta < g ** (eps - 1 / (2 * k)):
            raise InfeasibleSchedule("small k needs beta >= g^(eps - 1/(2k))")
        branch = "small-k"
        m = 1
        lo1 = math.log1p(-(g ** (-2 * beta)))
        N0 = math.floor(-(d - 0.5) * lg**2 / ((1 + 2 * eps) * math.log(q) * k * m * lo1))
        s0 = _even_floor(-(1 + 2 * eps) * math.log(q) * k * m * g * lo1 / ((d - 0.5) * lg**2))
        l0 = _even_floor(s0**d) if s0 > 0 else 0
        notes["m"] = m
    else:
        A = None
        if beta >= lg ** (1 - 1 / (2 * k) + eps) / g:
            A = _large_beta_A(g, beta, k, eps, d, ratio)
        if A is not None:
            branch = "large-beta"
            N0 = math.floor(g / lg**A)
            s0 = l0 = _even_floor(lg**A)
            notes["A"] = A
        else:
            branch = "generic"
            core = 2 * k * alpha - ratio + d - 0.5
            if alpha <= 0 or core <= 0:
                raise InfeasibleSchedule(f"generic step needs alpha > 0 and a positive N_0 (alpha = {alpha})")
            N0 = math.floor(logq_g * core / (k * alpha * (1 + eps)))
            s0 = _even_floor(g * k * alpha * (1 + eps) / (logq_g * core))
            l0 = _even_floor(s0**d) if s0 > 0 else 0

    target = _floor_cg(log_c, g)
    N, s, ell = [N0], [s0], [l0]
    while N[-1] < target:
        nxt = min(math.floor(r * (N[-1] + 1)), target)
        N.append(nxt)
        s.append(_even_floor(a * g / nxt))
        ell.append(_even_floor(s[-1] ** d) if s[-1] > 0 else 0)
    K = len(N) - 1
    sched = SieveSchedule(
        q, g, k, beta, t, eps, a, d, r, c, log_c, alpha, N, s, ell, K, branch, target, N[-1] != target, notes
    )
    sched.validate()
    return sched


# ---------------------------------------------------------------------------
# T-sets and the exceptional set


def _p_values(D: MonicPoly, sched: SieveSchedule, r: int) -> list[float]:
    lo, hi = sched.intervals()[r]
    return [p_interval(D, lo, hi, sched.N[u], sched.beta, sched.t) for u in range(r, sched.K + 1)]


def t_membership(D: MonicPoly, sched: SieveSchedule, r: int) -> bool:
    """max over r <= u <= K of |P_{I_r}(D; N_u)| <= ell_r / (k e^2)."""
    if not 0 <= r <= sched.K:
        raise ValueError(f"r must lie in [0, {sched.K}]")
    return max(abs(v) for v in _p_values(D, sched, r)) <= sched.threshold(r)


def _fail_counts(q: int, g: int, sched: SieveSchedule, lo: int, hi: int) -> int:
    n = 2 * g + 1
    top = sched.N[0]
    sums = prime_sums(q, n, top, lo, hi)
    chi = sums.chi[sums.squarefree]
    worst = np.zeros(chi.shape[0])
    for u in range(sched.K + 1):
        vals = p_interval_many(chi, 0, top, sched.N[u], sched.beta, sched.t, q)
        worst = np.maximum(worst, np.abs(vals))
    return int(np.count_nonzero(worst > sched.threshold(0)))


def exceptional_fraction(
    q: int, g: int, sched: SieveSchedule, threads: int = 1, cap: int = DEFAULT_RESOURCE_CAP
) -> float:
    """Share of D in H_{2g+1} outside T_0."""
    size = discriminant_family_size(q, g)
    if size > cap:
        raise ResourceCapError(f"family of size {size} exceeds cap {cap}")
    total = q ** (2 * g + 1)
    bounds = [(lo, min(total, lo + CHUNK)) for lo in range(0, total, CHUNK)]

    def work(b):
        return _fail_counts(q, g, sched, *b)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(work, bounds))
    else:
        counts = [work(b) for b in bounds]
    return sum(counts) / size


# ---------------------------------------------------------------------------
# power identity for completely multiplicative weights


def power_identity(q: int, degrees, s: int, weight=None) -> tuple[Fraction, Fraction]:
    """Both sides of (sum_P a(P))^s = s! sum_{Omega(f)=s} a(f) nu(f), exactly.

    ``weight(P)`` defaults to 1/|P|; primes range over the given degrees and f
    over products of s of them (multisets).
    """
    if weight is None:
        weight = lambda P: Fraction(1, q ** (len(P) - 1))  # noqa: E731
    primes = [P for d in degrees for P in irreducibles(q, d)]
    lhs = sum((weight(P) for P in primes), Fraction(0)) ** s
    rhs = Fraction(0)
    for combo in combinations_with_replacement(range(len(primes)), s):
        term = Fraction(1)
        counts: dict[int, int] = {}
        for i in combo:
            term *= weight(primes[i])
            counts[i] = counts.get(i, 0) + 1
        for e in counts.values():
            term /= factorial(e)
        rhs += term
    return lhs, factorial(s) * rhs
