"""Exhaustive shifted negative moments over H_{2g+1} and their predictions."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb

import numpy as np

from .euler import a_const, zeta_q
from .lfunction import CHUNK, DEFAULT_RESOURCE_CAP, Family, ShiftSpec, family_values, get_family

REGIMES = ("asymptotic", "improved", "second", "bound5", "third")


@dataclass(frozen=True)
class MomentResult:
    q: int
    g: int
    shift: ShiftSpec
    family_size: int
    moment: float
    rhs_prediction: float
    rel_error: float
    regime: str

    def row(self) -> dict:
        return {
            "q": self.q,
            "g": self.g,
            "k": self.shift.k,
            "beta": self.shift.beta,
            "t": self.shift.t,
            "family_size": self.family_size,
            "moment": self.moment,
            "rhs": self.rhs_prediction,
            "rel_error": self.rel_error,
            "regime": self.regime,
        }


def _powers(values: np.ndarray, k: float, t: float, use_abs: bool) -> np.ndarray:
    if t == 0 and not use_abs:
        if not (values > 0).all():
            bad = int(np.argmin(values))
            raise RuntimeError(f"non-positive L value {values[bad]!r} at t = 0 (family row {bad})")
        return values ** (-k)
    return np.abs(values) ** (-k)


def family_moment(family: Family, shift: ShiftSpec, threads: int = 1, use_abs: bool = False) -> float:
    """Average of L^-k (t = 0) or |L|^-k over an already computed family.

    Partial sums over fixed row blocks are correctly rounded (fsum) and
    combined in block order, so the result does not depend on ``threads``.
    """
    if shift.k == 0:
        return 1.0
    bounds = [(lo, min(family.size, lo + CHUNK)) for lo in range(0, family.size, CHUNK)]

    def block(b):
        sub = Family(family.q, family.g, family.indices[b[0] : b[1]], family.coeffs[b[0] : b[1]])
        vals = _powers(family_values(sub, shift.beta, shift.t), shift.k, shift.t, use_abs)
        return math.fsum(vals.tolist())

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(block, bounds))
    else:
        parts = [block(b) for b in bounds]
    return math.fsum(parts) / family.size


def negative_moment(
    q: int,
    g: int,
    shift: ShiftSpec,
    threads: int = 1,
    cap: int = DEFAULT_RESOURCE_CAP,
    cache_dir=None,
) -> float:
    fam = get_family(q, g, cache_dir=cache_dir, threads=threads, cap=cap)
    return family_moment(fam, shift, threads)


def asymptotic_rhs(q: int, k, beta: float, cutoff: int = 40) -> float:
    """zeta_q(1+2b)^C(k,2) * A(b)."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    return zeta_q(1 + 2 * beta, q) ** comb(k, 2) * a_const(k, beta, cutoff, q).value


def threshold_beta(k: float, g: int, eps: float) -> float:
    """(1+eps) k^2 (k+1) log g / (8g)."""
    if g < 2:
        raise ValueError("g must be >= 2")
    return (1 + eps) * k * k * (k + 1) * math.log(g) / (8 * g)


def regime_classify(g: int, beta: float, k: float, eps: float) -> str:
    """Which bound governs the moment at (g, beta, k).

    Boundaries are compared with >=, so a beta sitting exactly on a boundary
    gets the stronger of the two neighbouring bounds.
    """
    if not beta > 0:
        raise ValueError("beta must be > 0")
    if g < 2:
        raise ValueError("g must be >= 2")
    if k <= 0:
        raise ValueError("k must be > 0")
    lg = math.log(g)
    expo = 1 - 1 / (2 * k) + eps
    if int(k) == k:
        floor = max(threshold_beta(k, g, eps), lg**expo / g)
        if beta >= floor:
            return "asymptotic"
    if beta >= lg ** max(0.0, expo) / g:
        return "improved"
    if beta >= 1 / g:
        return "second"
    if beta >= g ** (eps - 1 / (2 * k)):
        return "bound5"
    return "third"


def moment_result(family: Family, shift: ShiftSpec, eps: float = 0.1, threads: int = 1) -> MomentResult:
    q, g = family.q, family.g
    m = family_moment(family, shift, threads)
    if int(shift.k) == shift.k and shift.k >= 1 and shift.t == 0:
        rhs = asymptotic_rhs(q, shift.k, shift.beta)
        rel = abs(m - rhs) / rhs
    else:
        rhs = rel = math.nan
    regime = regime_classify(g, shift.beta, shift.k, eps) if g >= 2 and shift.k > 0 else "n/a"
    return MomentResult(q, g, shift, family.size, m, rhs, rel, regime)


def compare_scan(
    q: int,
    g: int,
    k: float,
    beta_grid,
    t: float = 0.0,
    eps: float = 0.1,
    threads: int = 1,
    cap: int = DEFAULT_RESOURCE_CAP,
    cache_dir=None,
) -> list[MomentResult]:
    """One MomentResult per beta, all from a single family computation."""
    shifts = [ShiftSpec(b, t, k) for b in beta_grid]
    fam = get_family(q, g, cache_dir=cache_dir, threads=threads, cap=cap)
    return [moment_result(fam, s, eps, threads) for s in shifts]


def log_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x, for shape diagnostics."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    return float(np.polyfit(lx, ly, 1)[0])
