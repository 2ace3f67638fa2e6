"""Rate-exponent fits and normality diagnostics on ensemble output."""

import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .observables import (CRITICAL, SUBCRITICAL, SUPERCRITICAL, limit_variance, rate,
                          rate_exponent, regime)

DEFAULT_BURN_IN = 2 ** 10
SLOPE_TOL = {SUBCRITICAL: 0.05, CRITICAL: 0.05, SUPERCRITICAL: 0.07}
KS_THRESHOLD = 0.02
MIN_POINTS = 5


def estimate_slope(points: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """OLS slope of log(value) on log(n); returns (slope, standard error)."""
    pts = list(points)
    if len(pts) < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} points to fit a slope, got {len(pts)}")
    x = np.array([p[0] for p in pts], dtype=np.float64)
    y = np.array([p[1] for p in pts], dtype=np.float64)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("slope fit needs strictly positive n and values")
    lx, ly = np.log(x), np.log(y)
    xm = lx.mean()
    sxx = float(((lx - xm) ** 2).sum())
    if sxx == 0:
        raise ValueError("all abscissae are equal")
    slope = float(((lx - xm) * (ly - ly.mean())).sum() / sxx)
    resid = ly - ly.mean() - slope * (lx - xm)
    s2 = float((resid ** 2).sum()) / (len(pts) - 2)
    return slope, math.sqrt(s2 / sxx)


def normal_cdf(x: float, sigma2: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0 * sigma2)))


def ks_statistic(samples, sigma2: float) -> float:
    """sup |F_n - Phi_sigma| against the centred normal with variance sigma2."""
    x = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    n = x.size
    if n == 0:
        raise ValueError("no samples")
    if n < 100:
        raise ValueError(f"KS distance needs at least 100 samples, got {n}")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    cdf = np.array([normal_cdf(v, sigma2) for v in x])
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(n) / n
    return float(max(upper.max(), lower.max()))


def theoretical_slope(p: float, d: int) -> float:
    """Exponent of r_n^{-1}; the critical log factor is ignored."""
    return -rate_exponent(p, d)


@dataclass
class SlopeFit:
    slope: float
    stderr: float
    theory: float
    tolerance: float
    n_points: int
    passed: bool


def fit_against(ns, values, theory: float, tol: float, burn_in: int) -> SlopeFit:
    pts = [(n, v) for n, v in zip(ns, values) if n >= burn_in]
    slope, se = estimate_slope(pts)
    return SlopeFit(slope, se, theory, tol, len(pts), abs(slope - theory) <= tol)


@dataclass
class AnalysisReport:
    d: int
    p: float
    regime: str
    burn_in: int
    moment: SlopeFit
    ks: Optional[float]
    ks_threshold: float
    ks_passed: Optional[bool]
    urn: Optional[SlopeFit] = None
    # m = 2 is reported only: its bound carries a log factor that is likely loose
    moment2: Optional[SlopeFit] = None
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        flags = [self.moment.passed]
        if self.ks_passed is not None:
            flags.append(self.ks_passed)
        if self.urn is not None:
            flags.append(self.urn.passed)
        return all(flags)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def analyze(rows: Sequence[dict], d: int, p: float, fluct_samples=None, urn_devs=None,
            burn_in: int = DEFAULT_BURN_IN) -> AnalysisReport:
    """Build a report from checkpoint rows (``n``, ``abs_moment_m1``, ...)."""
    if p >= 1:
        raise ValueError("rate fits are undefined for p = 1")
    reg = regime(p, d)
    tol = SLOPE_TOL[reg]
    th = theoretical_slope(p, d)
    ns = [int(r["n"]) for r in rows]
    notes = []
    if reg == CRITICAL:
        notes.append("critical regime: r_n carries a sqrt(log n) factor ignored by the fit")
    mom = fit_against(ns, [r["abs_moment_m1"] for r in rows], th, tol, burn_in)
    mom2 = None
    try:
        mom2 = fit_against(ns, [r["abs_moment_m2"] for r in rows], 2 * th, 2 * tol, burn_in)
    except (KeyError, ValueError):
        pass
    urn = None
    if urn_devs is not None:
        urn = fit_against(ns, urn_devs, th, SLOPE_TOL[SUPERCRITICAL], burn_in)
    ks = ks_pass = None
    if fluct_samples is not None and len(fluct_samples) >= 100:
        ks = ks_statistic(fluct_samples, limit_variance(d))
        ks_pass = ks <= KS_THRESHOLD
    return AnalysisReport(d, p, reg, burn_in, mom, ks, KS_THRESHOLD, ks_pass, urn, mom2, notes)


def xi_scatter(xi_values, n: int, p: float, d: int) -> np.ndarray:
    """r_n * Xi_n for each replica at time n."""
    return rate(n, p, d) * np.asarray(xi_values, dtype=np.float64)
