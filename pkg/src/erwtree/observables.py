"""Path observables of the walk and the rate constants that go with them.

Notation used in names:

* ``ell``: number of past steps equal to the root-directed generator
  (0 at the root).
* ``xi``: Cesaro average of ``ell_k/k - 1(delta_k > 0)/d`` over k < n, with
  the k = 0 term taken as 0.
* ``G``: conditional drift of the distance; ``M`` the martingale of
  ``increment - G``; ``qv`` its predictable quadratic variation.
"""

import math
from dataclasses import dataclass
from typing import Optional

from .sampler import UrnCounts
from .walker import WalkerState, toward_root

SUBCRITICAL, CRITICAL, SUPERCRITICAL = "subcritical", "critical", "supercritical"
_CRIT_TOL = 1e-12


def kahan_add(total: float, comp: float, x: float):
    y = x - comp
    t = total + y
    return t, (t - total) - y


def drift_coefficients(p, d: int):
    """(A, B) with G = 1 - A*1(delta>0) + B*ell/n."""
    return 2.0 * (1.0 - p) / (d - 1), 2.0 * (1.0 - p * d) / (d - 1)


def ell(state: WalkerState, urn: UrnCounts) -> int:
    g = toward_root(state)
    return 0 if g is None else int(urn.counts[g])


def q_value(ell_n: int, n: int, p, d: int):
    """Probability that the next step moves away from the root (off the root)."""
    if not 0 <= ell_n <= max(n, 0):
        raise ValueError(f"need 0 <= ell_n <= n, got ell_n={ell_n}, n={n}")
    if n == 0:
        ratio = 0
    else:
        ratio = ell_n / n
    return 1 - (1 - p) / (d - 1) + (1 - p * d) / (d - 1) * ratio


@dataclass
class ObservableTrace:
    n: int = 0
    xi_sum: float = 0.0
    xi_comp: float = 0.0
    zero_count: int = 0
    M: float = 0.0
    M_comp: float = 0.0
    qv: float = 0.0
    qv_comp: float = 0.0
    last_G: float = 1.0

    # ell_0 / 0 convention for the k = 0 term of xi; changed only by mutation tests.
    xi_origin_term = 0.0

    @property
    def xi(self) -> float:
        return self.xi_sum / self.n if self.n else 0.0


def advance(trace: ObservableTrace, state_before: WalkerState, urn_before: UrnCounts,
            delta_increment: int, p, d: int) -> ObservableTrace:
    """Fold one step into the trace, given the pre-step walker and urn."""
    n = trace.n
    pos = 1.0 if state_before.delta > 0 else 0.0
    A, B = drift_coefficients(p, d)
    if n > 0:
        ratio = ell(state_before, urn_before) / n
        term = ratio - (1.0 / d) * pos
    else:
        ratio = 0.0
        term = trace.xi_origin_term
    trace.xi_sum, trace.xi_comp = kahan_add(trace.xi_sum, trace.xi_comp, term)
    G = (1.0 - A * pos) + B * ratio
    if pos == 0.0:
        trace.zero_count += 1
    trace.M, trace.M_comp = kahan_add(trace.M, trace.M_comp, delta_increment - G)
    trace.qv, trace.qv_comp = kahan_add(trace.qv, trace.qv_comp, 1.0 - G * G)
    trace.last_G = G
    trace.n = n + 1
    return trace


def critical_p(d: int) -> float:
    if d < 3:
        raise ValueError(f"critical probability needs d >= 3, got d={d}")
    return (d + 1) / (2 * d)


def regime(p, d: int) -> str:
    pd_ = critical_p(d)
    if abs(p - pd_) <= _CRIT_TOL:
        return CRITICAL
    return SUBCRITICAL if p < pd_ else SUPERCRITICAL


def rate_exponent(p, d: int) -> float:
    """Power of n in the rate schedule (critical: the power before the log factor)."""
    if not 0 <= p < 1:
        raise ValueError(f"rate schedule needs p in [0, 1), got p={p}")
    if regime(p, d) == SUPERCRITICAL:
        return d * (1 - p) / (d - 1)
    return 0.5


def rate(n, p, d: int) -> float:
    """r_n: sqrt(n), sqrt(n / log n) at criticality, n^(d(1-p)/(d-1)) above it."""
    reg = regime(p, d)
    if not 0 <= p < 1:
        raise ValueError(f"rate schedule needs p in [0, 1), got p={p}")
    if reg == CRITICAL:
        if n < 2:
            raise ValueError("critical rate needs n >= 2")
        return math.sqrt(n / math.log(n))
    if n < 1:
        raise ValueError("rate needs n >= 1")
    if reg == SUBCRITICAL:
        return math.sqrt(n)
    return float(n) ** (d * (1 - p) / (d - 1))


def alpha(p, d: int) -> float:
    """Drift margin of the exponential return bound, defined for p < 1/2."""
    if d < 3:
        raise ValueError("alpha needs d >= 3")
    if not 0 <= p < 0.5:
        raise ValueError(f"alpha is defined for 0 <= p < 1/2, got p={p}")
    if p == 0 and d == 3:
        raise ValueError("alpha vanishes at (p, d) = (0, 3)")
    if p <= 1 / d:
        return 1 - 2 * (1 - p) / (d - 1)
    return 1 - 2 * p


def alpha_or_none(p, d: int) -> Optional[float]:
    try:
        return alpha(p, d)
    except ValueError:
        return None


def return_bound(n: int, p, d: int) -> float:
    """exp(-n alpha^2 / 8)."""
    return math.exp(-n * alpha(p, d) ** 2 / 8)


def limit_variance(d: int) -> float:
    return 4 * (d - 1) / d ** 2


def fluctuation_statistic(trace: ObservableTrace, delta_n: int, n: int, p, d: int) -> float:
    """sqrt(n) * [delta/n - (d-2)/d - B * xi]; asymptotically N(0, 4(d-1)/d^2)."""
    if n < 1:
        raise ValueError("fluctuation statistic needs n >= 1")
    _, B = drift_coefficients(p, d)
    xi = trace.xi_sum / n
    return math.sqrt(n) * (delta_n / n - (d - 2) / d - B * xi)


def decomposition_residual(delta_n, n, M, zero_count, xi_sum, p, d: int):
    """delta - n(d-2)/d - M - (2/d) zero_count - B xi_sum, zero on every path.

    Works elementwise on numpy arrays.
    """
    _, B = drift_coefficients(p, d)
    return delta_n - n * (d - 2) / d - M - (2.0 / d) * zero_count - B * xi_sum


@dataclass(frozen=True)
class RateSchedule:
    d: int
    p: float
    p_d: float
    regime: str
    alpha: Optional[float]


def rate_schedule(p, d: int) -> RateSchedule:
    return RateSchedule(d, p, critical_p(d), regime(p, d), alpha_or_none(p, d))
