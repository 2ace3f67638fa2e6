"""Mergeable streaming statistics.

``MomentAccumulator`` keeps count, mean and central sums up to order 4
(pairwise combination formulas of Chan et al. and Pebay), min/max, an
optional fixed-edge histogram with under/overflow bins, and raw sums of
``|x - center|^m`` for a fixed set of orders.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np


@dataclass
class MomentAccumulator:
    center: float = 0.0
    abs_orders: Tuple[float, ...] = ()
    hist_range: Optional[Tuple[float, float, int]] = None
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0
    min: float = float("inf")
    max: float = float("-inf")
    abs_sums: np.ndarray = field(default=None)
    hist: np.ndarray = field(default=None)

    def __post_init__(self):
        self.abs_orders = tuple(float(m) for m in self.abs_orders)
        if self.abs_sums is None:
            self.abs_sums = np.zeros(len(self.abs_orders))
        if self.hist_range is not None:
            lo, hi, nb = self.hist_range
            if not hi > lo or nb < 1:
                raise ValueError("histogram needs hi > lo and at least one bin")
            self.hist_range = (float(lo), float(hi), int(nb))
            if self.hist is None:
                self.hist = np.zeros(int(nb) + 2, dtype=np.int64)

    def empty_like(self) -> "MomentAccumulator":
        return MomentAccumulator(self.center, self.abs_orders, self.hist_range)

    @property
    def edges(self) -> Optional[np.ndarray]:
        if self.hist_range is None:
            return None
        lo, hi, nb = self.hist_range
        return np.linspace(lo, hi, nb + 1)

    @property
    def variance(self) -> float:
        """Population variance (divides by count)."""
        return self.m2 / self.count if self.count else float("nan")

    def abs_moment(self, m: float) -> float:
        i = self.abs_orders.index(float(m))
        return self.abs_sums[i] / self.count if self.count else float("nan")

    def compatible(self, other: "MomentAccumulator") -> bool:
        return (self.center == other.center and self.abs_orders == other.abs_orders
                and self.hist_range == other.hist_range)

    def update(self, samples) -> "MomentAccumulator":
        return self.merge(self.from_samples(samples, self.center, self.abs_orders, self.hist_range))

    @classmethod
    def from_samples(cls, samples, center=0.0, abs_orders: Sequence[float] = (),
                     hist_range=None) -> "MomentAccumulator":
        x = np.asarray(samples, dtype=np.float64).ravel()
        acc = cls(center, tuple(abs_orders), hist_range)
        n = x.size
        if n == 0:
            return acc
        acc.count = n
        acc.mean = float(x.mean())
        dev = x - acc.mean
        dev2 = dev * dev
        acc.m2 = float(dev2.sum())
        acc.m3 = float((dev2 * dev).sum())
        acc.m4 = float((dev2 * dev2).sum())
        acc.min = float(x.min())
        acc.max = float(x.max())
        a = np.abs(x - center)
        for i, m in enumerate(acc.abs_orders):
            acc.abs_sums[i] = float((a ** m).sum())
        if acc.hist is not None:
            lo, hi, nb = acc.hist_range
            idx = np.floor((x - lo) / (hi - lo) * nb).astype(np.int64)
            # slot 0 underflow, nb + 1 overflow; hi itself lands in overflow
            idx = np.clip(idx + 1, 0, nb + 1)
            acc.hist += np.bincount(idx, minlength=nb + 2)
        return acc

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        """Pooled statistics of ``self`` and ``other`` as a new accumulator."""
        if not self.compatible(other):
            raise ValueError("cannot merge accumulators with different center, orders or binning")
        out = self.empty_like()
        na, nb = self.count, other.count
        if na == 0 or nb == 0:
            src = other if na == 0 else self
            out.count, out.mean = src.count, src.mean
            out.m2, out.m3, out.m4 = src.m2, src.m3, src.m4
            out.min, out.max = src.min, src.max
            out.abs_sums = src.abs_sums.copy()
            if src.hist is not None:
                out.hist = src.hist.copy()
            return out
        n = na + nb
        delta = other.mean - self.mean
        d_n = delta / n
        d_n2 = d_n * d_n
        term1 = delta * d_n * na * nb
        out.count = n
        out.mean = self.mean + d_n * nb
        out.m2 = self.m2 + other.m2 + term1
        out.m3 = (self.m3 + other.m3 + term1 * d_n * (na - nb)
                  + 3.0 * d_n * (na * other.m2 - nb * self.m2))
        out.m4 = (self.m4 + other.m4 + term1 * d_n2 * (na * na - na * nb + nb * nb)
                  + 6.0 * d_n2 * (na * na * other.m2 + nb * nb * self.m2)
                  + 4.0 * d_n * (na * other.m3 - nb * self.m3))
        out.min = min(self.min, other.min)
        out.max = max(self.max, other.max)
        out.abs_sums = self.abs_sums + other.abs_sums
        if self.hist is not None:
            out.hist = self.hist + other.hist
        return out

    def skewness(self) -> float:
        if self.count == 0 or self.m2 == 0:
            return float("nan")
        return np.sqrt(self.count) * self.m3 / self.m2 ** 1.5

    def kurtosis(self) -> float:
        """Excess kurtosis."""
        if self.count == 0 or self.m2 == 0:
            return float("nan")
        return self.count * self.m4 / (self.m2 * self.m2) - 3.0


def merge_all(accs) -> MomentAccumulator:
    """Left fold in the given order."""
    accs = list(accs)
    if not accs:
        raise ValueError("nothing to merge")
    out = accs[0]
    for a in accs[1:]:
        out = out.merge(a)
    return out
