"""Exact finite-horizon law of the walk by exhaustive path enumeration.

Every one of the d^n step sequences is visited with its probability (first
step uniform, later steps from the variant's own recall/replace recipe).
The numba path is a depth-first search with undo; the numpy path expands
all prefixes level by level.  They share no code beyond the step law.
"""

from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np

from . import _accel
from ._accel import njit
from .group import GroupPresentation
from .sampler import MemoryConfig, effective_memory

MAX_HORIZON = 12
MAX_PATHS = 10 ** 8


class EnumerationBudgetError(ValueError):
    """Horizon too large for exhaustive enumeration."""


@dataclass
class ExactDistribution:
    horizon: int
    d: int
    pmf: np.ndarray
    return_prob: float
    mean_delta: float
    orders: tuple = ()
    speed_moments: Dict[float, float] = field(default_factory=dict)
    xi_moments: Dict[float, float] = field(default_factory=dict)

    def support(self) -> Dict[int, float]:
        return {k: float(v) for k, v in enumerate(self.pmf) if v > 0}


def path_count(d: int, n: int) -> int:
    return d ** n


def _check_budget(d: int, n: int) -> None:
    if n < 1:
        raise ValueError("horizon must be at least 1")
    if n > MAX_HORIZON or path_count(d, n) > MAX_PATHS:
        raise EnumerationBudgetError(
            f"enumeration of {path_count(d, n)} paths (d={d}, n={n}) exceeds the budget "
            f"(n <= {MAX_HORIZON}, d^n <= {MAX_PATHS})")


@njit
def _law(variant, q, c, k, d):
    if k == 0:
        return 1.0 / d
    if variant == 0:
        return (c * q) / k + ((k - c) * (1.0 - q)) / (k * (d - 1))
    if variant == 1:
        return (c * q) / k + (1.0 - q) / d
    return (q * (k - c)) / (k * (d - 1)) + (1.0 - q) / d


@njit
def _kadd(acc, comp, i, x):
    y = x - comp[i]
    t = acc[i] + y
    comp[i] = (t - acc[i]) - y
    acc[i] = t


@njit
def _enumerate_nb(inv, variant, q, n, orders):
    d = inv.shape[0]
    nm = orders.shape[0]
    center = (d - 2) / d
    pmf = np.zeros(n + 1)
    pmf_c = np.zeros(n + 1)
    mom = np.zeros(2 * nm + 1)
    mom_c = np.zeros(2 * nm + 1)

    counts = np.zeros(d, np.int64)
    word = np.zeros(n + 1, np.int64)
    popped = np.full(n, -1, np.int64)
    taken = np.zeros(n, np.int64)
    choice = np.zeros(n + 1, np.int64)
    weight = np.ones(n + 1)
    xi = np.zeros(n + 1)
    depth = 0
    k = 0
    while True:
        if k == n or choice[k] == d:
            if k == n:
                w = weight[n]
                _kadd(pmf, pmf_c, depth, w)
                _kadd(mom, mom_c, 2 * nm, w * depth)
                s = xi[n] / n
                for i in range(nm):
                    _kadd(mom, mom_c, i, w * abs(depth / n - center) ** orders[i])
                    _kadd(mom, mom_c, nm + i, w * abs(s) ** orders[i])
            k -= 1
            if k < 0:
                break
            a = taken[k]
            counts[a] -= 1
            if popped[k] >= 0:
                word[depth] = popped[k]
                depth += 1
            else:
                depth -= 1
            continue
        a = choice[k]
        choice[k] = a + 1
        prob = _law(variant, q, counts[a], k, d)
        if prob <= 0.0:
            continue
        term = 0.0
        if k > 0:
            ell = 0
            if depth > 0:
                ell = counts[inv[word[depth - 1]]]
            term = ell / k - (1.0 / d if depth > 0 else 0.0)
        xi[k + 1] = xi[k] + term
        if depth > 0 and inv[word[depth - 1]] == a:
            depth -= 1
            popped[k] = word[depth]
        else:
            word[depth] = a
            depth += 1
            popped[k] = -1
        counts[a] += 1
        taken[k] = a
        weight[k + 1] = weight[k] * prob
        k += 1
        choice[k] = 0
    return pmf, mom


def _enumerate_np(inv, variant, q, n, orders):
    d = inv.shape[0]
    inv = inv.astype(np.int64)
    P = 1
    counts = np.zeros((1, d), np.int64)
    word = np.zeros((1, n + 1), np.int64)
    depth = np.zeros(1, np.int64)
    weight = np.ones(1)
    xi = np.zeros(1)
    for k in range(n):
        pos = depth > 0
        top = word[np.arange(P), np.maximum(depth - 1, 0)]
        gamma = np.where(pos, inv[top], -1)
        if k > 0:
            ell = np.where(pos, counts[np.arange(P), np.maximum(gamma, 0)], 0)
            xi = xi + (ell / k - np.where(pos, 1.0 / d, 0.0))
        # expand: row i*d + a extends prefix i by generator a
        a = np.tile(np.arange(d), P)
        parent = np.repeat(np.arange(P), d)
        c = counts[parent, a]
        if k == 0:
            prob = np.full(a.shape, 1.0 / d)
        elif variant == 0:
            prob = c / k * q + (k - c) / k * (1.0 - q) / (d - 1)
        elif variant == 1:
            prob = c / k * q + (1.0 - q) / d
        else:
            prob = q * (k - c) / (k * (d - 1)) + (1.0 - q) / d
        w = weight[parent] * prob
        keep = w > 0
        a, parent, w = a[keep], parent[keep], w[keep]
        back = pos[parent] & (gamma[parent] == a)
        new_word = word[parent]
        new_depth = depth[parent].copy()
        rows = np.arange(len(a))
        push = ~back
        new_word[rows[push], new_depth[push]] = a[push]
        new_depth += np.where(back, -1, 1)
        new_counts = counts[parent]
        new_counts[rows, a] += 1
        counts, word, depth, weight, xi = new_counts, new_word, new_depth, w, xi[parent]
        P = len(a)
    center = (d - 2) / d
    pmf = np.bincount(depth, weights=weight, minlength=n + 1)
    nm = len(orders)
    mom = np.zeros(2 * nm + 1)
    s = xi / n
    for i, m in enumerate(orders):
        mom[i] = np.sum(weight * np.abs(depth / n - center) ** m)
        mom[nm + i] = np.sum(weight * np.abs(s) ** m)
    mom[2 * nm] = np.sum(weight * depth)
    return pmf, mom


def enumerate_exact(pres: GroupPresentation, cfg: MemoryConfig, n: int,
                    ms: Sequence[float] = (1.0, 2.0), backend=None) -> ExactDistribution:
    """Exact law of the distance at time n (and moments of speed and xi)."""
    d = pres.d
    _check_budget(d, n)
    orders = np.asarray(ms, dtype=np.float64)
    backend = backend or _accel.backend_name()
    args = (pres.inverse_table.astype(np.int64), cfg.code, float(cfg.param), int(n), orders)
    if backend == "numba":
        pmf, mom = _enumerate_nb(*args)
    else:
        pmf, mom = _enumerate_np(*args)
    nm = len(orders)
    return ExactDistribution(
        horizon=n, d=d, pmf=pmf, return_prob=float(pmf[0]), mean_delta=float(mom[2 * nm]),
        orders=tuple(float(m) for m in ms),
        speed_moments={float(m): float(mom[i]) for i, m in enumerate(ms)},
        xi_moments={float(m): float(mom[nm + i]) for i, m in enumerate(ms)},
    )


def exact_return_probability(dist: ExactDistribution) -> float:
    return float(dist.pmf[0])


def compare_variants(pres: GroupPresentation, ptilde: float, variant: str, n: int,
                     backend=None) -> float:
    """Max |pmf difference| between a reinforced variant and its mapped elephant walk."""
    cfg = MemoryConfig(variant, ptilde)
    mapped = MemoryConfig("elephant", effective_memory(cfg, pres.d))
    a = enumerate_exact(pres, cfg, n, backend=backend).pmf
    b = enumerate_exact(pres, mapped, n, backend=backend).pmf
    return float(np.max(np.abs(a - b)))


def srw_distance_law(d: int, n: int) -> np.ndarray:
    """Law of the distance of simple random walk on T_d after n steps.

    Reflected birth-death chain: from 0 always up, elsewhere up w.p. (d-1)/d.
    """
    law = np.zeros(n + 1)
    law[0] = 1.0
    up = (d - 1) / d
    for _ in range(n):
        nxt = np.zeros(n + 1)
        nxt[1] += law[0]
        nxt[2:] += law[1:-1] * up
        nxt[:-1] += law[1:] * (1 - up)
        law = nxt
    return law
