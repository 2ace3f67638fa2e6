"""Step law of the elephant walk and its two step-reinforced constructions.

The conditional law of the next step depends on the past only through the
step counts, so nothing here stores the history.  Drawing a past epoch
uniformly and reading its step is done by drawing a generator with
probability ``N(a)/n``.
"""

from dataclasses import dataclass, field

import numpy as np

ELEPHANT, POSITIVE, NEGATIVE = 0, 1, 2
VARIANT_CODES = {"elephant": ELEPHANT, "pos": POSITIVE, "neg": NEGATIVE}
VARIANT_NAMES = {v: k for k, v in VARIANT_CODES.items()}


@dataclass(frozen=True)
class MemoryConfig:
    """``variant`` is one of ``elephant``, ``pos``, ``neg``; ``param`` is p or p-tilde."""

    variant: str
    param: float

    def __post_init__(self):
        if self.variant not in VARIANT_CODES:
            raise ValueError(f"unknown variant {self.variant!r}")
        q = self.param
        if self.variant == "elephant" and not 0 <= q <= 1:
            raise ValueError(f"memory parameter p={q} outside [0, 1]")
        if self.variant == "pos" and not 0 <= q < 1:
            raise ValueError(f"positive reinforcement p~={q} outside [0, 1)")
        if self.variant == "neg" and not 0 < q <= 1:
            raise ValueError(f"negative reinforcement p~={q} outside (0, 1]")

    @property
    def code(self) -> int:
        return VARIANT_CODES[self.variant]

    @classmethod
    def elephant(cls, p):
        return cls("elephant", p)


def effective_memory(cfg: MemoryConfig, d: int):
    """Memory parameter of the elephant walk equivalent to ``cfg`` on degree ``d``."""
    q = cfg.param
    if cfg.variant == "elephant":
        return q
    if cfg.variant == "pos":
        return q + (1 - q) / d
    return (1 - q) / d


def is_degenerate(cfg: MemoryConfig, d: int) -> bool:
    """p = 1: the walk repeats its first step forever; excluded from rate fits."""
    return effective_memory(cfg, d) == 1


@dataclass
class UrnCounts:
    counts: np.ndarray
    total: int = 0

    @classmethod
    def empty(cls, d: int) -> "UrnCounts":
        return cls(np.zeros(d, dtype=np.int64), 0)

    @property
    def d(self) -> int:
        return len(self.counts)

    def copy(self) -> "UrnCounts":
        return UrnCounts(self.counts.copy(), self.total)


def record_step(urn: UrnCounts, g: int) -> UrnCounts:
    urn.counts[g] += 1
    urn.total += 1
    return urn


def _elephant_law(count, n, p, d):
    return (count * p) / n + ((n - count) * (1 - p)) / (n * (d - 1))


def step_probability(urn: UrnCounts, cfg: MemoryConfig, a: int):
    """P(next step = a | counts), using the equivalent elephant memory parameter.

    Exact rational arithmetic is preserved when ``cfg.param`` is a Fraction.
    """
    if urn.total < 1:
        raise ValueError("step law needs at least one past step; the first step is uniform")
    d = urn.d
    p = effective_memory(cfg, d)
    return _elephant_law(int(urn.counts[a]), urn.total, p, d)


def construction_probability(urn: UrnCounts, cfg: MemoryConfig, a: int):
    """P(next step = a | counts) read off the variant's own recall/replace recipe.

    Unlike ``step_probability`` this never goes through the elephant map, so
    comparing the two checks the map rather than restating it.
    """
    if urn.total < 1:
        raise ValueError("step law needs at least one past step; the first step is uniform")
    d, n, q = urn.d, urn.total, cfg.param
    count = int(urn.counts[a])
    if cfg.variant == "elephant":
        return _elephant_law(count, n, q, d)
    if cfg.variant == "pos":
        # keep the recalled step w.p. q, else a fresh uniform step
        return (count * q) / n + (1 - q) / d
    # avoid the recalled step w.p. q, else a fresh uniform step
    return (q * (n - count)) / (n * (d - 1)) + (1 - q) / d


def sample_next_step(urn: UrnCounts, cfg: MemoryConfig, rng) -> int:
    """Draw the next generator.

    Stream contract (shared with the compiled kernels): one uniform picks the
    remembered step, one decides keep/replace, and a third picks the
    replacement only when one is needed.  The first step uses a single draw.
    """
    d, n = urn.d, urn.total
    if n == 0:
        return rng.below(d)
    target = rng.below(n)
    cum = 0
    remembered = d - 1
    for j in range(d):
        cum += int(urn.counts[j])
        if target < cum:
            remembered = j
            break
    u = rng.uniform()
    q = cfg.param
    if cfg.variant == "elephant":
        if u < q:
            return remembered
        return _other_than(remembered, rng.below(d - 1))
    if cfg.variant == "pos":
        if u < q:
            return remembered
        return rng.below(d)
    if u < q:
        return _other_than(remembered, rng.below(d - 1))
    return rng.below(d)


def _other_than(r: int, j: int) -> int:
    return j + 1 if j >= r else j


def second_eigenvalue(p, d: int):
    """Second eigenvalue (pd - 1)/(d - 1) of the mean replacement matrix."""
    if d < 2:
        raise ValueError("d must be at least 2")
    return (p * d - 1) / (d - 1)


def replacement_matrix(p, d: int) -> np.ndarray:
    m = np.full((d, d), (1 - p) / (d - 1))
    np.fill_diagonal(m, p)
    return m
