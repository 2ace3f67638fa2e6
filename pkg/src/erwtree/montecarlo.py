"""Replica ensembles with checkpointed observables.

Replicas are cut into fixed-size chunks (independent of the worker count),
chunks run on a thread pool, and per-chunk accumulators are folded in chunk
order.  Every output is therefore a function of the config alone.
"""

import math
import os
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .group import GroupPresentation, make_presentation
from .kernels import F, simulate_block
from .observables import decomposition_residual, limit_variance
from .rng import replica_seeds
from .sampler import MemoryConfig, effective_memory
from .stats import MomentAccumulator

CHUNK_SIZE = 1024
DEFAULT_MOMENTS = (1.0, 1.5, 2.0)
FLUCT_BINS = 101
DELTA_HIST_MAX = 256

CheckpointRow = namedtuple(
    "CheckpointRow", "n delta speed xi M qv zero_count fluct ell_ratio")


def default_checkpoints(n_max: int) -> Tuple[int, ...]:
    """round(2^(k/4)) for k = 0, 1, ... up to n_max, deduplicated, plus n_max."""
    if n_max < 1:
        raise ValueError("horizon must be at least 1")
    pts = set()
    k = 0
    while True:
        v = int(round(2 ** (k / 4)))
        if v > n_max:
            break
        pts.add(v)
        k += 1
    pts.add(n_max)
    return tuple(sorted(pts))


@dataclass(frozen=True)
class RunConfig:
    d1: int
    d2: int
    memory: MemoryConfig
    n_max: int
    replicas: int
    base_seed: int = 0
    checkpoints: Optional[Tuple[int, ...]] = None
    moments: Tuple[float, ...] = DEFAULT_MOMENTS
    chunk_size: int = CHUNK_SIZE

    def __post_init__(self):
        pres = make_presentation(self.d1, self.d2)
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.replicas < 1:
            raise ValueError("replicas must be at least 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        if not 0 <= self.base_seed < 2 ** 64:
            raise ValueError("base_seed must fit in 64 bits")
        if pres.d > 255:
            raise ValueError("degree too large for byte-sized words")
        for m in self.moments:
            if not 1 <= m <= 4:
                raise ValueError(f"moment order {m} outside [1, 4]")
        if self.checkpoints is not None:
            ck = list(self.checkpoints)
            if not ck:
                raise ValueError("checkpoint list is empty")
            if ck[0] < 1 or ck[-1] > self.n_max or any(b <= a for a, b in zip(ck, ck[1:])):
                raise ValueError("checkpoints must be strictly increasing within [1, n_max]")

    @property
    def presentation(self) -> GroupPresentation:
        return make_presentation(self.d1, self.d2)

    @property
    def d(self) -> int:
        return 2 * self.d1 + self.d2

    @property
    def p_effective(self) -> float:
        return effective_memory(self.memory, self.d)

    def resolved_checkpoints(self) -> Tuple[int, ...]:
        if self.checkpoints is None:
            return default_checkpoints(self.n_max)
        return tuple(int(c) for c in self.checkpoints)

    def abs_orders(self) -> Tuple[float, ...]:
        orders = list(DEFAULT_MOMENTS)
        for m in self.moments:
            if float(m) not in orders:
                orders.append(float(m))
        return tuple(orders)


def _run_block(cfg: RunConfig, start: int, count: int, ckpts: np.ndarray) -> np.ndarray:
    pres = cfg.presentation
    seeds = replica_seeds(cfg.base_seed, start, count)
    return simulate_block(pres.inverse_table, cfg.memory.code, cfg.memory.param,
                          cfg.p_effective, cfg.n_max, ckpts, seeds)


def run_replica(cfg: RunConfig, replica_index: int) -> List[CheckpointRow]:
    if not 0 <= replica_index < cfg.replicas:
        raise ValueError(f"replica index {replica_index} outside [0, {cfg.replicas})")
    ckpts = np.asarray(cfg.resolved_checkpoints(), dtype=np.int64)
    out = _run_block(cfg, replica_index, 1, ckpts)[0]
    rows = []
    for r in out:
        rows.append(CheckpointRow(
            int(r[F["n"]]), int(r[F["delta"]]), float(r[F["speed"]]), float(r[F["xi"]]),
            float(r[F["M"]]), float(r[F["qv"]]), int(r[F["zero_count"]]),
            float(r[F["fluct"]]), float(r[F["ell_ratio"]])))
    return rows


@dataclass
class CheckpointStats:
    n: int
    speed: MomentAccumulator
    xi: MomentAccumulator
    fluct: MomentAccumulator
    urn_dev: MomentAccumulator
    returns: int = 0
    delta_hist: Optional[np.ndarray] = None

    def merge(self, other: "CheckpointStats") -> "CheckpointStats":
        hist = None
        if self.delta_hist is not None:
            hist = self.delta_hist + other.delta_hist
        return CheckpointStats(self.n, self.speed.merge(other.speed), self.xi.merge(other.xi),
                               self.fluct.merge(other.fluct), self.urn_dev.merge(other.urn_dev),
                               self.returns + other.returns, hist)

    @property
    def count(self) -> int:
        return self.speed.count

    @property
    def return_prob(self) -> float:
        return self.returns / self.count

    @property
    def return_se(self) -> float:
        q = self.return_prob
        return math.sqrt(max(q * (1 - q), 0.0) / self.count)


@dataclass
class EnsembleSummary:
    config: RunConfig
    checkpoints: Tuple[int, ...]
    stats: List[CheckpointStats]
    max_identity_residual: float
    final: Dict[str, np.ndarray] = field(default_factory=dict)

    def at(self, n: int) -> CheckpointStats:
        return self.stats[self.checkpoints.index(n)]

    def table(self) -> List[dict]:
        rows = []
        for s in self.stats:
            rows.append({
                "n": s.n,
                "mean_speed": s.speed.mean,
                "abs_moments": {repr(m): s.speed.abs_moment(m) for m in s.speed.abs_orders},
                "return_prob": s.return_prob,
                "return_se": s.return_se,
                "mean_xi": s.xi.mean,
                "var_xi": s.xi.variance,
                "abs_xi_moments": {repr(m): s.xi.abs_moment(m) for m in s.xi.abs_orders},
                "mean_fluct": s.fluct.mean,
                "var_fluct": s.fluct.variance,
                "mean_urn_dev": s.urn_dev.mean,
            })
        return rows


def _chunk_stats(cfg: RunConfig, out: np.ndarray, ckpts: np.ndarray):
    d = cfg.d
    center = (d - 2) / d
    sig = math.sqrt(limit_variance(d))
    orders = cfg.abs_orders()
    moments = tuple(float(m) for m in cfg.moments)
    stats = []
    for i, n in enumerate(ckpts):
        col = out[:, i]
        delta = col[:, F["delta"]]
        hist = None
        if cfg.n_max <= DELTA_HIST_MAX:
            hist = np.bincount(delta.astype(np.int64), minlength=cfg.n_max + 1)
        stats.append(CheckpointStats(
            int(n),
            MomentAccumulator.from_samples(col[:, F["speed"]], center, orders),
            MomentAccumulator.from_samples(col[:, F["xi"]], 0.0, moments),
            MomentAccumulator.from_samples(col[:, F["fluct"]], 0.0, (),
                                           (-5 * sig, 5 * sig, FLUCT_BINS)),
            MomentAccumulator.from_samples(col[:, F["urn_dev"]], 0.0, ()),
            int(np.count_nonzero(delta == 0)),
            hist,
        ))
    res = decomposition_residual(out[..., F["delta"]], out[..., F["n"]], out[..., F["M"]],
                                 out[..., F["zero_count"]], out[..., F["xi_sum"]],
                                 cfg.p_effective, d)
    # identity holds to rounding; scale by n so one number covers all checkpoints
    worst = float(np.max(np.abs(res) / out[..., F["n"]])) if res.size else 0.0
    final = {
        "delta_n": out[:, -1, F["delta"]].astype(np.int64),
        "speed": out[:, -1, F["speed"]].copy(),
        "xi": out[:, -1, F["xi"]].copy(),
        "fluct_stat": out[:, -1, F["fluct"]].copy(),
    }
    return stats, worst, final


def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is None:
        env = os.environ.get("ERW_WORKERS")
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError("workers must be at least 1")
    return workers


def run_ensemble(cfg: RunConfig, workers: Optional[int] = None,
                 keep_final: bool = True) -> EnsembleSummary:
    """Simulate all replicas and fold per-chunk statistics in replica order."""
    workers = resolve_workers(workers)
    ckpts = np.asarray(cfg.resolved_checkpoints(), dtype=np.int64)
    if ckpts[-1] != cfg.n_max:
        # the final per-replica arrays always describe time n_max
        ckpts = np.append(ckpts, cfg.n_max)
    chunks = [(s, min(cfg.chunk_size, cfg.replicas - s))
              for s in range(0, cfg.replicas, cfg.chunk_size)]

    def job(chunk):
        start, count = chunk
        return _chunk_stats(cfg, _run_block(cfg, start, count, ckpts), ckpts)

    merged = None
    worst = 0.0
    finals = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        window = 2 * workers
        pending = [pool.submit(job, c) for c in chunks[:window]]
        nxt = len(pending)
        for i in range(len(chunks)):
            stats, w, final = pending[i].result()
            pending[i] = None
            if nxt < len(chunks):
                pending.append(pool.submit(job, chunks[nxt]))
                nxt += 1
            merged = stats if merged is None else [a.merge(b) for a, b in zip(merged, stats)]
            worst = max(worst, w)
            if keep_final:
                finals.append(final)

    final = {}
    if keep_final:
        final = {k: np.concatenate([f[k] for f in finals]) for k in finals[0]}
    user = cfg.resolved_checkpoints()
    keep = [i for i, n in enumerate(ckpts) if int(n) in user]
    return EnsembleSummary(cfg, tuple(int(ckpts[i]) for i in keep),
                           [merged[i] for i in keep], worst, final)
