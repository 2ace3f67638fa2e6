"""Slow, readable replica driver built from the per-operation API.

Used by tests as an independent route to the compiled kernels: it walks
the same random stream through ``sample_next_step``, ``apply_step`` and
``advance`` and must reproduce the kernel rows bit for bit.
"""

import numpy as np

from .group import GroupPresentation
from .kernels import NF
from .observables import ObservableTrace, advance, ell, fluctuation_statistic
from .rng import ReplicaRandom
from .sampler import MemoryConfig, UrnCounts, effective_memory, record_step, sample_next_step
from .walker import WalkerState, apply_step


def reference_rows(pres: GroupPresentation, cfg: MemoryConfig, horizon: int, checkpoints,
                   base_seed: int, replica_index: int, trace_cls=ObservableTrace,
                   letters_out=None) -> np.ndarray:
    d = pres.d
    p = effective_memory(cfg, d)
    rng = ReplicaRandom(base_seed, replica_index)
    state = WalkerState(pres)
    urn = UrnCounts.empty(d)
    trace = trace_cls()
    ckpts = list(checkpoints)
    out = np.zeros((len(ckpts), NF))
    ci = 0
    for _ in range(horizon):
        g = sample_next_step(urn, cfg, rng)
        if letters_out is not None:
            letters_out.append(g)
        # advance() reads the pre-step walker and urn
        state_before, urn_before = state.copy(), urn.copy()
        apply_step(state, g)
        record_step(urn, g)
        advance(trace, state_before, urn_before, state.delta - state_before.delta, p, d)
        m = trace.n
        if ci < len(ckpts) and m == ckpts[ci]:
            delta = state.delta
            xi = trace.xi_sum / m
            row = out[ci]
            row[0] = m
            row[1] = delta
            row[2] = delta / m
            row[3] = xi
            row[4] = trace.M
            row[5] = trace.qv
            row[6] = trace.zero_count
            row[7] = fluctuation_statistic(trace, delta, m, p, d)
            row[8] = ell(state, urn) / m
            s = 0.0
            mx = 0.0
            for j in range(d):
                dev = abs(int(urn.counts[j]) / m - 1.0 / d)
                s += dev
                mx = max(mx, dev)
            row[9] = s / d
            row[10] = mx
            row[11] = int(urn.counts.sum())
            row[12] = trace.xi_sum
            ci += 1
    return out
