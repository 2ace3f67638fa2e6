"""Hot simulation kernels.

Two implementations of the same block simulator:

* ``simulate_block_numba``: one replica at a time, compiled with numba,
  releases the GIL so blocks can run on a thread pool.
* ``simulate_block_numpy``: all replicas of a block advance in lockstep as
  numpy arrays.

Both follow the floating-point operation order of ``observables.advance``
and the draw order of ``sampler.sample_next_step``, so their outputs are
bit-identical.  ``simulate_block`` dispatches on ``ERW_BACKEND``.

Output rows hold, per replica and checkpoint, the columns named in
``FIELDS``.
"""

import math

import numpy as np

from . import _accel
from ._accel import njit
from .rng import GOLDEN, draw_array, mix64, to_unit

FIELDS = (
    "n", "delta", "speed", "xi", "M", "qv", "zero_count", "fluct",
    "ell_ratio", "urn_dev", "urn_maxdev", "count_total", "xi_sum",
)
F = {name: i for i, name in enumerate(FIELDS)}
NF = len(FIELDS)

_GOLDEN = np.uint64(GOLDEN)
_NUMPY_BLOCK_BYTES = 32 * 2 ** 20


@njit(nogil=True)
def _simulate_block_nb(inv, variant, q, p_eff, horizon, ckpts, seeds, out):
    nrep = seeds.shape[0]
    d = inv.shape[0]
    K = ckpts.shape[0]
    A = 2.0 * (1.0 - p_eff) / (d - 1)
    Bc = 2.0 * (1.0 - p_eff * d) / (d - 1)
    inv_d = 1.0 / d
    center = (d - 2) / d
    # 1-based stack with a sentinel letter d at the bottom; inv_ext[d] = d + 1
    # points at a count slot that stays 0, so ell needs no root branch.
    inv_ext = np.empty(d + 1, np.int64)
    for j in range(d):
        inv_ext[j] = inv[j]
    inv_ext[d] = d + 1
    word = np.zeros(horizon + 2, np.uint8)
    word[0] = d
    counts = np.zeros(d + 2, np.int64)
    for b in range(nrep):
        state = seeds[b]
        for j in range(d + 2):
            counts[j] = 0
        delta = 0
        xs = 0.0
        xc = 0.0
        M = 0.0
        Mc = 0.0
        qv = 0.0
        qc = 0.0
        zero = 0
        ci = 0
        for n in range(horizon):
            posf = 1.0 if delta > 0 else 0.0
            gamma = inv_ext[word[delta]]
            ratio = 0.0
            if n > 0:
                ratio = counts[gamma] / n
                term = ratio - inv_d * posf
                y = term - xc
                t = xs + y
                xc = (t - xs) - y
                xs = t
            zero += delta == 0

            state += _GOLDEN
            u = to_unit(mix64(state))
            if n == 0:
                a = min(np.int64(u * d), d - 1)
            else:
                tgt = min(np.int64(u * n), n - 1)
                cum = 0
                r = 0
                for j in range(d):
                    cum += counts[j]
                    r += cum <= tgt
                state += _GOLDEN
                hit = to_unit(mix64(state)) < q
                nxt = state + _GOLDEN
                u3 = to_unit(mix64(nxt))
                k = min(np.int64(u3 * (d - 1)), d - 2)
                other = k + (k >= r)
                fresh = min(np.int64(u3 * d), d - 1)
                if variant == 0:
                    a = r if hit else other
                    state = state if hit else nxt
                elif variant == 1:
                    a = r if hit else fresh
                    state = state if hit else nxt
                else:
                    a = other if hit else fresh
                    state = nxt

            back = a == gamma
            word[delta + 1] = a
            delta += 1 - 2 * back
            inc = 1.0 - 2.0 * back
            counts[a] += 1

            G = (1.0 - A * posf) + Bc * ratio
            y = (inc - G) - Mc
            t = M + y
            Mc = (t - M) - y
            M = t
            y = (1.0 - G * G) - qc
            t = qv + y
            qc = (t - qv) - y
            qv = t

            m = n + 1
            if ci < K and m == ckpts[ci]:
                row = out[b, ci]
                row[0] = m
                row[1] = delta
                row[2] = delta / m
                xi = xs / m
                row[3] = xi
                row[4] = M
                row[5] = qv
                row[6] = zero
                row[7] = math.sqrt(m) * (delta / m - center - Bc * xi)
                row[8] = counts[inv_ext[word[delta]]] / m
                s = 0.0
                mx = 0.0
                tot = 0
                for j in range(d):
                    dev = abs(counts[j] / m - inv_d)
                    s += dev
                    if dev > mx:
                        mx = dev
                    tot += counts[j]
                row[9] = s / d
                row[10] = mx
                row[11] = tot
                row[12] = xs
                ci += 1


def _kahan(total, comp, x):
    y = x - comp
    t = total + y
    return t, (t - total) - y


def _simulate_block_np(inv, variant, q, p_eff, horizon, ckpts, seeds, out):
    nrep = seeds.shape[0]
    d = inv.shape[0]
    K = ckpts.shape[0]
    inv = inv.astype(np.int64)
    A = 2.0 * (1.0 - p_eff) / (d - 1)
    Bc = 2.0 * (1.0 - p_eff * d) / (d - 1)
    inv_d = 1.0 / d
    center = (d - 2) / d

    state = seeds.copy()
    word = np.zeros((nrep, horizon + 1), np.uint8)
    counts = np.zeros((nrep, d), np.int64)
    delta = np.zeros(nrep, np.int64)
    xs = np.zeros(nrep)
    xc = np.zeros(nrep)
    M = np.zeros(nrep)
    Mc = np.zeros(nrep)
    qv = np.zeros(nrep)
    qc = np.zeros(nrep)
    zero = np.zeros(nrep, np.int64)
    rows = np.arange(nrep)
    ci = 0
    for n in range(horizon):
        pos = delta > 0
        posf = pos.astype(np.float64)
        top = word[rows, np.maximum(delta - 1, 0)].astype(np.int64)
        gamma = np.where(pos, inv[top], -1)
        if n > 0:
            ell = np.where(pos, counts[rows, np.maximum(gamma, 0)], 0)
            ratio = ell / n
            xs, xc = _kahan(xs, xc, ratio - inv_d * posf)
        else:
            ratio = np.zeros(nrep)
        zero += ~pos

        u = draw_array(state)
        if n == 0:
            a = np.minimum((u * d).astype(np.int64), d - 1)
        else:
            tgt = np.minimum((u * n).astype(np.int64), n - 1)
            cum = np.cumsum(counts, axis=1)
            r = (cum <= tgt[:, None]).sum(axis=1)
            u2 = draw_array(state)
            hit = u2 < q
            if variant == 0:
                u3 = draw_array(state, ~hit)
                k = np.minimum((u3 * (d - 1)).astype(np.int64), d - 2)
                a = np.where(hit, r, k + (k >= r))
            elif variant == 1:
                u3 = draw_array(state, ~hit)
                a = np.where(hit, r, np.minimum((u3 * d).astype(np.int64), d - 1))
            else:
                u3 = draw_array(state)
                k = np.minimum((u3 * (d - 1)).astype(np.int64), d - 2)
                fresh = np.minimum((u3 * d).astype(np.int64), d - 1)
                a = np.where(hit, k + (k >= r), fresh)

        back = pos & (a == gamma)
        push = ~back
        word[rows[push], delta[push]] = a[push]
        delta += np.where(back, -1, 1)
        counts[rows, a] += 1
        inc = np.where(back, -1.0, 1.0)

        G = (1.0 - A * posf) + Bc * ratio
        M, Mc = _kahan(M, Mc, inc - G)
        qv, qc = _kahan(qv, qc, 1.0 - G * G)

        m = n + 1
        if ci < K and m == ckpts[ci]:
            row = out[:, ci]
            row[:, 0] = m
            row[:, 1] = delta
            row[:, 2] = delta / m
            xi = xs / m
            row[:, 3] = xi
            row[:, 4] = M
            row[:, 5] = qv
            row[:, 6] = zero
            row[:, 7] = math.sqrt(m) * (delta / m - center - Bc * xi)
            pos_now = delta > 0
            top_now = word[rows, np.maximum(delta - 1, 0)].astype(np.int64)
            ell_now = np.where(pos_now, counts[rows, inv[top_now]], 0)
            row[:, 8] = ell_now / m
            s = np.zeros(nrep)
            mx = np.zeros(nrep)
            for j in range(d):
                dev = np.abs(counts[:, j] / m - inv_d)
                s = s + dev
                mx = np.maximum(mx, dev)
            row[:, 9] = s / d
            row[:, 10] = mx
            row[:, 11] = counts.sum(axis=1)
            row[:, 12] = xs
            ci += 1


def _prepare(inv, horizon, ckpts, seeds):
    inv = np.ascontiguousarray(inv, dtype=np.uint8)
    ckpts = np.ascontiguousarray(ckpts, dtype=np.int64)
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    if ckpts.size and (ckpts[0] < 1 or ckpts[-1] > horizon or np.any(np.diff(ckpts) <= 0)):
        raise ValueError("checkpoints must be strictly increasing within [1, horizon]")
    out = np.zeros((seeds.shape[0], ckpts.shape[0], NF))
    return inv, ckpts, seeds, out


def simulate_block_numba(inv, variant, q, p_eff, horizon, ckpts, seeds):
    inv, ckpts, seeds, out = _prepare(inv, horizon, ckpts, seeds)
    _simulate_block_nb(inv, int(variant), float(q), float(p_eff), int(horizon), ckpts, seeds, out)
    return out


def simulate_block_numpy(inv, variant, q, p_eff, horizon, ckpts, seeds):
    inv, ckpts, seeds, out = _prepare(inv, horizon, ckpts, seeds)
    step = max(1, _NUMPY_BLOCK_BYTES // (horizon + 1))
    for lo in range(0, seeds.shape[0], step):
        hi = min(lo + step, seeds.shape[0])
        _simulate_block_np(inv, int(variant), float(q), float(p_eff), int(horizon),
                           ckpts, seeds[lo:hi], out[lo:hi])
    return out


def simulate_block(inv, variant, q, p_eff, horizon, ckpts, seeds, backend=None):
    """Simulate one block of replicas; returns ``(replicas, checkpoints, NF)``."""
    backend = backend or _accel.backend_name()
    if backend == "numba":
        return simulate_block_numba(inv, variant, q, p_eff, horizon, ckpts, seeds)
    if backend == "numpy":
        return simulate_block_numpy(inv, variant, q, p_eff, horizon, ckpts, seeds)
    raise ValueError(f"unknown backend {backend!r}")
