"""Per-replica counter-based random streams.

Every replica owns a SplitMix64 stream whose starting state is derived from
``(base_seed, replica_index)`` by the SplitMix64 finaliser, so a replica's
draws never depend on how replicas are scheduled.  The same arithmetic is
provided three times: plain Python ints (``ReplicaRandom``), numba scalars
(``next_state``/``mix64``/``to_unit``) and numpy uint64 arrays
(``*_array`` helpers).  All three produce identical bits.
"""

import numpy as np

from ._accel import njit

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
INDEX_SALT = 0x632BE59BD9B4E019
UNIT = 2.0 ** -53

_GOLDEN = np.uint64(GOLDEN)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)


def _mix64_int(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def replica_seed(base_seed: int, replica_index: int) -> int:
    """Initial stream state for one replica."""
    salt = _mix64_int((replica_index * GOLDEN + INDEX_SALT) & MASK64)
    return _mix64_int((base_seed & MASK64) ^ salt)


def replica_seeds(base_seed: int, start: int, count: int) -> np.ndarray:
    return np.array([replica_seed(base_seed, start + i) for i in range(count)],
                    dtype=np.uint64)


class ReplicaRandom:
    """Pure-Python view of one replica stream (slow; used by the reference API)."""

    def __init__(self, base_seed: int = 0, replica_index: int = 0, *, state=None):
        self.state = replica_seed(base_seed, replica_index) if state is None else int(state)

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return _mix64_int(self.state)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * UNIT

    def below(self, k: int) -> int:
        """Uniform integer in [0, k) via floor(u*k)."""
        return min(int(self.uniform() * k), k - 1)


@njit(nogil=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(nogil=True)
def to_unit(z):
    return float(z >> _S11) * UNIT


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def draw_array(state: np.ndarray, mask=None):
    """Advance ``state`` in place (only where ``mask``) and return uniforms.

    Entries outside ``mask`` keep their state; their returned value is junk.
    """
    nxt = state + _GOLDEN
    u = (mix64_array(nxt) >> _S11).astype(np.float64) * UNIT
    if mask is None:
        state[...] = nxt
    else:
        np.copyto(state, nxt, where=mask)
    return u
