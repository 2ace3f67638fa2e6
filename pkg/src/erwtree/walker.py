"""Walker position on the Cayley tree, kept as a reduced word on a stack."""

from dataclasses import dataclass, field
from typing import Optional

from .group import GroupPresentation, cancels, inverse


@dataclass
class WalkerState:
    pres: GroupPresentation
    word: bytearray = field(default_factory=bytearray)
    n: int = 0

    @property
    def delta(self) -> int:
        return len(self.word)

    def copy(self) -> "WalkerState":
        return WalkerState(self.pres, bytearray(self.word), self.n)


def apply_step(state: WalkerState, g: int) -> WalkerState:
    """Multiply by generator ``g`` (in place) and return the state."""
    g = int(g)
    if state.word and cancels(state.pres, state.word[-1], g):
        state.word.pop()
    else:
        state.word.append(g)
    state.n += 1
    return state


def toward_root(state: WalkerState) -> Optional[int]:
    """The unique generator that moves one step closer to the root, or None at the root."""
    if not state.word:
        return None
    return inverse(state.pres, state.word[-1])


def distance(state: WalkerState) -> int:
    return len(state.word)
