"""Free products Z^{*d1} * Z2^{*d2} and their standard generating sets.

Generators are small integer ids.  The canonical order puts the ``2*d1``
free halves first, each ``a_i`` immediately followed by ``a_i^-1``, then
the ``d2`` involutions ``b_j``.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

FREE = "free"
INVOLUTION = "involution"


@dataclass(frozen=True)
class Generator:
    id: int
    kind: str
    inverse_id: int


@dataclass(frozen=True)
class GroupPresentation:
    d1: int
    d2: int
    generators: Tuple[Generator, ...] = field(repr=False)

    @property
    def d(self) -> int:
        return 2 * self.d1 + self.d2

    @property
    def inverse_table(self) -> np.ndarray:
        """``inverse_table[g]`` is the id of g^-1 (uint8, for the kernels)."""
        return np.array([g.inverse_id for g in self.generators], dtype=np.uint8)

    @property
    def n_involutions(self) -> int:
        return sum(g.kind == INVOLUTION for g in self.generators)

    def label(self, g: int) -> str:
        if g < 2 * self.d1:
            i = g // 2 + 1
            return f"a{i}" if g % 2 == 0 else f"a{i}^-1"
        return f"b{g - 2 * self.d1 + 1}"

    def name(self) -> str:
        parts = []
        if self.d1:
            parts.append("Z" if self.d1 == 1 else f"Z^*{self.d1}")
        if self.d2:
            parts.append("Z2" if self.d2 == 1 else f"Z2^*{self.d2}")
        return " * ".join(parts)


def make_presentation(d1: int, d2: int) -> GroupPresentation:
    if d1 < 0 or d2 < 0:
        raise ValueError(f"d1 and d2 must be nonnegative, got d1={d1}, d2={d2}")
    d = 2 * d1 + d2
    if d < 2:
        raise ValueError(f"degree d = 2*d1 + d2 = {d} < 2 has no infinite tree walk")
    if d > 255:
        raise ValueError(f"degree d = {d} exceeds the 1-byte generator id range")
    gens = []
    for i in range(d1):
        gens.append(Generator(2 * i, FREE, 2 * i + 1))
        gens.append(Generator(2 * i + 1, FREE, 2 * i))
    for j in range(d2):
        g = 2 * d1 + j
        gens.append(Generator(g, INVOLUTION, g))
    return GroupPresentation(d1, d2, tuple(gens))


def _id(g) -> int:
    return g.id if isinstance(g, Generator) else int(g)


def inverse(pres: GroupPresentation, g) -> int:
    return pres.generators[_id(g)].inverse_id


def cancels(pres: GroupPresentation, top, g) -> bool:
    """True iff appending ``g`` to a reduced word ending in ``top`` shortens it."""
    return _id(g) == inverse(pres, top)


def reduce_word(pres: GroupPresentation, letters) -> list:
    """Freely reduce a letter sequence (slow reference, rescans until stable)."""
    word = [_id(g) for g in letters]
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if cancels(pres, word[i], word[i + 1]):
                del word[i:i + 2]
                changed = True
                break
    return word
