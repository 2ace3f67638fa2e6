from hypothesis import given, settings, strategies as st

from erwtree.group import make_presentation, reduce_word
from erwtree.walker import WalkerState, apply_step, distance, toward_root


def walk(pres, letters):
    s = WalkerState(pres)
    for g in letters:
        apply_step(s, g)
    return s


def test_free_cancellation():
    s = walk(make_presentation(2, 0), [0, 1])
    assert s.delta == 0 and s.n == 2


def test_involution_cancellation():
    s = walk(make_presentation(0, 4), [0, 0])
    assert s.delta == 0


def test_repeat_moves_away():
    s = walk(make_presentation(2, 0), [0, 0])
    assert list(s.word) == [0, 0] and s.delta == 2


def test_toward_root():
    free = make_presentation(2, 0)
    assert toward_root(WalkerState(free)) is None
    assert toward_root(walk(free, [0])) == 1
    assert toward_root(walk(make_presentation(0, 4), [1])) == 1


def test_distance_examples():
    free = make_presentation(2, 0)
    assert distance(WalkerState(free)) == 0
    assert distance(walk(free, [3])) == 1
    assert distance(walk(free, [0, 0, 1])) == 1


def test_deterministic_paths():
    inv = make_presentation(0, 4)
    s = WalkerState(inv)
    seen = []
    for _ in range(10):
        apply_step(s, 0)
        seen.append(s.delta)
    assert seen == [1, 0] * 5
    s = walk(make_presentation(2, 0), [0] * 50)
    assert s.delta == 50


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_matches_naive_reducer(d1, d2, data):
    if 2 * d1 + d2 < 2:
        return
    pres = make_presentation(d1, d2)
    letters = data.draw(st.lists(st.integers(0, pres.d - 1), max_size=1000))
    s = WalkerState(pres)
    prev = 0
    for g in letters:
        gamma = toward_root(s)
        apply_step(s, g)
        # one step changes the distance by exactly one, down iff g = gamma
        assert s.delta == (prev - 1 if g == gamma else prev + 1)
        prev = s.delta
    assert list(s.word) == reduce_word(pres, letters)
    assert s.n == len(letters)
