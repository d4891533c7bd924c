from fractions import Fraction
from itertools import permutations
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_simple_games, minimal_winning, random_simple_game, to_mask
from votingpower.game import (
    EnvelopeError,
    GameError,
    SimpleGame,
    WeightedGame,
    canonical_form,
    desirability,
    dummies,
    is_complete,
    is_decisive,
    is_weighted,
    realize,
)


def test_rejects_non_monotone():
    with pytest.raises(GameError):
        SimpleGame(2, 0b0110)


def test_rejects_winning_empty_and_losing_grand():
    with pytest.raises(GameError):
        SimpleGame(2, 0b1001)
    with pytest.raises(GameError):
        SimpleGame(2, 0b0000)


def test_weighted_validation():
    with pytest.raises(GameError):
        WeightedGame(5, (1, 1))
    with pytest.raises(GameError):
        WeightedGame(1, (1, -1, 2))
    with pytest.raises(GameError):
        WeightedGame(0, (1, 1))


def test_table_envelope():
    with pytest.raises(EnvelopeError):
        realize(WeightedGame(11, [1] * 21))


def test_min_winning_matches_oracle():
    rng = random.Random(1)
    for _ in range(40):
        g = random_simple_game(rng, rng.randint(1, 5))
        assert set(g.min_winning_masks) == {to_mask(s) for s in minimal_winning(g)}
        assert SimpleGame.from_min_winning(g.n, [[i for i in range(g.n) if m >> i & 1] for m in g.min_winning_masks]) == g


def test_realize_matches_predicate():
    g = WeightedGame(Fraction(7, 2), (3, 2, 1, 1))
    t = realize(g)
    for s in range(16):
        assert t.is_winning(s) == g.is_winning(s)


def test_integral_form_same_game():
    g = WeightedGame(Fraction(1, 2), (Fraction(1, 3), Fraction(1, 6), Fraction(1, 2)))
    assert realize(g.integral_form()) == realize(g)
    assert g.integral_form().is_integral


def test_dummies_and_decisive():
    g = realize(WeightedGame(2, (1, 1, 1)))
    assert is_decisive(g)
    assert not is_decisive(realize(WeightedGame(3, (2, 1, 1))))
    assert dummies(g) == frozenset()
    h = realize(WeightedGame(2, (2, 1, 0)))
    assert dummies(h) == frozenset({1, 2})


def test_desirability_total_for_weighted():
    rel = desirability(realize(WeightedGame(4, (3, 2, 1, 1))))
    assert rel.is_total
    assert rel.compare(0, 3).value == ">"
    assert rel.equivalence_classes() == [(0,), (1, 2, 3)]


def test_incomplete_game_not_weighted():
    g = SimpleGame.from_min_winning(4, [[0, 1], [2, 3]])
    assert not is_complete(g)[0]
    assert is_weighted(g) == (False, None)


def test_weightedness_witness_on_all_small_games():
    for n in (1, 2, 3):
        for g in brute_simple_games(n):
            ok, w = is_weighted(g)
            assert ok
            assert realize(w) == g


def test_weightedness_agrees_with_brute_search_n4():
    from oracles import msr_brute

    for g in brute_simple_games(4):
        ok, _ = is_weighted(g)
        assert ok == (msr_brute(g, max_total=10) is not None)


def test_canonical_form_is_invariant():
    rng = random.Random(3)
    for _ in range(15):
        n = rng.randint(2, 6)
        g = random_simple_game(rng, n)
        c = canonical_form(g)
        perm = list(range(n))
        rng.shuffle(perm)
        assert canonical_form(g.permuted(perm)) == c


def test_canonical_form_separates_classes():
    games = brute_simple_games(3)
    assert len({canonical_form(g) for g in games}) == 8


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=6), st.integers(1, 30))
def test_permuted_weighted(weights, q):
    q = min(q, max(1, sum(weights)))
    if sum(weights) < q:
        return
    g = WeightedGame(q, weights)
    n = g.n
    perm = list(reversed(range(n)))
    moved = WeightedGame(q, [weights[perm.index(i)] for i in range(n)])
    assert realize(g).permuted(perm) == realize(moved)
