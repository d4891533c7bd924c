from fractions import Fraction as F
import random

import pytest

import oracles
from votingpower.enumeration import enumerate_simple, enumerate_weighted
from votingpower.game import EnvelopeError, GameError, WeightedGame, realize
from votingpower.indices import compute
from votingpower.inverse import (
    InverseSolution,
    LocalSearchConfig,
    TargetDistribution,
    achievable_banzhaf,
    alon_edelman_rhs,
    certified_lower_bound,
    distance,
    sigma_as_weights_report,
    solve_exhaustive,
    solve_local_search,
)

SIGMA = (F(3, 4), F(1, 4), F(0), F(0), F(0))


def test_distance_norms():
    a, b = (F(1), F(0)), (F(1, 2), F(1, 2))
    assert distance(a, b, "l1") == 1
    assert distance(a, b, "l2") == F(1, 2)  # squared
    assert distance(a, b, "linf") == F(1, 2)
    with pytest.raises(GameError):
        distance(a, b, "l3")


def test_target_validation():
    with pytest.raises(GameError):
        TargetDistribution((F(1, 2), F(1, 3)))
    with pytest.raises(GameError):
        TargetDistribution((F(3, 2), F(-1, 2)))
    t = TargetDistribution((F(1, 4), F(3, 4)))
    assert t.order == (1, 0)


def _brute_best(sigma, tables, n, norm="l1"):
    from votingpower.game import SimpleGame

    best = None
    for t in tables:
        g = SimpleGame(n, int(t), check=False)
        d = distance(oracles.banzhaf(g), sigma, norm)
        best = d if best is None else min(best, d)
    return best


@pytest.mark.parametrize("norm", ["l1", "l2", "linf"])
def test_exhaustive_matches_labeled_brute_force(norm):
    rng = random.Random(4)
    for n in (2, 3, 4):
        raw = [rng.randint(0, 6) for _ in range(n)]
        raw[0] += 1
        sigma = tuple(F(r, sum(raw)) for r in raw)
        sol = solve_exhaustive(sigma, "simple", "banzhaf", norm)
        assert sol.certificate == "exact-optimal"
        assert sol.distance == _brute_best(sigma, enumerate_simple(n).tables, n, norm)
        assert compute(sol.game, "banzhaf").values == sol.power.values


def test_exhaustive_weighted_class():
    sol = solve_exhaustive((F(1, 2), F(1, 3), F(1, 6)), "weighted", "ssi")
    assert sol.distance == _min_over(enumerate_weighted(3), (F(1, 2), F(1, 3), F(1, 6)), "ssi")


def _min_over(stream, sigma, kind):
    return min(distance(compute(g, kind).values, sigma) for g in stream)


def test_exhaustive_known_values_n5():
    assert solve_exhaustive(SIGMA, "simple", "banzhaf").distance == F(15, 38)
    assert solve_exhaustive(SIGMA, "simple", "ssi").distance == F(1, 3)


def test_exhaustive_threads_agree():
    a = solve_exhaustive((F(1, 2), F(1, 4), F(1, 4), F(0)), "simple", "pgi", threads=1)
    b = solve_exhaustive((F(1, 2), F(1, 4), F(1, 4), F(0)), "simple", "pgi", threads=2)
    assert a.distance == b.distance
    assert a.game == b.game


def test_solution_rejects_wrong_distance():
    g = realize(WeightedGame(2, (1, 1, 1)))
    p = compute(g, "banzhaf")
    with pytest.raises(GameError):
        InverseSolution((F(1), F(0), F(0)), g, p, F(0), "heuristic")
    with pytest.raises(GameError):
        InverseSolution((F(1), F(0), F(0)), g, p, F(4, 3), "heuristic", lower_bound=F(2))


def test_local_search_finds_majority():
    sol = solve_local_search((F(1, 3),) * 3, "banzhaf")
    assert sol.distance == 0
    assert sol.certificate == "heuristic"


def test_local_search_reproducible():
    sigma = (F(2, 5), F(3, 10), F(1, 5), F(1, 10))
    cfg = LocalSearchConfig(max_weight=20, seed=3)
    a = solve_local_search(sigma, "ssi", config=cfg)
    b = solve_local_search(sigma, "ssi", config=cfg)
    assert a.to_json() == b.to_json()


def test_local_search_with_bound():
    sol = solve_local_search(SIGMA, "banzhaf", lower_bound=F(1, 9))
    assert sol.certificate == "heuristic-with-lower-bound"
    assert sol.distance >= F(1, 9)


def test_rhs_values():
    assert alon_edelman_rhs(F(1, 10), 2) == F(57, 70)
    assert alon_edelman_rhs(F(1, 10), 2, "improved") == F(3, 5)
    assert alon_edelman_rhs(0, 3) == 0
    with pytest.raises(GameError):
        alon_edelman_rhs(F(1, 3), 2)


def test_achievable_banzhaf_k2():
    assert set(achievable_banzhaf(2)) == {(F(1), F(0)), (F(0), F(1)), (F(1, 2), F(1, 2))}


def test_certified_bound_is_sound_against_exhaustive():
    for variant in ("original", "improved"):
        bound = certified_lower_bound(SIGMA, 2, variant)
        for n in (2, 3, 4, 5):
            assert solve_exhaustive(SIGMA[:n], "simple", "banzhaf").distance >= bound


def test_certified_bound_values():
    assert certified_lower_bound(SIGMA, 2) > F(1, 9)
    assert certified_lower_bound(SIGMA, 2, "improved") == F(5, 32)
    assert certified_lower_bound(SIGMA, 2, method="triangle") < certified_lower_bound(SIGMA, 2)
    assert certified_lower_bound((F(1, 2), F(1, 2), F(0)), 2) == 0


def test_certified_bound_envelope():
    with pytest.raises(EnvelopeError):
        certified_lower_bound(SIGMA, 7)
    with pytest.raises(GameError):
        certified_lower_bound(SIGMA, 2, method="magic")


def test_sigma_as_weights():
    rep = sigma_as_weights_report((F(3, 4), F(1, 4)), "banzhaf")
    assert rep["power"].values == (1, 0)
    assert rep["distance"] == F(1, 2)
