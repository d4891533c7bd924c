from fractions import Fraction as F
import random

import pytest

import oracles
from votingpower.game import EnvelopeError, GameError, WeightedGame, realize
from votingpower.limits import (
    BoundCheckConfig,
    Chain,
    atomic_limit_estimate,
    chain_game,
    generic_bound_scan,
    norm1_convergence,
    nucleolus_bound_check,
    nucleolus_bound_scan,
    nucleolus_tightness_search,
    plt_ratios,
    psi_bound,
    psi_chain,
    psi_vector,
    random_normalized_game,
    regularity,
)


def test_chain_layout():
    c = Chain((5,), (2, 1), (3,), F(1, 2))
    assert c.weights(6) == (5, 2, 1, 2, 1, 3)
    assert c.index(("fixed", 0), 6) == 5
    assert c.index(("ocean", 1), 6) == 2
    with pytest.raises(GameError):
        c.index(("atomic", 1), 6)
    assert chain_game(c, 6).quota == 7


def test_chain_validation():
    with pytest.raises(GameError):
        Chain(ocean=())
    with pytest.raises(GameError):
        Chain(q_rel=1)
    with pytest.raises(GameError):
        Chain(steps=(5, 3))


def test_regularity():
    c = Chain((), (2, 1), (), F(1, 3), (6, 12, 24))
    assert regularity(c, ("ocean", 0))["regular"]
    lone = Chain((10,), (1,), (), F(1, 2), (4, 8, 16))
    assert not regularity(lone, ("atomic", 0), epsilon=F(1, 2))["regular"]


def test_plt_converges_on_regular_chain():
    c = Chain((), (2, 1), (), F(1, 2), (11, 21, 41, 81))
    rep = plt_ratios(c, "banzhaf", [(("ocean", 0), ("ocean", 1))])
    (v,) = rep.verdict.values()
    assert v["converging"]
    assert v["target"] == "2"


def test_plt_on_psi_chain_undefined_at_even_n():
    rep = plt_ratios(psi_chain(F(1, 2), (10, 11)), "ssi", [(("ocean", 0), ("fixed", 0))])
    (v,) = rep.verdict.values()
    assert v["undefined_steps"] == [10]
    assert not v["converging"]


def test_norm1_on_regular_chain_decreases():
    c = Chain((), (2, 1), (), F(1, 3), (6, 12, 24))
    rep = norm1_convergence(c, "ssi")
    assert rep.verdict["decreasing"]
    assert rep.exponent < 0
    assert len(rep.csv_rows()) == 3


def test_atomic_limit_report():
    c = Chain((F(1, 1),), (F(1, 10),), (), F(1, 2), (12, 22, 42))
    rep = atomic_limit_estimate(c, "banzhaf")
    assert "atomic0" in rep.verdict
    assert 0 < F(rep.verdict["atomic0"]["last_value"]) < 1


def test_nucleolus_bound_check_values():
    chk = nucleolus_bound_check(WeightedGame(F(3, 4), (F(1, 2), F(1, 4), F(1, 4))))
    assert chk["lhs"] == 1
    assert chk["rhs"] == 4
    assert chk["holds"]


def test_conjectured_nucleolus_bound_counterexample():
    g = WeightedGame(F(13, 20), (F(2, 5), F(3, 10), F(3, 10)))
    chk = nucleolus_bound_check(g, "conjectured")
    assert chk["nucleolus"].values == (1, 0, 0)
    assert tuple(oracles.naive_nucleolus(realize(g))) == (1, 0, 0)
    assert chk["lhs"] == F(6, 5)
    assert chk["rhs"] == F(8, 7)
    assert not chk["holds"]
    assert nucleolus_bound_check(g, "proven")["holds"]


def test_nucleolus_bound_scan_small():
    out = nucleolus_bound_scan(40, seed=1, n_min=2, n_max=6)
    assert out["violations"]["proven"] == []
    assert F(out["max_lhs_over_rhs"]["proven"]) <= 1


def test_tightness_search_exceeds_conjecture():
    out = nucleolus_tightness_search(4, seed=0)
    assert F(out["best_ratio"]) > 1


def test_random_normalized_game():
    g = random_normalized_game(random.Random(0), 5)
    assert sum(g.weights) == 1
    assert 0 < g.quota < 1


def test_generic_scan_exact_and_float():
    exact = generic_bound_scan(BoundCheckConfig(n_max=5), 10, seed=2)
    assert exact["precision"] == "exact"
    rough = generic_bound_scan(BoundCheckConfig(alpha=F(1, 2), n_max=5, sampler="replica"), 6, seed=2)
    assert rough["precision"] == "float64"
    with pytest.raises(GameError):
        generic_bound_scan(BoundCheckConfig(sampler="odd"), 1)


def test_psi_vector():
    assert psi_vector(3) == (F(2, 5), F(2, 5), F(1, 5))
    assert sum(psi_vector(9)) == 1


def test_psi_bound_tight_n3_ssi():
    out = psi_bound(3, "ssi")
    assert out["lhs"] == out["floor"] == F(4, 15)


def test_psi_bound_refuses_other_indices():
    with pytest.raises(EnvelopeError):
        psi_bound(4, "msr")
    with pytest.raises(EnvelopeError):
        psi_bound(4, "semivalue")
