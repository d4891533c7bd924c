import numpy as np
import pytest

import oracles
from votingpower.enumeration import (
    EnumerationReport,
    automorphism_count,
    enumerate_class,
    enumerate_complete,
    enumerate_simple,
    enumerate_weighted,
    iso_classes,
    labeled_count_from_classes,
)
from votingpower.game import EnvelopeError, GameError, canonical_form, is_complete, is_weighted, realize


@pytest.mark.parametrize("n,count", [(1, 1), (2, 4), (3, 18), (4, 166)])
def test_labeled_counts_match_brute_force(n, count):
    stream = enumerate_simple(n)
    assert len(stream) == count
    assert {g.table for g in stream} == {g.table for g in oracles.brute_simple_games(n)}


def test_monotone_count_relation():
    # simple games exclude the two constant functions
    for n in (1, 2, 3, 4):
        assert len(enumerate_simple(n)) == oracles.monotone_count(n) - 2


def test_labeled_n5():
    assert len(enumerate_simple(5)) == 7579


@pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 8), (4, 28), (5, 208)])
def test_iso_counts(n, count):
    stream = enumerate_simple(n, up_to_iso=True)
    assert len(stream) == count
    assert int(stream.orbit_sizes.sum()) == len(enumerate_simple(n))
    assert labeled_count_from_classes(n) == len(enumerate_simple(n))


def test_iso_representatives_distinct_under_canonical_form():
    reps = list(enumerate_simple(4, up_to_iso=True))
    assert len({canonical_form(g) for g in reps}) == len(reps)


def test_class_chain_inclusion():
    for n in range(1, 6):
        simple = set(enumerate_simple(n).tables.tolist())
        complete = set(enumerate_complete(n).tables.tolist())
        weighted = set(enumerate_weighted(n).tables.tolist())
        assert weighted <= complete <= simple


def test_complete_and_weighted_match_direct_tests():
    for g in enumerate_simple(4):
        assert (g.table in set(enumerate_complete(4).tables.tolist())) == is_complete(g)[0]
    weighted = set(enumerate_weighted(4).tables.tolist())
    for g in enumerate_simple(4):
        assert (g.table in weighted) == is_weighted(g)[0]


def test_weighted_representations_realize():
    stream = enumerate_weighted(4, up_to_iso=True)
    for g, rep in stream.with_representations():
        assert realize(rep) == g


def test_counts_n5_complete_weighted():
    assert len(enumerate_complete(5)) == 3285
    assert len(enumerate_weighted(5)) == 3285
    assert len(enumerate_complete(5, up_to_iso=True)) == 117


def test_automorphisms_times_orbit_is_factorial():
    reps, sizes, _ = iso_classes(4)
    for s in sizes:
        assert automorphism_count(4, int(s)) * int(s) == 24


def test_report_row():
    r = enumerate_class(3, "simple").report
    assert isinstance(r, EnumerationReport)
    row = r.csv_row()
    assert row[:4] == [3, "simple", "false", 18]


def test_rejects_bad_arguments():
    with pytest.raises(EnvelopeError):
        enumerate_simple(7)
    with pytest.raises(GameError):
        enumerate_class(3, "linear")


def test_simple_stream_has_no_representations():
    with pytest.raises(GameError):
        next(enumerate_simple(2).with_representations())
