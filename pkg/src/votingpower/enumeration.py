"""Exhaustive generation of simple, complete and weighted games.

Truth tables for n <= 6 fit in one 64-bit word, so every labeled monotone
function is held in a sorted ``uint64`` array. Monotone functions on n
players are built from pairs ``f0 <= f1`` on n - 1 players (``f0`` where the
last player is absent, ``f1`` where present). Isomorphism classes come from
orbit marking: scanning the sorted array, the first unmarked table is the
smallest in its orbit (its canonical form), and all its relabelings are
marked.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from .game import (
    EnvelopeError,
    GameError,
    SimpleGame,
    WeightedGame,
    _perm_images,
    is_weighted,
    masks,
)

__all__ = [
    "CLASSES",
    "MAX_ENUMERATION_PLAYERS",
    "EnumerationReport",
    "GameStream",
    "enumerate_simple",
    "enumerate_complete",
    "enumerate_weighted",
    "enumerate_class",
    "labeled_tables",
    "iso_classes",
]

CLASSES = ("simple", "complete", "weighted")
MAX_ENUMERATION_PLAYERS = 6


@dataclass(frozen=True)
class EnumerationReport:
    n: int
    game_class: str
    up_to_iso: bool
    count: int
    elapsed: float

    def csv_row(self) -> list:
        return [self.n, self.game_class, str(self.up_to_iso).lower(), self.count, f"{self.elapsed:.3f}"]


@dataclass
class GameStream:
    """Iterable over the games of one class, backed by an array of truth tables.

    ``orbit_sizes`` is set in isomorphism-reduced mode (number of labeled games
    in each class). Weighted streams also carry a realizing representation per
    game, available through :meth:`with_representations`.
    """

    n: int
    game_class: str
    up_to_iso: bool
    tables: np.ndarray
    elapsed: float
    orbit_sizes: Optional[np.ndarray] = None
    _representations: Optional[list] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.tables)

    def __iter__(self) -> Iterator[SimpleGame]:
        for t in self.tables:
            yield SimpleGame(self.n, int(t), check=False)

    def with_representations(self) -> Iterator[tuple]:
        if self._representations is None:
            raise GameError("representations are only attached to weighted streams")
        for t, rep in zip(self.tables, self._representations):
            yield SimpleGame(self.n, int(t), check=False), rep

    @property
    def report(self) -> EnumerationReport:
        return EnumerationReport(self.n, self.game_class, self.up_to_iso, len(self.tables), self.elapsed)


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_ENUMERATION_PLAYERS:
        raise EnvelopeError(
            f"enumeration supports 1 <= n <= {MAX_ENUMERATION_PLAYERS} players, got {n}; "
            "use local search for larger instances"
        )


@lru_cache(maxsize=None)
def _monotone(n: int) -> np.ndarray:
    """All monotone Boolean functions on n variables (constants included), sorted."""
    if n == 0:
        return np.array([0, 1], dtype=np.uint64)
    prev = _monotone(n - 1)
    shift = np.uint64(1 << (n - 1))
    parts = []
    for f1 in prev:
        f0 = prev[(prev & ~f1) == 0]
        parts.append(f0 | (f1 << shift))
    out = np.concatenate(parts)
    out.sort()
    return out


@lru_cache(maxsize=None)
def labeled_tables(n: int) -> np.ndarray:
    """Sorted truth tables of all labeled simple games on n players."""
    _check_n(n)
    m = _monotone(n)
    top = np.uint64(1) << np.uint64((1 << n) - 1)
    keep = ((m & np.uint64(1)) == 0) & ((m & top) != 0)
    out = m[keep]
    out.flags.writeable = False
    return out


def _table_bits(t: int, n: int) -> np.ndarray:
    return ((np.uint64(t) >> np.arange(1 << n, dtype=np.uint64)) & np.uint64(1)).astype(bool)


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    weights = np.uint64(1) << np.arange(bits.shape[1], dtype=np.uint64)
    return (bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


@lru_cache(maxsize=None)
def iso_classes(n: int) -> tuple:
    """(canonical tables, orbit sizes, class id of every labeled table)."""
    labeled = labeled_tables(n)
    _, src = _perm_images(n)
    marked = np.zeros(len(labeled), dtype=bool)
    class_id = np.full(len(labeled), -1, dtype=np.int64)
    reps, sizes = [], []
    pos = 0
    total = len(labeled)
    chunk = 4096
    while pos < total:
        window = marked[pos:pos + chunk]
        if window.all():
            pos += len(window)
            continue
        pos += int(np.argmin(window))
        t = int(labeled[pos])
        images = np.unique(_pack_rows(_table_bits(t, n)[src]))
        idx = np.searchsorted(labeled, images)
        marked[idx] = True
        class_id[idx] = len(reps)
        reps.append(t)
        sizes.append(len(images))
    reps_arr = np.array(reps, dtype=np.uint64)
    return reps_arr, np.array(sizes, dtype=np.int64), class_id


def _complete_mask(tables: np.ndarray, n: int) -> np.ndarray:
    """Vectorized Isbell completeness test on an array of truth tables."""
    mk = masks(n)
    ok = np.ones(len(tables), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            avoid = np.uint64(mk.without[i] & mk.without[j])
            xi = (tables >> np.uint64(1 << i)) & avoid
            xj = (tables >> np.uint64(1 << j)) & avoid
            comparable = ((xj & ~xi) == 0) | ((xi & ~xj) == 0)
            ok &= comparable
    return ok


def _permute_weighted(rep: WeightedGame, perm) -> WeightedGame:
    w = [0] * len(perm)
    for i, p in enumerate(perm):
        w[p] = rep.weights[i]
    return WeightedGame(rep.quota, tuple(w))


def enumerate_simple(n: int, up_to_iso: bool = False) -> GameStream:
    """Every simple game on n players, once each (once per class if ``up_to_iso``)."""
    return enumerate_class(n, "simple", up_to_iso)


def enumerate_complete(n: int, up_to_iso: bool = False) -> GameStream:
    return enumerate_class(n, "complete", up_to_iso)


def enumerate_weighted(n: int, up_to_iso: bool = False) -> GameStream:
    """Weighted games with a realizing integer representation for each."""
    return enumerate_class(n, "weighted", up_to_iso)


def enumerate_class(n: int, game_class: str, up_to_iso: bool = False) -> GameStream:
    if game_class not in CLASSES:
        raise GameError(f"unknown game class {game_class!r}; choose from {', '.join(CLASSES)}")
    _check_n(n)
    start = time.perf_counter()
    if up_to_iso:
        tables, sizes, _ = iso_classes(n)
    else:
        tables, sizes = labeled_tables(n), None
    if game_class != "simple":
        keep = _complete_mask(tables, n)
        tables = tables[keep]
        sizes = None if sizes is None else sizes[keep]
    reps = None
    if game_class == "weighted":
        tables, sizes, reps = _weighted_filter(n, tables, sizes, up_to_iso)
    return GameStream(n, game_class, up_to_iso, tables, time.perf_counter() - start, sizes, reps)


def _weighted_filter(n, tables, sizes, up_to_iso):
    if up_to_iso:
        keep, reps = [], []
        for t in tables:
            ok, rep = is_weighted(SimpleGame(n, int(t), check=False))
            keep.append(ok)
            if ok:
                reps.append(rep)
        keep = np.array(keep, dtype=bool)
        return tables[keep], sizes[keep], reps
    # labeled: one LP per isomorphism class, then relabel the witness
    canon, _, class_id = iso_classes(n)
    ids = class_id[np.searchsorted(labeled_tables(n), tables)]
    perms, src = _perm_images(n)
    keep = np.zeros(len(tables), dtype=bool)
    reps = [None] * len(tables)
    for cid in np.unique(ids):
        ok, rep = is_weighted(SimpleGame(n, int(canon[cid]), check=False))
        if not ok:
            continue
        where = np.flatnonzero(ids == cid)
        keep[where] = True
        images = _pack_rows(_table_bits(int(canon[cid]), n)[src])
        order = np.argsort(images, kind="stable")
        hit = order[np.searchsorted(images[order], tables[where])]
        for w, k in zip(where, hit):
            reps[w] = _permute_weighted(rep, perms[k])
    return tables[keep], None, [r for r, k in zip(reps, keep) if k]


def labeled_count_from_classes(n: int) -> int:
    """Labeled simple-game count recovered as the sum of orbit sizes."""
    _, sizes, _ = iso_classes(n)
    return int(sizes.sum())


def automorphism_count(n: int, orbit_size: int) -> int:
    return math.factorial(n) // orbit_size
