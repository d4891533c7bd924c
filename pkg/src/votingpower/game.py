"""Simple games and weighted majority games.

Coalitions are bitmasks over players ``0..n-1``. A game's truth table is a
single Python int whose bit ``S`` is set iff coalition ``S`` wins, so most
structural questions reduce to a handful of big-integer operations against
precomputed per-``n`` masks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "MAX_TABLE_PLAYERS",
    "MAX_CANONICAL_PLAYERS",
    "GameError",
    "EnvelopeError",
    "Coalition",
    "SimpleGame",
    "WeightedGame",
    "Comparison",
    "DesirabilityRelation",
    "from_weights",
    "realize",
    "minimal_winning",
    "is_complete",
    "is_weighted",
    "is_decisive",
    "dummies",
    "canonical_form",
    "masks",
]

MAX_TABLE_PLAYERS = 20
MAX_CANONICAL_PLAYERS = 12
_BRUTE_CANONICAL_PLAYERS = 7
_MAX_CANONICAL_CANDIDATES = 200_000


class GameError(ValueError):
    """Invalid game data."""


class EnvelopeError(GameError):
    """The request is outside the supported size envelope."""


def popcount(x: int) -> int:
    return x.bit_count()


def _pack(bits: np.ndarray) -> int:
    return int.from_bytes(np.packbits(bits.astype(np.uint8), bitorder="little").tobytes(), "little")


def _unpack(table: int, n: int) -> np.ndarray:
    size = 1 << n
    nbytes = max(1, size // 8)
    raw = np.frombuffer(table.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:size].astype(bool)


class Masks:
    """Truth-table masks for a fixed player count."""

    def __init__(self, n: int):
        self.n = n
        size = 1 << n
        self.full = (1 << size) - 1
        idx = np.arange(size, dtype=np.int64)
        self.without = tuple(_pack(((idx >> i) & 1) == 0) for i in range(n))
        self.with_ = tuple(self.full ^ m for m in self.without)
        sizes = np.zeros(size, dtype=np.int64)
        for i in range(n):
            sizes += (idx >> i) & 1
        self.sizes = sizes
        self.by_size = tuple(_pack(sizes == k) for k in range(n + 1))


@lru_cache(maxsize=None)
def masks(n: int) -> Masks:
    return Masks(n)


@dataclass(frozen=True, order=True)
class Coalition:
    """A set of players stored as a bitmask (players are 0-indexed)."""

    mask: int
    n: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.n:
            raise GameError(f"coalition {self.mask:#b} has players outside 0..{self.n - 1}")

    @classmethod
    def of(cls, players: Iterable[int], n: int) -> "Coalition":
        m = 0
        for p in players:
            if not 0 <= p < n:
                raise GameError(f"player {p} outside 0..{n - 1}")
            m |= 1 << p
        return cls(m, n)

    @property
    def members(self) -> tuple:
        return tuple(i for i in range(self.n) if self.mask >> i & 1)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __contains__(self, player: int) -> bool:
        return bool(self.mask >> player & 1)

    def __str__(self) -> str:
        return "{" + ",".join(str(i + 1) for i in self.members) + "}"


def _coalition_key(mask: int):
    return (popcount(mask), tuple(i for i in range(mask.bit_length()) if mask >> i & 1))


def _to_mask(coalition) -> int:
    if isinstance(coalition, Coalition):
        return coalition.mask
    if isinstance(coalition, int):
        return coalition
    m = 0
    for p in coalition:
        m |= 1 << p
    return m


class SimpleGame:
    """Monotone game with ``v(empty) = 0`` and ``v(N) = 1``.

    Immutable; the minimal winning coalition cache is filled on first use by
    an idempotent computation, so concurrent readers at worst compute it twice.
    """

    __slots__ = ("n", "table", "_min_winning", "_max_losing")

    def __init__(self, n: int, table: int, *, check: bool = True):
        if not 1 <= n <= MAX_TABLE_PLAYERS:
            raise EnvelopeError(
                f"table form supports 1 <= n <= {MAX_TABLE_PLAYERS} players, got {n}"
            )
        self.n = n
        self.table = table
        self._min_winning = None
        self._max_losing = None
        if check:
            self.validate()

    def validate(self) -> None:
        mk = masks(self.n)
        t = self.table
        if t < 0 or t & ~mk.full:
            raise GameError("truth table has bits outside the coalition range")
        if t & 1:
            raise GameError("empty coalition must lose")
        if not t >> (mk.full.bit_length() - 1) & 1:
            raise GameError("grand coalition must win")
        for i in range(self.n):
            if ((t & mk.without[i]) << (1 << i)) & ~t:
                raise GameError(f"game is not monotone in player {i + 1}")

    @classmethod
    def from_min_winning(cls, n: int, coalitions: Iterable) -> "SimpleGame":
        mk = masks(n)
        table = 0
        for c in coalitions:
            m = _to_mask(c)
            if m >> n:
                raise GameError(f"coalition {m:#b} has players outside 0..{n - 1}")
            sup = mk.full
            for i in range(n):
                if m >> i & 1:
                    sup &= mk.with_[i]
            table |= sup
        return cls(n, table)

    @classmethod
    def from_predicate(cls, n: int, winning: Callable[[int], bool]) -> "SimpleGame":
        bits = np.fromiter((bool(winning(s)) for s in range(1 << n)), dtype=bool, count=1 << n)
        return cls(n, _pack(bits))

    def is_winning(self, coalition) -> bool:
        return bool(self.table >> _to_mask(coalition) & 1)

    __call__ = is_winning

    @property
    def min_winning_masks(self) -> tuple:
        if self._min_winning is None:
            mk = masks(self.n)
            t = self.table
            non_min = 0
            for i in range(self.n):
                non_min |= (t & mk.without[i]) << (1 << i)
            mw = t & ~non_min
            self._min_winning = tuple(sorted(_bits(mw), key=_coalition_key))
        return self._min_winning

    @property
    def max_losing_masks(self) -> tuple:
        if self._max_losing is None:
            mk = masks(self.n)
            lose = mk.full & ~self.table
            non_max = 0
            for i in range(self.n):
                non_max |= (lose >> (1 << i)) & mk.without[i]
            ml = lose & ~non_max
            self._max_losing = tuple(sorted(_bits(ml), key=_coalition_key))
        return self._max_losing

    def permuted(self, perm: Sequence[int]) -> "SimpleGame":
        """Relabel: player ``i`` becomes player ``perm[i]``."""
        if sorted(perm) != list(range(self.n)):
            raise GameError("not a permutation of the players")
        idx = np.arange(1 << self.n, dtype=np.int64)
        img = np.zeros_like(idx)
        for i, p in enumerate(perm):
            img |= ((idx >> i) & 1) << p
        bits = _unpack(self.table, self.n)
        out = np.zeros_like(bits)
        out[img] = bits
        return SimpleGame(self.n, _pack(out), check=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, SimpleGame) and other.n == self.n and other.table == self.table

    def __hash__(self) -> int:
        return hash((self.n, self.table))

    def __repr__(self) -> str:
        mw = ",".join(str(Coalition(m, self.n)) for m in self.min_winning_masks)
        return f"SimpleGame(n={self.n}, min_winning=[{mw}])"


def _bits(x: int):
    """Yield the positions of the set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass(frozen=True)
class WeightedGame:
    """Weighted majority game ``[quota; weights]``: S wins iff w(S) >= quota."""

    quota: Fraction
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "quota", Fraction(self.quota))
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        if not self.weights:
            raise GameError("a weighted game needs at least one player")
        if self.quota <= 0:
            raise GameError(f"quota must be positive, got {self.quota}")
        if any(w < 0 for w in self.weights):
            raise GameError("weights must be nonnegative")
        if sum(self.weights) < self.quota:
            raise GameError("total weight is below the quota; the grand coalition would lose")

    @property
    def n(self) -> int:
        return len(self.weights)

    def is_winning(self, coalition) -> bool:
        m = _to_mask(coalition)
        return sum((w for i, w in enumerate(self.weights) if m >> i & 1), Fraction(0)) >= self.quota

    __call__ = is_winning

    @property
    def is_integral(self) -> bool:
        return all(w.denominator == 1 for w in self.weights)

    def integer_weights(self) -> tuple:
        """Scale so every weight is an integer; returns ``(quota, weights)``."""
        scale = 1
        for w in self.weights:
            scale = scale * w.denominator // math.gcd(scale, w.denominator)
        return self.quota * scale, tuple(int(w * scale) for w in self.weights)

    def integral_form(self) -> "WeightedGame":
        """Equivalent game with integer weights (same winning coalitions)."""
        q, w = self.integer_weights()
        return WeightedGame(q, w)

    def normalized(self) -> "WeightedGame":
        total = sum(self.weights)
        return WeightedGame(self.quota / total, tuple(w / total for w in self.weights))

    def __str__(self) -> str:
        return "[" + str(self.quota) + ";" + ",".join(str(w) for w in self.weights) + "]"


def from_weights(quota, weights: Sequence) -> WeightedGame:
    return WeightedGame(Fraction(quota), tuple(Fraction(w) for w in weights))


def realize(g: WeightedGame) -> SimpleGame:
    """Truth table of a weighted game (n <= 20)."""
    if g.n > MAX_TABLE_PLAYERS:
        raise EnvelopeError(
            f"table form supports at most {MAX_TABLE_PLAYERS} players, got {g.n}"
        )
    q, w = g.integer_weights()
    qd = q.denominator
    wi = [x * qd for x in w]
    qi = q.numerator
    dtype = np.int64 if sum(wi) < 2**62 else object
    sums = np.zeros(1 << g.n, dtype=dtype)
    for i, x in enumerate(wi):
        sums[1 << i: 2 << i] = sums[: 1 << i] + x
    return SimpleGame(g.n, _pack(sums >= qi), check=False)


def minimal_winning(g: SimpleGame) -> list:
    return [Coalition(m, g.n) for m in g.min_winning_masks]


class Comparison(Enum):
    STRONGER = ">"
    EQUIVALENT = "~"
    WEAKER = "<"
    INCOMPARABLE = "|"


@dataclass(frozen=True)
class DesirabilityRelation:
    """Pairwise desirability; ``matrix[i][j]`` compares player i with player j."""

    n: int
    matrix: tuple

    def compare(self, i: int, j: int) -> Comparison:
        return self.matrix[i][j]

    @property
    def is_total(self) -> bool:
        return all(c is not Comparison.INCOMPARABLE for row in self.matrix for c in row)

    def equivalence_classes(self) -> list:
        seen, classes = set(), []
        for i in range(self.n):
            if i in seen:
                continue
            cls = [j for j in range(self.n) if self.matrix[i][j] is Comparison.EQUIVALENT]
            seen.update(cls)
            classes.append(tuple(cls))
        return classes

    def __str__(self) -> str:
        return "\n".join(" ".join(c.value for c in row) for row in self.matrix)


def _at_least(t: int, mk: Masks, i: int, j: int) -> bool:
    """i is at least as desirable as j: v(S+i) >= v(S+j) for all S avoiding both."""
    avoid = mk.without[i] & mk.without[j]
    with_j = (t >> (1 << j)) & avoid
    with_i = (t >> (1 << i)) & avoid
    return not with_j & ~with_i


def desirability(g: SimpleGame) -> DesirabilityRelation:
    mk = masks(g.n)
    rows = []
    for i in range(g.n):
        row = []
        for j in range(g.n):
            if i == j:
                row.append(Comparison.EQUIVALENT)
                continue
            a, b = _at_least(g.table, mk, i, j), _at_least(g.table, mk, j, i)
            if a and b:
                row.append(Comparison.EQUIVALENT)
            elif a:
                row.append(Comparison.STRONGER)
            elif b:
                row.append(Comparison.WEAKER)
            else:
                row.append(Comparison.INCOMPARABLE)
        rows.append(tuple(row))
    return DesirabilityRelation(g.n, tuple(rows))


def is_complete(g: SimpleGame) -> tuple:
    rel = desirability(g)
    return rel.is_total, rel


def weightedness_program(g: SimpleGame):
    """Feasibility system for a representation with unit separation margin.

    Variables are ``w_0..w_{n-1}, q``; the objective minimizes the weight sum.
    """
    from .lp import LinearProgram

    n = g.n
    lp = LinearProgram(n + 1, tuple([1] * n + [0]), "min")
    for s in g.min_winning_masks:
        lp.add([1 if s >> i & 1 else 0 for i in range(n)] + [-1], ">=", 0)
    for t in g.max_losing_masks:
        lp.add([1 if t >> i & 1 else 0 for i in range(n)] + [-1], "<=", -1)
    return lp


def is_weighted(g: SimpleGame) -> tuple:
    """Return ``(True, WeightedGame)`` with an integer witness, or ``(False, None)``."""
    from .lp import solve

    if g.n > 1 and not is_complete(g)[0]:
        return False, None
    res = solve(weightedness_program(g))
    if not res.optimal:
        return False, None
    *w, q = res.x
    scale = 1
    for v in res.x:
        scale = scale * v.denominator // math.gcd(scale, v.denominator)
    witness = WeightedGame(q * scale, tuple(x * scale for x in w))
    if realize(witness).table != g.table:  # pragma: no cover - LP guarantees this
        raise AssertionError("weightedness witness does not realize the game")
    return True, witness


def _reverse_table(t: int, n: int) -> int:
    size = 1 << n
    return int(format(t, f"0{size}b")[::-1], 2)


def is_decisive(g: SimpleGame) -> bool:
    """Exactly one of S and N \\ S wins, for every S."""
    return g.table ^ _reverse_table(g.table, g.n) == masks(g.n).full


def swing_masks(g: SimpleGame) -> list:
    """For each player i, the bitmask of coalitions S (not containing i) where i swings."""
    mk = masks(g.n)
    t = g.table
    return [(t >> (1 << i)) & ~t & mk.without[i] for i in range(g.n)]


def dummies(g: SimpleGame) -> frozenset:
    return frozenset(i for i, s in enumerate(swing_masks(g)) if not s)


@lru_cache(maxsize=8)
def _perm_images(n: int):
    """Source-index arrays for all permutations: image[p][S'] = S with p(S) = S'."""
    perms = np.array(list(permutations(range(n))), dtype=np.int64)
    idx = np.arange(1 << n, dtype=np.int64)
    img = np.zeros((len(perms), 1 << n), dtype=np.int64)
    for i in range(n):
        img |= ((idx >> i) & 1)[None, :] << perms[:, i][:, None]
    src = np.argsort(img, axis=1)
    return perms, src


def _min_image(bits: np.ndarray, src: np.ndarray) -> int:
    images = bits[src]
    packed = np.packbits(images.astype(np.uint8), axis=1, bitorder="little")
    # most significant byte first, so row-wise lexicographic order is integer order
    rev = packed[:, ::-1]
    best = np.lexsort(rev.T[::-1])[0]
    return int.from_bytes(packed[best].tobytes(), "little")


def canonical_form(g: SimpleGame) -> SimpleGame:
    """Isomorphism-invariant representative with the smallest truth-table integer.

    For n <= 7 the minimum runs over all n! relabelings. For 8 <= n <= 12 it
    runs over the relabelings that sort players by a relabeling-invariant
    signature (swing counts per coalition size, then winning-coalition count),
    with interchangeable players kept in index order. Both variants are
    invariant under relabeling.
    """
    n = g.n
    if n > MAX_CANONICAL_PLAYERS:
        raise EnvelopeError(
            f"canonical form supports at most {MAX_CANONICAL_PLAYERS} players, got {n}"
        )
    bits = _unpack(g.table, n)
    if n <= _BRUTE_CANONICAL_PLAYERS:
        _, src = _perm_images(n)
        return SimpleGame(n, _min_image(bits, src), check=False)
    return SimpleGame(n, _refined_canonical(g, bits), check=False)


def _player_signature(g: SimpleGame) -> list:
    mk = masks(g.n)
    sigs = []
    for i, s in enumerate(swing_masks(g)):
        by_size = tuple(popcount(s & mk.by_size[k]) for k in range(g.n))
        sigs.append((by_size, popcount(g.table & mk.with_[i])))
    return sigs


def _refined_canonical(g: SimpleGame, bits: np.ndarray) -> int:
    n = g.n
    sigs = _player_signature(g)
    rel = desirability(g)
    order = sorted(range(n), key=lambda i: sigs[i], reverse=True)
    blocks = []
    for i in order:
        if blocks and sigs[blocks[-1][0]] == sigs[i]:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    block_choices = []
    total = 1
    for block in blocks:
        classes, seen = [], set()
        for i in block:
            if i in seen:
                continue
            cls = [j for j in block if rel.matrix[i][j] is Comparison.EQUIVALENT]
            seen.update(cls)
            classes.append(cls)
        arrangements = [sum(p, []) for p in permutations(classes)]
        total *= len(arrangements)
        block_choices.append(arrangements)
    if total > _MAX_CANONICAL_CANDIDATES:
        raise EnvelopeError(
            f"canonical form would need {total} candidate relabelings "
            f"(limit {_MAX_CANONICAL_CANDIDATES})"
        )
    idx = np.arange(1 << n, dtype=np.int64)
    best = None
    for choice in product(*block_choices):
        ordered = [p for part in choice for p in part]
        img = np.zeros_like(idx)
        for pos, player in enumerate(ordered):
            img |= ((idx >> player) & 1) << pos
        out = np.zeros_like(bits)
        out[img] = bits
        value = _pack(out)
        if best is None or value < best:
            best = value
    return best
