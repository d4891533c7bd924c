"""Power indices.

Table-path indices work on any :class:`SimpleGame` (or a weighted game small
enough to realize) and are computed from truth-table bitmasks. The
generating-function path handles Banzhaf and Shapley-Shubik for weighted games
with integer weights and any number of players.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import lp as _lp
from .game import (
    MAX_TABLE_PLAYERS,
    EnvelopeError,
    GameError,
    SimpleGame,
    WeightedGame,
    desirability,
    Comparison,
    masks,
    popcount,
    realize,
    swing_masks,
    weightedness_program,
)

__all__ = [
    "PowerVector",
    "SwingVector",
    "KINDS",
    "NORMALIZED_KINDS",
    "banzhaf_raw",
    "banzhaf",
    "ssi",
    "pgi",
    "phi",
    "johnston",
    "semivalue",
    "nucleolus",
    "msr_index",
    "minimum_sum_representation",
    "banzhaf_dp",
    "ssi_dp",
    "compute",
]

MAX_NUCLEOLUS_PLAYERS = 14
MAX_MSR_PLAYERS = 9

KINDS = ("raw-banzhaf", "banzhaf", "ssi", "pgi", "phi", "johnston", "nucleolus", "msr", "semivalue")
NORMALIZED_KINDS = frozenset({"banzhaf", "ssi", "pgi", "phi", "johnston", "nucleolus", "msr"})
DP_KINDS = frozenset({"raw-banzhaf", "banzhaf", "ssi"})

Game = Union[SimpleGame, WeightedGame]


@dataclass(frozen=True)
class PowerVector:
    values: tuple
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    @property
    def n(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def to_json(self) -> dict:
        return {"kind": self.kind, "values": [str(v) for v in self.values]}

    @classmethod
    def from_json(cls, data: dict) -> "PowerVector":
        return cls(tuple(Fraction(v) for v in data["values"]), data["kind"])


@dataclass(frozen=True)
class SwingVector:
    eta: tuple

    @property
    def total(self) -> int:
        return sum(self.eta)

    def __iter__(self):
        return iter(self.eta)


def _table_game(g: Game) -> SimpleGame:
    if isinstance(g, SimpleGame):
        return g
    if g.n > MAX_TABLE_PLAYERS:
        raise EnvelopeError(
            f"table path supports at most {MAX_TABLE_PLAYERS} players, got {g.n}; "
            "use the dp method for banzhaf/ssi"
        )
    return realize(g)


def _normalize(raw: Sequence, kind: str) -> PowerVector:
    total = sum(raw, Fraction(0))
    if total == 0:
        raise GameError(f"{kind}: all raw values are zero, cannot normalize")
    return PowerVector(tuple(Fraction(r) / total for r in raw), kind)


def banzhaf_raw(g: Game) -> SwingVector:
    """Swing counts: eta_i = #{S not containing i : S loses, S + i wins}."""
    return SwingVector(tuple(popcount(s) for s in swing_masks(_table_game(g))))


def banzhaf(g: Game) -> PowerVector:
    return _normalize(banzhaf_raw(g).eta, "banzhaf")


def ssi(g: Game) -> PowerVector:
    g = _table_game(g)
    n = g.n
    mk = masks(n)
    nf = math.factorial(n)
    coef = [Fraction(math.factorial(k) * math.factorial(n - 1 - k), nf) for k in range(n)]
    values = []
    for s in swing_masks(g):
        values.append(sum((coef[k] * popcount(s & mk.by_size[k]) for k in range(n)), Fraction(0)))
    return PowerVector(tuple(values), "ssi")


def _min_winning_bits(g: SimpleGame) -> int:
    mk = masks(g.n)
    t = g.table
    non_min = 0
    for i in range(g.n):
        non_min |= (t & mk.without[i]) << (1 << i)
    return t & ~non_min


def pgi(g: Game) -> PowerVector:
    """Public Good index: share of minimal winning coalitions containing each player."""
    g = _table_game(g)
    mk = masks(g.n)
    mw = _min_winning_bits(g)
    return _normalize([popcount(mw & mk.with_[i]) for i in range(g.n)], "pgi")


def phi(g: Game) -> PowerVector:
    """Public Help index: share of winning coalitions containing each player."""
    g = _table_game(g)
    mk = masks(g.n)
    return _normalize([popcount(g.table & mk.with_[i]) for i in range(g.n)], "phi")


def _critical_masks(g: SimpleGame) -> list:
    """crit[i]: winning coalitions containing i that lose without i."""
    mk = masks(g.n)
    t = g.table
    return [t & mk.with_[i] & ~((t & mk.without[i]) << (1 << i)) for i in range(g.n)]


def _count_planes(bitsets: Sequence[int]) -> list:
    """Bit-sliced sum: plane k holds bit k of the per-coalition count."""
    planes = []
    for x in bitsets:
        carry = x
        for k in range(len(planes)):
            if not carry:
                break
            planes[k], carry = planes[k] ^ carry, planes[k] & carry
        if carry:
            planes.append(carry)
    return planes


def johnston(g: Game) -> PowerVector:
    """Each vulnerable coalition splits one unit among its critical players."""
    g = _table_game(g)
    full = masks(g.n).full
    crit = _critical_masks(g)
    planes = _count_planes(crit)
    raw = [Fraction(0)] * g.n
    for c in range(1, g.n + 1):
        exact = full
        for k, plane in enumerate(planes):
            exact &= plane if c >> k & 1 else ~plane
        if c >> len(planes):
            continue
        if not exact:
            continue
        for i in range(g.n):
            cnt = popcount(crit[i] & exact)
            if cnt:
                raw[i] += Fraction(cnt, c)
    return _normalize(raw, "johnston")


def semivalue(g: Game, p, normalize: bool = False) -> PowerVector:
    """p-binomial semivalue: sum over S of p^|S| (1-p)^(n-1-|S|) (v(S+i) - v(S))."""
    p = Fraction(p)
    if not 0 < p < 1:
        raise GameError(f"semivalue parameter must lie in (0, 1), got {p}")
    g = _table_game(g)
    n = g.n
    mk = masks(n)
    coef = [p**k * (1 - p) ** (n - 1 - k) for k in range(n)]
    raw = [
        sum((coef[k] * popcount(s & mk.by_size[k]) for k in range(n)), Fraction(0))
        for s in swing_masks(g)
    ]
    kind = f"semivalue({p})"
    return _normalize(raw, kind) if normalize else PowerVector(tuple(raw), kind)


# -- nucleolus ---------------------------------------------------------------


class _Span:
    """Incremental reduced row-echelon basis over the rationals."""

    def __init__(self, n: int):
        self.n = n
        self.rows = {}  # pivot column -> row with 1 at its pivot, 0 at other pivots

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, vec):
        v = [Fraction(a) for a in vec]
        for col, row in self.rows.items():
            a = v[col]
            if a:
                v = [x - a * r for x, r in zip(v, row)]
        return v

    def contains(self, vec) -> bool:
        return not any(self._reduce(vec))

    def add(self, vec) -> bool:
        v = self._reduce(vec)
        for col, a in enumerate(v):
            if a:
                row = [x / a for x in v]
                for c, r in self.rows.items():
                    b = r[col]
                    if b:
                        self.rows[c] = [x - b * y for x, y in zip(r, row)]
                self.rows[col] = row
                return True
        return False

    def spanned_coalitions(self, bitarr: np.ndarray) -> np.ndarray:
        """Boolean mask over all coalitions whose indicator lies in the span.

        In reduced form, an indicator is spanned iff it equals the sum of the
        basis rows at its pivot columns.
        """
        pivots = list(self.rows)
        scale = math.lcm(*(x.denominator for r in self.rows.values() for x in r))
        out = np.ones(bitarr.shape[1], dtype=bool)
        for j in range(self.n):
            if j in self.rows:
                continue
            pred = np.zeros(bitarr.shape[1], dtype=object if scale > 2**40 else np.int64)
            for c in pivots:
                coef = int(self.rows[c][j] * scale)
                if coef:
                    pred += coef * bitarr[c]
            out &= pred == scale * bitarr[j]
        return out


def _indicator(mask: int, n: int) -> list:
    return [mask >> i & 1 for i in range(n)]


def _subset_sums(x_num: Sequence[int], n: int) -> np.ndarray:
    dtype = np.int64 if sum(abs(v) for v in x_num) < 2**62 else object
    sums = np.zeros(1 << n, dtype=dtype)
    for i, v in enumerate(x_num):
        sums[1 << i: 2 << i] = sums[: 1 << i] + v
    return sums


def nucleolus(g: Game, *, batch: Optional[int] = None) -> PowerVector:
    """Nucleolus over the simplex {x >= 0, sum x = 1}.

    Successive exact LPs: each round minimizes the largest free excess, then
    freezes every coalition (and every bound x_i >= 0) carrying a nonzero dual
    multiplier, because those are tight in all optimal solutions. Coalitions
    whose payoff is pinned by the frozen ones drop out. Constraints enter
    lazily: an LP over a working set is re-solved until no free coalition has
    excess above its optimum.
    """
    g = _table_game(g)
    n = g.n
    if n > MAX_NUCLEOLUS_PLAYERS:
        raise EnvelopeError(
            f"nucleolus supports at most {MAX_NUCLEOLUS_PLAYERS} players, got {n}"
        )
    if n == 1:
        return PowerVector((Fraction(1),), "nucleolus")
    batch = batch or 2 * n
    full = (1 << n) - 1
    t = g.table
    bits = np.array([(t >> s) & 1 for s in range(1 << n)], dtype=np.int64)

    span = _Span(n)
    span.add([1] * n)
    active = np.ones(1 << n, dtype=bool)
    active[0] = active[full] = False
    fixed = []  # (mask, excess)
    zero = set()
    working = set()

    idx = np.arange(1 << n, dtype=np.int64)
    bitarr = np.array([(idx >> i) & 1 for i in range(n)])

    def activate(candidates):
        for s in candidates:
            s = int(s)
            if active[s]:
                active[s] = False
                working.add(s)

    def prune():
        spanned = span.spanned_coalitions(bitarr)
        active[spanned] = False
        for s in [s for s in working if spanned[s]]:
            working.discard(s)

    activate([1 << i for i in range(n)] + [m for m in g.min_winning_masks if m != full])

    x = None
    while span.rank < n:
        while True:
            # Dual of: min t  s.t.  sum x = 1,  x(S) = v(S) - e_S (frozen S),
            #          x(S) + t >= v(S) (working S),  x >= 0.
            # Columns: mu (sum x = 1), z_S (frozen), y_S >= 0 (working).
            order = sorted(working)
            rows_for = [i for i in range(n) if i not in zero]
            nf, nw = len(fixed), len(order)
            obj = [1] + [((t >> s) & 1) - e for s, e in fixed] + [(t >> s) & 1 for s in order]
            prog = _lp.LinearProgram(
                1 + nf + nw,
                tuple(obj),
                "max",
                bounds=[(None, None)] * (1 + nf) + [(0, None)] * nw,
            )
            for i in rows_for:
                prog.add(
                    [1] + [s >> i & 1 for s, _ in fixed] + [s >> i & 1 for s in order], "<=", 0
                )
            prog.add([0] * (1 + nf) + [1] * nw, "=", 1)
            res = _lp.solve(prog, rule="dantzig")
            if not res.optimal:  # pragma: no cover - the program is always feasible and bounded
                raise AssertionError(f"nucleolus LP ended {res.status}")
            xs = dict(zip(rows_for, res.duals))
            x = tuple(xs.get(i, Fraction(0)) for i in range(n))
            tval = res.duals[-1]
            den = math.lcm(*(v.denominator for v in x), tval.denominator)
            sums = _subset_sums([int(v * den) for v in x], n)
            excess = bits * den - sums
            limit = int(tval * den)
            viol = np.flatnonzero(active & (excess > limit))
            if not len(viol):
                break
            top = viol[np.argsort(-excess[viol], kind="stable")][:batch]
            activate(top)
        mult = res.x
        ys = mult[1 + nf:]
        for k, i in enumerate(rows_for):
            if i in zero:
                continue
            slack = -sum(
                (c * m for c, m in zip(prog.constraints[k].row, mult)), Fraction(0)
            )
            if slack != 0:
                zero.add(i)
                span.add([1 if j == i else 0 for j in range(n)])
        for s, y in zip(order, ys):
            if y != 0:
                fixed.append((s, tval))
                working.discard(s)
                span.add(_indicator(s, n))
        prune()
        if not working and span.rank < n:
            cand = np.flatnonzero(active)
            activate(cand[np.argsort(-excess[cand], kind="stable")][:batch])
    return PowerVector(tuple(x), "nucleolus")


# -- minimum sum representation ---------------------------------------------


def _branch_and_bound(prog: _lp.LinearProgram, integer: Sequence[int]):
    """Minimize ``prog`` with the listed variables integral (objective integral)."""
    best_val, best_x = None, None
    stack = [list(prog.bounds)]
    while stack:
        bounds = stack.pop()
        node = _lp.LinearProgram(prog.num_vars, prog.objective, "min", list(prog.constraints), bounds)
        res = _lp.solve(node, rule="dantzig")
        if not res.optimal:
            continue
        bound = math.ceil(res.value)
        if best_val is not None and bound >= best_val:
            continue
        frac = next((j for j in integer if res.x[j].denominator != 1), None)
        if frac is None:
            best_val, best_x = res.value, res.x
            continue
        v = res.x[frac]
        lo, hi = bounds[frac]
        down = list(bounds)
        down[frac] = (lo, Fraction(math.floor(v)))
        up = list(bounds)
        up[frac] = (Fraction(math.ceil(v)), hi)
        stack.append(down)
        stack.append(up)
    return best_val, best_x


def minimum_sum_representation(g: Game) -> WeightedGame:
    """Integer representation with minimal weight sum; ties go to the
    lexicographically smallest (quota, weights)."""
    g = _table_game(g)
    n = g.n
    if n > MAX_MSR_PLAYERS:
        raise EnvelopeError(f"msr supports at most {MAX_MSR_PLAYERS} players, got {n}")
    prog = weightedness_program(g)
    rel = desirability(g)
    for i in range(n):
        for j in range(n):
            if rel.matrix[i][j] is Comparison.STRONGER:
                row = [0] * (n + 1)
                row[i], row[j] = 1, -1
                prog.add(row, ">=", 1)
    if not _lp.solve(prog).optimal:
        raise GameError("game is not weighted; msr is undefined")
    integer = list(range(n + 1))
    total, _ = _branch_and_bound(prog, integer)
    prog.add([1] * n + [0], "=", total)
    x = None
    for var in [n] + list(range(n)):
        obj = [0] * (n + 1)
        obj[var] = 1
        val, x = _branch_and_bound(prog.with_objective(obj), integer)
        prog.add(obj, "=", val)
    *w, q = x
    return WeightedGame(q, tuple(w))


def msr_index(g: Game) -> PowerVector:
    rep = minimum_sum_representation(g)
    return _normalize(rep.weights, "msr")


# -- generating-function path -------------------------------------------------


def _require_integral(g: WeightedGame) -> WeightedGame:
    if not isinstance(g, WeightedGame):
        raise GameError("dp path needs a weighted game")
    return g if g.is_integral else g.integral_form()


def _counts_dtype(n: int):
    return np.int64 if n < 62 else object


def _sum_counts(weights: Sequence[int], total: int, dtype) -> np.ndarray:
    c = np.zeros(total + 1, dtype=dtype)
    c[0] = 1
    for w in weights:
        if w:
            c[w:] = c[w:] + c[:-w]
        else:
            c = c * 2
    return c


def _size_sum_counts(weights: Sequence[int], total: int, dtype) -> np.ndarray:
    c = np.zeros((len(weights) + 1, total + 1), dtype=dtype)
    c[0, 0] = 1
    for w in weights:
        new = c.copy()
        if w:
            new[1:, w:] += c[:-1, :-w]
        else:
            new[1:, :] += c[:-1, :]
        c = new
    return c


def _swing_window(quota: Fraction, w: int):
    hi = math.ceil(quota) - 1
    return max(hi - w + 1, 0), hi


def _per_distinct_weight(g: WeightedGame, fn):
    weights = [int(w) for w in g.weights]
    cache = {}
    out = []
    for i, w in enumerate(weights):
        if w not in cache:
            others = weights[:i] + weights[i + 1:]
            cache[w] = fn(w, others)
        out.append(cache[w])
    return out


def banzhaf_dp_raw(g: WeightedGame) -> SwingVector:
    g = _require_integral(g)
    dtype = _counts_dtype(g.n)

    def swings(w, others):
        total = sum(others)
        c = _sum_counts(others, total, dtype)
        lo, hi = _swing_window(g.quota, w)
        hi = min(hi, total)
        return int(sum(int(v) for v in c[lo: hi + 1])) if lo <= hi else 0

    return SwingVector(tuple(_per_distinct_weight(g, swings)))


def banzhaf_dp(g: WeightedGame) -> PowerVector:
    return _normalize(banzhaf_dp_raw(g).eta, "banzhaf")


def ssi_dp(g: WeightedGame) -> PowerVector:
    g = _require_integral(g)
    n = g.n
    dtype = _counts_dtype(n)
    nf = math.factorial(n)

    def value(w, others):
        total = sum(others)
        c = _size_sum_counts(others, total, dtype)
        lo, hi = _swing_window(g.quota, w)
        hi = min(hi, total)
        if lo > hi:
            return Fraction(0)
        acc = 0
        for k in range(n):
            cnt = int(sum(int(v) for v in c[k, lo: hi + 1]))
            if cnt:
                acc += cnt * math.factorial(k) * math.factorial(n - 1 - k)
        return Fraction(acc, nf)

    return PowerVector(tuple(_per_distinct_weight(g, value)), "ssi")


# -- dispatch ------------------------------------------------------------------

_TABLE_FUNCS = {
    "banzhaf": banzhaf,
    "ssi": ssi,
    "pgi": pgi,
    "phi": phi,
    "johnston": johnston,
    "nucleolus": nucleolus,
    "msr": msr_index,
}

_ENVELOPE = (
    f"table path: n <= {MAX_TABLE_PLAYERS} (nucleolus n <= {MAX_NUCLEOLUS_PLAYERS}, "
    f"msr n <= {MAX_MSR_PLAYERS}); dp path: raw-banzhaf/banzhaf/ssi on integer-weight games"
)


def _kind_name(kind: str, p) -> tuple:
    if kind.startswith("semivalue(") and kind.endswith(")"):
        return "semivalue", Fraction(kind[len("semivalue("):-1])
    return kind, p


def compute(g: Game, kind: str, method: str = "auto", p=None, normalize: bool = False) -> PowerVector:
    """Evaluate index ``kind`` on ``g``.

    ``method`` is ``"table"``, ``"dp"`` or ``"auto"`` (table when the game is
    small enough, dp otherwise). ``raw-banzhaf`` returns swing counts as a
    PowerVector; ``semivalue`` needs ``p`` (or a ``"semivalue(p)"`` kind).
    """
    kind, p = _kind_name(kind, p)
    if kind not in KINDS:
        raise GameError(f"unknown index {kind!r}; choose from {', '.join(KINDS)}")
    if method not in ("auto", "table", "dp"):
        raise GameError(f"unknown method {method!r}")
    if method == "auto":
        big = isinstance(g, WeightedGame) and g.n > MAX_TABLE_PLAYERS
        method = "dp" if big and kind in DP_KINDS else "table"
    if method == "dp":
        if kind not in DP_KINDS:
            raise EnvelopeError(f"{kind} has no dp path; supported envelope: {_ENVELOPE}")
        if not isinstance(g, WeightedGame):
            raise EnvelopeError(f"dp path needs a weighted game; supported envelope: {_ENVELOPE}")
        if kind == "ssi":
            return ssi_dp(g)
        if kind == "banzhaf":
            return banzhaf_dp(g)
        return PowerVector(banzhaf_dp_raw(g).eta, "raw-banzhaf")
    if g.n > MAX_TABLE_PLAYERS:
        raise EnvelopeError(f"{kind} on {g.n} players is outside {_ENVELOPE}")
    if kind == "nucleolus" and g.n > MAX_NUCLEOLUS_PLAYERS:
        raise EnvelopeError(f"nucleolus on {g.n} players is outside {_ENVELOPE}")
    if kind == "msr" and g.n > MAX_MSR_PLAYERS:
        raise EnvelopeError(f"msr on {g.n} players is outside {_ENVELOPE}")
    if kind == "raw-banzhaf":
        return PowerVector(banzhaf_raw(g).eta, "raw-banzhaf")
    if kind == "semivalue":
        if p is None:
            raise GameError("semivalue needs a parameter p")
        return semivalue(g, p, normalize=normalize)
    return _TABLE_FUNCS[kind](g)
