"""The inverse power index problem.

Given a target distribution sigma, find a game whose power vector is as close
as possible to sigma. Three tools are offered: an exact solver that scans an
enumerated game class, a local search over integer weighted representations,
and a certified lower bound built on the Alon-Edelman theorem for the Banzhaf
index.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from . import lp as _lp
from .enumeration import CLASSES, MAX_ENUMERATION_PLAYERS, enumerate_class, labeled_tables
from .game import EnvelopeError, GameError, SimpleGame, WeightedGame, masks
from .indices import DP_KINDS, KINDS, PowerVector, compute

__all__ = [
    "NORMS",
    "CERTIFICATES",
    "TargetDistribution",
    "InverseSolution",
    "LocalSearchConfig",
    "distance",
    "solve_exhaustive",
    "solve_local_search",
    "alon_edelman_rhs",
    "achievable_banzhaf",
    "certified_lower_bound",
    "sigma_as_weights_report",
]

NORMS = ("l1", "l2", "linf")
CERTIFICATES = ("exact-optimal", "heuristic", "heuristic-with-lower-bound")
MAX_BOUND_K = 6
MAX_LOCAL_DP_PLAYERS = 30
MAX_LOCAL_TABLE_PLAYERS = 14
_VECTOR_KINDS = ("banzhaf", "ssi", "pgi", "phi")


def distance(a: Sequence, b: Sequence, norm: str = "l1") -> Fraction:
    """Exact distance. For ``l2`` this is the squared Euclidean distance."""
    if len(a) != len(b):
        raise GameError(f"vectors have different lengths {len(a)} and {len(b)}")
    diffs = [Fraction(x) - Fraction(y) for x, y in zip(a, b)]
    if norm == "l1":
        return sum((abs(d) for d in diffs), Fraction(0))
    if norm == "l2":
        return sum((d * d for d in diffs), Fraction(0))
    if norm == "linf":
        return max((abs(d) for d in diffs), default=Fraction(0))
    raise GameError(f"unknown norm {norm!r}; choose from {', '.join(NORMS)}")


@dataclass(frozen=True)
class TargetDistribution:
    """A desired power distribution: nonnegative, summing to one."""

    sigma: tuple

    def __post_init__(self):
        sigma = tuple(Fraction(s) for s in self.sigma)
        if not sigma:
            raise GameError("target distribution is empty")
        if any(s < 0 for s in sigma):
            raise GameError("target entries must be nonnegative")
        if sum(sigma) != 1:
            raise GameError(f"target entries must sum to 1, got {sum(sigma)}")
        object.__setattr__(self, "sigma", sigma)

    @property
    def n(self) -> int:
        return len(self.sigma)

    @property
    def order(self) -> tuple:
        """Positions of the entries, largest first (stable on ties)."""
        return tuple(sorted(range(self.n), key=lambda i: -self.sigma[i]))

    @property
    def sorted_desc(self) -> tuple:
        return tuple(self.sigma[i] for i in self.order)


def _target(sigma) -> TargetDistribution:
    return sigma if isinstance(sigma, TargetDistribution) else TargetDistribution(tuple(sigma))


@dataclass(frozen=True)
class InverseSolution:
    sigma: tuple
    game: Union[SimpleGame, WeightedGame]
    power: PowerVector
    distance: Fraction
    certificate: str
    norm: str = "l1"
    lower_bound: Optional[Fraction] = None

    def __post_init__(self):
        if self.certificate not in CERTIFICATES:
            raise GameError(f"unknown certificate {self.certificate!r}")
        recomputed = distance(self.power.values, self.sigma, self.norm)
        if recomputed != self.distance:
            raise GameError(f"stated distance {self.distance} differs from recomputed {recomputed}")
        if self.certificate == "heuristic-with-lower-bound":
            if self.lower_bound is None:
                raise GameError("lower-bounded certificate needs a bound")
        if self.lower_bound is not None and self.lower_bound > self.distance:
            raise GameError(f"lower bound {self.lower_bound} exceeds distance {self.distance}")

    def to_json(self) -> dict:
        from .io import game_to_json

        out = {
            "sigma": [str(s) for s in self.sigma],
            "game": game_to_json(self.game),
            "power": self.power.to_json(),
            "distance": str(self.distance),
            "norm": self.norm,
            "certificate": self.certificate,
        }
        if self.norm == "l2":
            out["distance_is_squared"] = True
        if self.lower_bound is not None:
            out["lower_bound"] = str(self.lower_bound)
        return out


# -- exhaustive ------------------------------------------------------------------


def _vector_values(n: int, tables: np.ndarray, kind: str):
    """Integer numerators (G x n) and denominators (G) of a table-path index."""
    mk = masks(n)
    t = tables.astype(np.uint64)
    cols = []
    if kind in ("banzhaf", "ssi"):
        for i in range(n):
            sw = (t >> np.uint64(1 << i)) & ~t & np.uint64(mk.without[i])
            if kind == "banzhaf":
                cols.append(np.bitwise_count(sw).astype(np.int64))
            else:
                acc = np.zeros(len(t), dtype=np.int64)
                for k in range(n):
                    c = np.bitwise_count(sw & np.uint64(mk.by_size[k])).astype(np.int64)
                    acc += c * (math.factorial(k) * math.factorial(n - 1 - k))
                cols.append(acc)
    elif kind == "pgi":
        non_min = np.zeros_like(t)
        for i in range(n):
            non_min |= (t & np.uint64(mk.without[i])) << np.uint64(1 << i)
        mw = t & ~non_min
        cols = [np.bitwise_count(mw & np.uint64(mk.with_[i])).astype(np.int64) for i in range(n)]
    elif kind == "phi":
        cols = [np.bitwise_count(t & np.uint64(mk.with_[i])).astype(np.int64) for i in range(n)]
    num = np.stack(cols, axis=1)
    den = num.sum(axis=1)
    return num, den


def _game_values(args):
    n, tables, kind = args
    return [compute(SimpleGame(n, int(t), check=False), kind).values for t in tables]


def _sorted_distance(values: Sequence, target_sorted: Sequence, norm: str) -> Fraction:
    return distance(sorted(values, reverse=True), target_sorted, norm)


def _float_distances(vals: np.ndarray, target: np.ndarray, norm: str) -> np.ndarray:
    diff = np.sort(vals, axis=1)[:, ::-1] - target[None, :]
    if norm == "l1":
        return np.abs(diff).sum(axis=1)
    if norm == "l2":
        return (diff * diff).sum(axis=1)
    return np.abs(diff).max(axis=1)


def solve_exhaustive(
    sigma,
    game_class: str = "simple",
    kind: str = "banzhaf",
    norm: str = "l1",
    threads: int = 1,
) -> InverseSolution:
    """Globally optimal game of ``game_class`` for the labeled target ``sigma``.

    Scans one representative per isomorphism class. Because every index here
    is symmetric, the best labeling of a representative matches its power
    entries to the target entries in the same (descending) order; the
    rearrangement inequality makes that optimal for l1, l2 and linf. Ties
    are broken by the smallest canonical truth table.
    """
    target = _target(sigma)
    n = target.n
    if game_class not in CLASSES:
        raise GameError(f"unknown game class {game_class!r}")
    if norm not in NORMS:
        raise GameError(f"unknown norm {norm!r}; choose from {', '.join(NORMS)}")
    if kind not in KINDS or kind == "raw-banzhaf":
        raise GameError(f"unsupported index {kind!r} for the inverse problem")
    if n > MAX_ENUMERATION_PLAYERS:
        raise EnvelopeError(
            f"exhaustive search supports n <= {MAX_ENUMERATION_PLAYERS}, got n={n}; "
            "use the local search method instead"
        )
    if kind == "msr" and game_class != "weighted":
        raise EnvelopeError("msr is defined on weighted games only; use --class weighted")
    if kind == "semivalue":
        raise GameError("semivalue needs a parameter; use 'semivalue(p)'")
    stream = enumerate_class(n, game_class, up_to_iso=True)
    tables = stream.tables
    tsorted = target.sorted_desc
    tfloat = np.array([float(x) for x in tsorted])

    if kind in _VECTOR_KINDS:
        num, den = _vector_values(n, tables, kind)
        approx = _float_distances(num / den[:, None], tfloat, norm)
        best_float = approx.min()
        candidates = np.flatnonzero(approx <= best_float + 1e-9)
        best = None
        for c in candidates:
            vals = [Fraction(int(x), int(den[c])) for x in num[c]]
            d = _sorted_distance(vals, tsorted, norm)
            if best is None or d < best[0]:
                best = (d, int(c))
    else:
        chunks = [tables[i:i + 256] for i in range(0, len(tables), 256)]
        jobs = [(n, ch, kind) for ch in chunks]
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as ex:
                results = list(ex.map(_game_values, jobs))
        else:
            results = [_game_values(j) for j in jobs]
        best = None
        idx = 0
        for res in results:
            for vals in res:
                d = _sorted_distance(vals, tsorted, norm)
                if best is None or d < best[0]:
                    best = (d, idx)
                idx += 1

    canon = SimpleGame(n, int(tables[best[1]]), check=False)
    power = compute(canon, kind)
    by_power = sorted(range(n), key=lambda i: -power.values[i])
    perm = [0] * n
    for player, position in zip(by_power, target.order):
        perm[player] = position
    game = canon.permuted(perm)
    final_power = compute(game, kind)
    return InverseSolution(
        target.sigma, game, final_power, distance(final_power.values, target.sigma, norm), "exact-optimal", norm
    )


# -- local search ----------------------------------------------------------------


@dataclass(frozen=True)
class LocalSearchConfig:
    max_weight: Optional[int] = None
    iterations: int = 200
    restarts: int = 4
    seed: int = 0
    plateau: int = 10


def _local_method(kind: str, n: int) -> str:
    if kind in DP_KINDS and n > 12:
        return "dp"
    if n > MAX_LOCAL_TABLE_PLAYERS:
        raise EnvelopeError(
            f"local search supports n <= {MAX_LOCAL_DP_PLAYERS} for banzhaf/ssi "
            f"and n <= {MAX_LOCAL_TABLE_PLAYERS} otherwise; got {kind} with n={n}"
        )
    return "table"


def _repair(q: int, w: tuple) -> Optional[tuple]:
    total = sum(w)
    if total == 0:
        return None
    return min(max(q, 1), total), w


def solve_local_search(
    sigma,
    kind: str = "banzhaf",
    norm: str = "l1",
    config: LocalSearchConfig = LocalSearchConfig(),
    lower_bound=None,
) -> InverseSolution:
    """Steepest descent over integer representations ``[q; w]``.

    Neighbors change one weight or the quota by one. Equal-distance moves are
    taken up to ``config.plateau`` times per restart. The first restart
    starts from sigma used as weights with relative quota 1/2, the others from
    seeded random representations.
    """
    target = _target(sigma)
    n = target.n
    if n > MAX_LOCAL_DP_PLAYERS:
        raise EnvelopeError(f"local search supports n <= {MAX_LOCAL_DP_PLAYERS}, got n={n}")
    method = _local_method(kind, n)
    top = config.max_weight or max(10, 2 * n)
    rng = random.Random(config.seed)
    cache = {}

    def evaluate(state):
        if state not in cache:
            q, w = state
            power = compute(WeightedGame(q, w), kind, method=method)
            cache[state] = (distance(power.values, target.sigma, norm), power)
        return cache[state][0]

    def neighbors(state):
        q, w = state
        out = []
        for i in range(n):
            for delta in (1, -1):
                x = w[i] + delta
                if 0 <= x <= top:
                    out.append((q, w[:i] + (x,) + w[i + 1:]))
        out += [(q + 1, w), (q - 1, w)]
        repaired = []
        for q2, w2 in out:
            r = _repair(q2, w2)
            if r is not None and r != state:
                repaired.append(r)
        return repaired

    smax = max(target.sigma)
    start_w = tuple(int(round(s / smax * top)) for s in target.sigma)
    starts = [_repair(math.ceil(Fraction(sum(start_w), 2)), start_w)]
    while len(starts) < max(1, config.restarts):
        w = tuple(rng.randint(0, top) for _ in range(n))
        if sum(w) == 0:
            continue
        starts.append((rng.randint(1, sum(w)), w))

    best_state, best_d = None, None
    for state in starts:
        current = evaluate(state)
        visited = {state}
        plateau = config.plateau
        for _ in range(config.iterations):
            if current == 0:
                break
            scored = [(evaluate(s), k, s) for k, s in enumerate(neighbors(state))]
            d, _, cand = min(scored)
            if d < current:
                state, current = cand, d
                plateau = config.plateau
            elif d == current and plateau > 0:
                fresh = [s for dd, _, s in sorted(scored) if dd == d and s not in visited]
                if not fresh:
                    break
                state = fresh[0]
                plateau -= 1
            else:
                break
            visited.add(state)
        if best_d is None or current < best_d:
            best_state, best_d = state, current
        if best_d == 0:
            break

    q, w = best_state
    power = cache[best_state][1]
    lb = None if lower_bound is None else Fraction(lower_bound)
    certificate = "heuristic" if lb is None else "heuristic-with-lower-bound"
    return InverseSolution(target.sigma, WeightedGame(q, w), power, best_d, certificate, norm, lb)


# -- Alon-Edelman bounds -----------------------------------------------------------


def alon_edelman_rhs(epsilon, k: int, variant: str = "original") -> Fraction:
    """Right-hand side of the Alon-Edelman inequality.

    ``original``: (2k+1)e / (1-(k+1)e) + e. ``improved``: (2k+2)e.
    """
    e = Fraction(epsilon)
    if k < 1:
        raise GameError("k must be a positive integer")
    if not 0 <= e < Fraction(1, k + 1):
        raise GameError(f"epsilon must lie in [0, 1/{k + 1}), got {e}")
    if variant == "original":
        return (2 * k + 1) * e / (1 - (k + 1) * e) + e
    if variant == "improved":
        return (2 * k + 2) * e
    raise GameError(f"unknown variant {variant!r}; choose 'original' or 'improved'")


@lru_cache(maxsize=None)
def achievable_banzhaf(k: int) -> tuple:
    """Distinct Banzhaf vectors of all labeled simple games on k players."""
    if not 1 <= k <= MAX_BOUND_K:
        raise EnvelopeError(f"Banzhaf vector sets are enumerated for 1 <= k <= {MAX_BOUND_K}, got {k}")
    num, den = _vector_values(k, labeled_tables(k), "banzhaf")
    g = np.gcd.reduce(np.concatenate([num, den[:, None]], axis=1), axis=1)
    rows = np.unique(np.concatenate([num // g[:, None], (den // g)[:, None]], axis=1), axis=0)
    return tuple(tuple(Fraction(int(x), int(r[-1])) for x in r[:-1]) for r in rows)


def _interval_lp(head, tau, beta, lo, hi, budget) -> Fraction:
    """min ||b - sigma||_1 over b with tail mass e in [lo, hi] and ||b - beta||_1 <= budget.

    Only the head coordinates and the tail mass matter: the tail can always
    be arranged to contribute exactly |e - tau| to the distance from sigma and
    exactly e to the distance from the zero-padded beta.
    """
    k = len(head)
    nv = 3 * k + 2  # b, e, u, r, s
    B, E, U, R, S = 0, k, k + 1, 2 * k + 1, 2 * k + 2
    obj = [0] * nv
    for i in range(k):
        obj[U + i] = 1
    obj[R] = 1
    prog = _lp.LinearProgram(nv, tuple(obj))
    row = [0] * nv
    for i in range(k):
        row[B + i] = 1
    row[E] = 1
    prog.add(row, "=", 1)
    for i in range(k):
        for sgn in (1, -1):
            row = [0] * nv
            row[U + i] = 1
            row[B + i] = -sgn
            prog.add(row, ">=", -sgn * head[i])
            if budget is not None:
                row = [0] * nv
                row[S + i] = 1
                row[B + i] = -sgn
                prog.add(row, ">=", -sgn * beta[i])
    for sgn in (1, -1):
        row = [0] * nv
        row[R] = 1
        row[E] = -sgn
        prog.add(row, ">=", -sgn * tau)
    row = [0] * nv
    row[E] = 1
    prog.add(row, ">=", lo)
    prog.add(row, "<=", hi)
    if budget is not None:
        row = [0] * nv
        for i in range(k):
            row[S + i] = 1
        row[E] = 1
        prog.add(row, "<=", budget)
    res = _lp.solve(prog)
    if res.status == _lp.INFEASIBLE:
        return None
    return res.value


def _round_down(x: Fraction, den: int = 10**6) -> Fraction:
    return Fraction(math.floor(x * den), den)


def certified_lower_bound(sigma, k: int, variant: str = "original", method: str = "lp", grid: int = 64) -> Fraction:
    """A lower bound on ||Bz(v) - sigma||_1 valid for every simple game v on n >= k players.

    Let K be the k largest target entries and tau the remaining target mass.
    If the Banzhaf mass e of v outside K is below 1/(k+1), the Alon-Edelman
    theorem gives a k-player Banzhaf vector beta with ||Bz(v) - beta||_1 <=
    rhs(e). ``method="lp"`` splits [0, 1/(k+1)) into ``grid`` intervals and,
    for each beta and interval, minimizes the distance to sigma exactly by
    LP (a relaxation, hence sound). Mass e >= 1/(k+1) forces distance at
    least 2(1/(k+1) - tau). ``method="triangle"`` uses the cruder chain
    m <= 2d + tau + rhs(tau + d), with m the distance from sigma's head to
    the nearest beta. Results are rounded down to denominator 10**6;
    0 is returned when tau >= 1/(k+1).
    """
    target = _target(sigma)
    if not 1 <= k <= MAX_BOUND_K:
        raise EnvelopeError(f"certified bounds support 1 <= k <= {MAX_BOUND_K}, got {k}")
    if target.n < k:
        raise GameError(f"need at least k={k} target entries")
    sig = target.sorted_desc
    head = sig[:k]
    tau = sum(sig[k:], Fraction(0))
    cap = Fraction(1, k + 1)
    if tau >= cap:
        return Fraction(0)
    betas = achievable_banzhaf(k)
    alon_edelman_rhs(0, k, variant)  # validates the variant name
    if method == "triangle":
        return _triangle_bound(head, tau, betas, k, variant)
    if method != "lp":
        raise GameError(f"unknown method {method!r}; choose 'lp' or 'triangle'")

    best = 2 * (cap - tau)
    dist_beta = [sum((abs(b - h) for b, h in zip(beta, head)), Fraction(0)) + tau for beta in betas]
    cuts = [cap * j / grid for j in range(grid + 1)]
    tasks = []
    for j in range(grid):
        lo, hi = cuts[j], cuts[j + 1]
        if hi < cap:
            budget = alon_edelman_rhs(hi, k, variant)
        elif variant == "improved":
            budget = (2 * k + 2) * hi
        else:
            budget = None  # the original bound blows up at 1/(k+1)
        mass = 2 * max(lo - tau, Fraction(0))
        if budget is None:
            tasks.append((mass, j, None, lo, hi, None))
            continue
        for b, beta in enumerate(betas):
            cheap = max(mass, dist_beta[b] - budget)
            tasks.append((cheap, j, b, lo, hi, budget))
    tasks.sort(key=lambda t: (t[0], t[1], -1 if t[2] is None else t[2]))
    for cheap, _, b, lo, hi, budget in tasks:
        if cheap >= best:
            break
        beta = None if b is None else betas[b]
        val = _interval_lp(head, tau, beta, lo, hi, budget)
        if val is not None and val < best:
            best = val
    return _round_down(best)


def _triangle_bound(head, tau, betas, k, variant) -> Fraction:
    m = min(sum((abs(b - h) for b, h in zip(beta, head)), Fraction(0)) for beta in betas)
    limit = Fraction(1, k + 1) - tau  # beyond this the theorem no longer applies

    def g(d):
        return 2 * d + tau + alon_edelman_rhs(tau + d, k, variant)

    if m <= g(Fraction(0)):
        return Fraction(0)
    den = 10**6
    lo, hi = 0, math.floor(limit * den)
    if hi * Fraction(1, den) >= limit:
        hi -= 1
    if g(Fraction(hi, den)) < m:
        return Fraction(hi, den)
    while hi - lo > 1:  # invariant: g(lo/den) < m <= g(hi/den)
        mid = (lo + hi) // 2
        if g(Fraction(mid, den)) < m:
            lo = mid
        else:
            hi = mid
    return Fraction(lo, den)


def sigma_as_weights_report(sigma, kind: str = "banzhaf", q=Fraction(1, 2), norm: str = "l1") -> dict:
    """Power and distance of the naive design: sigma as weights, relative quota q."""
    target = _target(sigma)
    q = Fraction(q)
    if not 0 < q <= 1:
        raise GameError(f"relative quota must lie in (0, 1], got {q}")
    game = WeightedGame(q, target.sigma).integral_form()
    method = "dp" if kind in DP_KINDS and game.n > 12 else "table"
    power = compute(game, kind, method=method)
    return {"game": game, "power": power, "distance": distance(power.values, target.sigma, norm)}
