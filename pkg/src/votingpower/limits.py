"""Finite-range diagnostics for limit theorems and bounds on weighted games.

Everything here is evidence over a finite range of voter counts. Reported
quantities are exact rationals; only fitted decay exponents use float64.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .game import EnvelopeError, GameError, WeightedGame, realize
from .indices import DP_KINDS, MAX_NUCLEOLUS_PLAYERS, PowerVector, compute, nucleolus

__all__ = [
    "Chain",
    "psi_chain",
    "StepRecord",
    "ConvergenceReport",
    "BoundCheckConfig",
    "chain_game",
    "regularity",
    "plt_ratios",
    "norm1_convergence",
    "nucleolus_bound_check",
    "nucleolus_bound_scan",
    "nucleolus_tightness_search",
    "generic_bound_scan",
    "psi_bound",
    "psi_vector",
    "atomic_limit_estimate",
    "random_normalized_game",
    "PSI_KINDS",
]

# symmetric, positive and efficient indices
PSI_KINDS = ("banzhaf", "ssi", "pgi", "phi", "johnston", "nucleolus")
_DP_THRESHOLD = 12


@dataclass(frozen=True)
class Chain:
    """Nested weighted games ``[q_rel * sum(w); w]``.

    At voter count n the weights are ``atomic``, then ``n - len(atomic) -
    len(fixed)`` oceanic voters cycling through ``ocean``, then ``fixed``.
    Players are addressed by role: ``("atomic", j)``, ``("ocean", j)`` or
    ``("fixed", j)``, which keeps them stable as the chain grows.
    """

    atomic: tuple = ()
    ocean: tuple = (1,)
    fixed: tuple = ()
    q_rel: Fraction = Fraction(1, 2)
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "atomic", tuple(Fraction(w) for w in self.atomic))
        object.__setattr__(self, "ocean", tuple(Fraction(w) for w in self.ocean))
        object.__setattr__(self, "fixed", tuple(Fraction(w) for w in self.fixed))
        object.__setattr__(self, "q_rel", Fraction(self.q_rel))
        object.__setattr__(self, "steps", tuple(int(s) for s in self.steps))
        if not 0 < self.q_rel < 1:
            raise GameError(f"relative quota must lie in (0, 1), got {self.q_rel}")
        if not self.ocean or any(w <= 0 for w in self.ocean):
            raise GameError("the ocean pattern needs at least one positive weight")
        if any(w < 0 for w in self.atomic + self.fixed):
            raise GameError("weights must be nonnegative")
        if any(b <= a for a, b in zip(self.steps, self.steps[1:])):
            raise GameError("steps must be strictly increasing")
        if self.steps and self.steps[0] <= len(self.atomic) + len(self.fixed):
            raise GameError("every step needs at least one oceanic voter")

    @property
    def min_n(self) -> int:
        return len(self.atomic) + len(self.fixed) + 1

    def weights(self, n: int) -> tuple:
        m = n - len(self.atomic) - len(self.fixed)
        if m < 1:
            raise GameError(f"chain needs at least {self.min_n} voters, got {n}")
        ocean = tuple(self.ocean[j % len(self.ocean)] for j in range(m))
        return self.atomic + ocean + self.fixed

    def index(self, role, n: int) -> int:
        kind, j = role
        m = n - len(self.atomic) - len(self.fixed)
        if kind == "atomic" and 0 <= j < len(self.atomic):
            return j
        if kind == "ocean" and 0 <= j < m:
            return len(self.atomic) + j
        if kind == "fixed" and 0 <= j < len(self.fixed):
            return len(self.atomic) + m + j
        raise GameError(f"no player {role} at n={n}")


def psi_chain(q_rel=Fraction(1, 2), steps=()) -> Chain:
    """Weights (2, ..., 2, 1): the target psi^n used as weights."""
    return Chain((), (2,), (1,), q_rel, steps)


def chain_game(chain: Chain, n: int) -> WeightedGame:
    """The game at voter count n; quota kept as the exact rational q_rel * sum(w)."""
    w = chain.weights(n)
    return WeightedGame(chain.q_rel * sum(w), w)


def _power(g: WeightedGame, kind: str) -> PowerVector:
    g = g if g.is_integral else g.integral_form()
    method = "dp" if kind in DP_KINDS and g.n > _DP_THRESHOLD else "table"
    return compute(g, kind, method=method)


def _fraction_parts(x: Optional[Fraction]) -> tuple:
    if x is None:
        return "", ""
    return x.numerator, x.denominator


@dataclass(frozen=True)
class StepRecord:
    n: int
    quantity: str
    value: Optional[Fraction]
    verdict: str = ""

    def csv_row(self) -> list:
        num, den = _fraction_parts(self.value)
        return [self.n, self.quantity, num, den, self.verdict]


@dataclass
class ConvergenceReport:
    """Per-step exact records plus a float64 decay fit and verdict flags."""

    records: list
    exponent: Optional[float] = None
    residual: Optional[float] = None
    verdict: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def csv_rows(self) -> list:
        return [r.csv_row() for r in self.records]

    def summary(self) -> dict:
        return {
            "exponent": self.exponent,
            "residual": self.residual,
            "fit_precision": "float64",
            "verdict": self.verdict,
            "notes": self.notes,
        }


def _fit(points: Sequence) -> tuple:
    """Least-squares slope of log(value) against log(n), with RMS residual."""
    pts = [(math.log(n), math.log(float(v))) for n, v in points if v is not None and v > 0]
    if len(pts) < 2:
        return None, None
    xs, ys = zip(*pts)
    slope, intercept = statistics.linear_regression(xs, ys)
    res = math.sqrt(sum((y - (slope * x + intercept)) ** 2 for x, y in pts) / len(pts))
    return slope, res


def regularity(chain: Chain, role, steps: Optional[Sequence[int]] = None, epsilon=None) -> dict:
    """Relative weight of all voters sharing this player's weight, per step.

    Finite surrogate for regularity: with ``epsilon`` given, every value must
    be at least epsilon; otherwise the range must span a factor of 4 in n and
    the last value must keep at least half of the first. The witness is the
    smallest observed value.
    """
    steps = tuple(steps or chain.steps)
    if not steps:
        raise GameError("no steps to evaluate")
    values = []
    for n in steps:
        w = chain.weights(n)
        wi = w[chain.index(role, n)]
        values.append(sum(1 for x in w if x == wi) * wi / sum(w))
    records = [StepRecord(n, "class_relative_weight", v) for n, v in zip(steps, values)]
    low = min(values)
    if epsilon is not None:
        regular = low >= Fraction(epsilon) and low > 0
    else:
        regular = low > 0 and steps[-1] >= 4 * steps[0] and values[-1] >= values[0] / 2
    return {
        "regular": regular,
        "epsilon": low if regular else None,
        "records": records,
        "surrogate": True,
        "spans_factor_4": steps[-1] >= 4 * steps[0],
    }


def plt_ratios(chain: Chain, kind: str, pairs: Sequence, steps: Optional[Sequence[int]] = None, tolerance=Fraction(1, 20)) -> ConvergenceReport:
    """P_i / P_j against w_i / w_j for each pair of roles at each step.

    A pair converges (finite surrogate) when its last ratio is defined, is
    within ``tolerance`` (relative) of the weight ratio, and is strictly
    closer than the first defined ratio (or exact from the start).
    """
    steps = tuple(steps or chain.steps)
    records = []
    verdict = {}
    for a, b in pairs:
        name = f"ratio[{a[0]}{a[1]}/{b[0]}{b[1]}]"
        target = None
        seq = []
        for n in steps:
            g = chain_game(chain, n)
            i, j = chain.index(a, n), chain.index(b, n)
            if g.weights[j] == 0:
                raise GameError("pair has a zero-weight player")
            target = g.weights[i] / g.weights[j]
            p = _power(g, kind)
            ratio = None if p[j] == 0 else p[i] / p[j]
            seq.append((n, ratio))
            records.append(StepRecord(n, name, ratio, "undefined" if ratio is None else ""))
        defined = [(n, r) for n, r in seq if r is not None]
        last = seq[-1][1]
        ok = False
        if last is not None and defined:
            err_last = abs(last - target)
            err_first = abs(defined[0][1] - target)
            close = err_last <= tolerance * target
            ok = close and (err_last < err_first or err_last == 0)
        verdict[name] = {
            "target": str(target),
            "converging": ok,
            "undefined_steps": [n for n, r in seq if r is None],
        }
    report = ConvergenceReport(records, verdict=verdict)
    report.notes.append("finite-range surrogate for a limit statement; evidence, not proof")
    return report


def norm1_convergence(chain: Chain, kind: str, steps: Optional[Sequence[int]] = None) -> ConvergenceReport:
    """sum_i |P_i - w_i / sum(w)| per step, with a log-log decay fit."""
    steps = tuple(steps or chain.steps)
    records, points = [], []
    bounded = []
    for n in steps:
        g = chain_game(chain, n)
        total = sum(g.weights)
        p = _power(g, kind)
        value = sum((abs(x - w / total) for x, w in zip(p, g.weights)), Fraction(0))
        records.append(StepRecord(n, "norm1_error", value))
        points.append((n, value))
        bounded.append(n * value)
    slope, res = _fit(points)
    values = [v for _, v in points]
    verdict = {
        "decreasing": all(b <= a for a, b in zip(values, values[1:])),
        "all_zero": all(v == 0 for v in values),
        "max_n_times_error": str(max(bounded)),
    }
    relative = [max(chain.weights(n)) / sum(chain.weights(n)) * n for n in steps]
    verdict["max_weight_times_n"] = str(max(relative))
    report = ConvergenceReport(records, slope, res, verdict)
    report.notes.append("decay exponent is a float64 least-squares fit of log error on log n")
    return report


def _check_relative(g: WeightedGame) -> tuple:
    total = sum(g.weights)
    if total == 0:
        raise GameError("weights sum to zero")
    w = tuple(x / total for x in g.weights)
    q = g.quota / total
    if not 0 < q < 1:
        raise GameError(f"relative quota must lie in (0, 1), got {q}")
    return q, w


def nucleolus_bound_check(g: WeightedGame, variant: str = "proven") -> dict:
    """||Nuc(g) - w||_1 against 2*Delta/min(q,1-q) (proven) or Delta/min(q,1-q) (conjectured)."""
    q, w = _check_relative(g)
    if g.n > MAX_NUCLEOLUS_PLAYERS:
        raise EnvelopeError(f"nucleolus supports n <= {MAX_NUCLEOLUS_PLAYERS}, got {g.n}")
    nuc = nucleolus(realize(g))
    lhs = sum((abs(a - b) for a, b in zip(nuc, w)), Fraction(0))
    delta = max(w)
    base = delta / min(q, 1 - q)
    if variant == "proven":
        rhs = 2 * base
    elif variant == "conjectured":
        rhs = base
    else:
        raise GameError(f"unknown variant {variant!r}; choose 'proven' or 'conjectured'")
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs, "slack": rhs - lhs, "nucleolus": nuc, "q": q, "delta": delta}


def random_normalized_game(rng: random.Random, n: int, max_weight: int = 100, quota_den: int = 1000) -> WeightedGame:
    """Random weights in [0, max_weight], normalized, with relative quota in (0, 1)."""
    while True:
        w = [rng.randint(0, max_weight) for _ in range(n)]
        if sum(w):
            break
    total = sum(w)
    q = Fraction(rng.randint(1, quota_den - 1), quota_den)
    return WeightedGame(q, tuple(Fraction(x, total) for x in w))


def nucleolus_bound_scan(samples: int, seed: int = 0, n_min: int = 2, n_max: int = 12) -> dict:
    """Random sampling of both bound variants; violations are kept as artifacts."""
    rng = random.Random(seed)
    violations = {"proven": [], "conjectured": []}
    worst = {"proven": Fraction(0), "conjectured": Fraction(0)}
    for _ in range(samples):
        g = random_normalized_game(rng, rng.randint(n_min, n_max))
        chk = nucleolus_bound_check(g, "conjectured")
        ratio = chk["lhs"] / chk["rhs"]  # rhs > 0 since delta > 0
        for variant, r in (("conjectured", ratio), ("proven", ratio / 2)):
            worst[variant] = max(worst[variant], r)
            if r > 1:
                violations[variant].append(str(g))
    return {
        "samples": samples,
        "seed": seed,
        "violations": violations,
        "max_lhs_over_rhs": {k: str(v) for k, v in worst.items()},
    }


def _tightness_ratio(q: int, w: tuple) -> Optional[Fraction]:
    total = sum(w)
    if total == 0 or not 0 < q < total or w.count(0) == len(w):
        return None
    g = WeightedGame(q, w)
    chk = nucleolus_bound_check(g, "conjectured")
    return chk["lhs"] / chk["rhs"]


def nucleolus_tightness_search(n: int, seed: int = 0, restarts: int = 4, iterations: int = 60, max_weight: int = 20) -> dict:
    """Steepest ascent on lhs * min(q, 1-q) / Delta over integer [q; w].

    A ratio above 1 would violate the conjectured bound; a ratio of 1 shows
    tightness.
    """
    rng = random.Random(seed)
    best_state, best = None, Fraction(-1)
    history = []
    for _ in range(restarts):
        while True:
            w = tuple(rng.randint(0, max_weight) for _ in range(n))
            if sum(w) > 1:
                break
        state = (rng.randint(1, sum(w) - 1), w)
        cur = _tightness_ratio(*state)
        for _ in range(iterations):
            q, w = state
            cands = [(q + 1, w), (q - 1, w)]
            for i in range(n):
                for d in (1, -1):
                    if 0 <= w[i] + d <= max_weight:
                        cands.append((q, w[:i] + (w[i] + d,) + w[i + 1:]))
            scored = [(r, c) for c in cands if (r := _tightness_ratio(*c)) is not None]
            if not scored:
                break
            r, c = max(scored, key=lambda t: t[0])
            if r <= cur:
                break
            state, cur = c, r
        history.append(str(cur))
        if cur > best:
            best_state, best = state, cur
    q, w = best_state
    return {
        "n": n,
        "best_ratio": best,
        "best_game": str(WeightedGame(q, w)),
        "counterexample": best > 1,
        "restart_ratios": history,
    }


@dataclass(frozen=True)
class BoundCheckConfig:
    """Template c * Delta^alpha / min(q, 1-q)^beta and a game sampler.

    ``sampler`` is ``"random"`` (uniform integer weights) or ``"replica"``
    (``base`` replicated to reach n voters).
    """

    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(1)
    c: Fraction = Fraction(2)
    kind: str = "nucleolus"
    sampler: str = "random"
    n_min: int = 2
    n_max: int = 10
    base: tuple = (2, 1)

    def __post_init__(self):
        for name in ("alpha", "beta", "c"):
            v = Fraction(getattr(self, name))
            if v <= 0:
                raise GameError(f"{name} must be positive")
            object.__setattr__(self, name, v)


def _template(delta: Fraction, q: Fraction, alpha: Fraction, beta: Fraction):
    """Delta^alpha / min(q,1-q)^beta, exact when both exponents are integers."""
    m = min(q, 1 - q)
    if alpha.denominator == 1 and beta.denominator == 1:
        return delta ** int(alpha) / m ** int(beta)
    return float(delta) ** float(alpha) / float(m) ** float(beta)


def generic_bound_scan(config: BoundCheckConfig, samples: int, seed: int = 0) -> dict:
    """Empirical supremum of lhs / (Delta^alpha / min(q,1-q)^beta), overall and per n.

    Ratios are exact rationals for integer exponents and float64 otherwise.
    """
    if config.sampler not in ("random", "replica"):
        raise GameError(f"unknown sampler {config.sampler!r}")
    rng = random.Random(seed)
    sup, per_n, exceed = 0, {}, 0
    span = config.n_max - config.n_min + 1
    for s in range(samples):
        if config.sampler == "replica":
            n = config.n_min + s % span
            w = tuple(config.base[j % len(config.base)] for j in range(n))
            g = WeightedGame(Fraction(rng.randint(1, 999), 1000) * sum(w), w)
        else:
            g = random_normalized_game(rng, rng.randint(config.n_min, config.n_max))
            n = g.n
        q, w = _check_relative(g)
        p = _power(g, config.kind)
        lhs = sum((abs(a - b) for a, b in zip(p, w)), Fraction(0))
        ratio = lhs / _template(max(w), q, config.alpha, config.beta)
        sup = max(sup, ratio)
        per_n[n] = max(per_n.get(n, 0), ratio)
        if ratio > config.c:
            exceed += 1
    exact = isinstance(sup, Fraction) or sup == 0
    return {
        "kind": config.kind,
        "sampler": config.sampler,
        "samples": samples,
        "empirical_sup": sup,
        "sup_by_n": dict(sorted(per_n.items())),
        "exceeding_c": exceed,
        "precision": "exact" if exact else "float64",
    }


def psi_vector(n: int) -> tuple:
    return tuple(Fraction(2, 2 * n - 1) for _ in range(n - 1)) + (Fraction(1, 2 * n - 1),)


def psi_bound(n: int, kind: str, q=Fraction(1, 2)) -> dict:
    """Distance of [q; psi^n] from psi^n against the floor 2/(2n-1) * (n-1)/n."""
    if kind not in PSI_KINDS:
        raise EnvelopeError(
            f"{kind} is not a symmetric, positive and efficient index; the floor only covers {', '.join(PSI_KINDS)}"
        )
    if n < 2:
        raise GameError("psi bound needs n >= 2")
    q = Fraction(q)
    if not 0 < q < 1:
        raise GameError(f"relative quota must lie in (0, 1), got {q}")
    psi = psi_vector(n)
    g = WeightedGame(q * (2 * n - 1), (2,) * (n - 1) + (1,))
    p = _power(g, kind)
    lhs = sum((abs(a - b) for a, b in zip(p, psi)), Fraction(0))
    floor = Fraction(2, 2 * n - 1) * Fraction(n - 1, n)
    return {"n": n, "kind": kind, "q": q, "lhs": lhs, "floor": floor, "ratio": lhs / floor, "holds": lhs >= floor}


def atomic_limit_estimate(chain: Chain, kind: str, steps: Optional[Sequence[int]] = None) -> ConvergenceReport:
    """Power of each atomic player per step, with successive differences.

    ``n * |P(n_k+1) - P(n_k)|`` staying bounded (last no more than twice the
    first) is reported as consistent with O(1/n) differences.
    """
    steps = tuple(steps or chain.steps)
    records, verdict = [], {}
    for j in range(len(chain.atomic)):
        name = f"atomic{j}"
        seq = []
        for n in steps:
            p = _power(chain_game(chain, n), kind)
            seq.append(p[chain.index(("atomic", j), n)])
            records.append(StepRecord(n, name, seq[-1]))
        scaled = []
        for (n0, a), (n1, b) in zip(zip(steps, seq), zip(steps[1:], seq[1:])):
            diff = abs(b - a)
            records.append(StepRecord(n1, f"{name}_diff", diff))
            scaled.append(n0 * diff)
        verdict[name] = {
            "last_value": str(seq[-1]),
            "n_times_diff": [str(s) for s in scaled],
            "consistent_with_inverse_n": bool(scaled) and scaled[-1] <= 2 * max(scaled[0], Fraction(1, 10**9)),
        }
    report = ConvergenceReport(records, verdict=verdict)
    report.notes.append("Cauchy-type diagnostics over a finite range; evidence, not proof")
    return report
