"""Exact rational linear programming.

A dense two-phase tableau simplex over the integers: every tableau row is held
as a list of ints with its own positive denominator, so no floating point is
ever involved. Bland's rule is the default pivot rule (no cycling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

__all__ = [
    "LPError",
    "Constraint",
    "LinearProgram",
    "LPResult",
    "solve",
    "lex_minimize",
    "verify_infeasibility",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_RELATIONS = ("<=", "=", ">=")


class LPError(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _num(x):
    """Exact number, kept as int when integral (ints are much cheaper)."""
    if type(x) is int:
        return x
    x = _frac(x)
    return x.numerator if x.denominator == 1 else x


@dataclass(frozen=True)
class Constraint:
    row: tuple
    rel: str
    rhs: Fraction


@dataclass
class LinearProgram:
    """``sense`` objective over ``num_vars`` variables.

    Variables default to the bounds ``(0, None)``; ``None`` means unbounded on
    that side.
    """

    num_vars: int
    objective: tuple = ()
    sense: str = "min"
    constraints: list = field(default_factory=list)
    bounds: list = field(default_factory=list)

    def __post_init__(self):
        if not self.objective:
            self.objective = (Fraction(0),) * self.num_vars
        self.objective = tuple(_frac(c) for c in self.objective)
        if len(self.objective) != self.num_vars:
            raise LPError("objective has wrong dimension")
        if self.sense not in ("min", "max"):
            raise LPError(f"unknown sense {self.sense!r}")
        if not self.bounds:
            self.bounds = [(Fraction(0), None)] * self.num_vars
        if len(self.bounds) != self.num_vars:
            raise LPError("bounds have wrong dimension")
        self.bounds = [
            (None if lo is None else _frac(lo), None if hi is None else _frac(hi))
            for lo, hi in self.bounds
        ]
        rows, self.constraints = self.constraints, []
        for c in rows:
            self.add(c.row, c.rel, c.rhs)

    def add(self, row: Sequence, rel: str, rhs) -> "LinearProgram":
        if len(row) != self.num_vars:
            raise LPError(
                f"constraint row has dimension {len(row)}, expected {self.num_vars}"
            )
        if rel not in _RELATIONS:
            raise LPError(f"unknown relation {rel!r}")
        self.constraints.append(Constraint(tuple(_num(a) for a in row), rel, _num(rhs)))
        return self

    def with_objective(self, objective: Sequence, sense: str = "min") -> "LinearProgram":
        return LinearProgram(
            self.num_vars, tuple(objective), sense, list(self.constraints), list(self.bounds)
        )

    def scaled(self, factor) -> "LinearProgram":
        """Same feasible set and optimizers, all data multiplied by ``factor`` > 0."""
        f = _frac(factor)
        if f <= 0:
            raise LPError("scale factor must be positive")
        return LinearProgram(
            self.num_vars,
            tuple(c * f for c in self.objective),
            self.sense,
            [Constraint(tuple(a * f for a in c.row), c.rel, c.rhs * f) for c in self.constraints],
            list(self.bounds),
        )


@dataclass(frozen=True)
class LPResult:
    """Outcome of :func:`solve`.

    ``duals`` holds one shadow price per constraint (derivative of the optimal
    value with respect to that constraint's right-hand side). ``farkas`` holds
    constraint multipliers proving infeasibility; see
    :func:`verify_infeasibility`.
    """

    status: str
    x: Optional[tuple] = None
    value: Optional[Fraction] = None
    duals: Optional[tuple] = None
    farkas: Optional[tuple] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _lcm_den(values: Iterable[Fraction]) -> int:
    m = 1
    for v in values:
        d = v.denominator
        if d != 1:
            m = m * d // math.gcd(m, d)
    return m


class _Tableau:
    """Row-wise integer tableau. Entry (i, j) equals ``rows[i][j] / den[i]``."""

    def __init__(self, rows, den, basis, forbidden):
        self.rows = rows
        self.den = den
        self.basis = basis
        self.forbidden = forbidden  # columns that may never enter
        self.obj = None
        self.obj_den = 1

    def set_objective(self, cost):
        # reduced costs d = c - c_B B^-1 A, carried as integers over obj_den
        width = len(self.rows[0])
        acc = [Fraction(0)] * width
        for j, c in enumerate(cost):
            if c:
                acc[j] += c
        for i, b in enumerate(self.basis):
            cb = cost[b] if b < len(cost) else 0
            if cb:
                f = Fraction(cb) / self.den[i]
                r = self.rows[i]
                for j, a in enumerate(r):
                    if a:
                        acc[j] -= f * a
        d = _lcm_den(acc)
        self.obj = [int(v * d) for v in acc]
        self.obj_den = d
        self._normalize_obj()

    def _normalize_obj(self):
        g = math.gcd(*self.obj, self.obj_den)
        if g > 1:
            self.obj = [v // g for v in self.obj]
            self.obj_den //= g

    def pivot(self, r, c):
        pr = self.rows[r]
        p = pr[c]
        # pivot row: entries become pr / p; keep integers with den = p
        if p < 0:
            pr = [-v for v in pr]
            p = -p
        g = math.gcd(*pr)
        if g > 1:
            pr = [v // g for v in pr]
            p //= g
        self.rows[r] = pr
        self.den[r] = p
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                new = [p * a - f * b for a, b in zip(row, pr)]
                d = self.den[i] * p
                g = math.gcd(*new, d)
                if g > 1:
                    new = [v // g for v in new]
                    d //= g
                self.rows[i] = new
                self.den[i] = d
        f = self.obj[c]
        if f:
            new = [p * a - f * b for a, b in zip(self.obj, pr)]
            self.obj = new
            self.obj_den *= p
            self._normalize_obj()
        self.basis[r] = c

    def run(self, rule="bland"):
        """Primal simplex on the current objective. Returns False if unbounded."""
        rhs = len(self.rows[0]) - 1
        while True:
            enter = -1
            if rule == "bland":
                for j in range(rhs):
                    if self.obj[j] < 0 and j not in self.forbidden:
                        enter = j
                        break
            else:
                best = 0
                for j in range(rhs):
                    if self.obj[j] < best and j not in self.forbidden:
                        best, enter = self.obj[j], j
            if enter < 0:
                return True
            leave = -1
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    if leave < 0:
                        leave = i
                        continue
                    lr = self.rows[leave]
                    # compare row[rhs]/a against lr[rhs]/lr[enter]
                    lhs = row[rhs] * lr[enter]
                    cur = lr[rhs] * a
                    if lhs < cur or (lhs == cur and self.basis[i] < self.basis[leave]):
                        leave = i
            if leave < 0:
                return False
            self.pivot(leave, enter)

    def value(self, i):
        return Fraction(self.rows[i][-1], self.den[i])


def _standardize(lp: LinearProgram):
    """Rewrite over nonnegative variables u.

    Returns integer rows (coefficients, rhs, row scale), relations, the
    variable map (x_j = offset_j + sum of sign * u_k) and the number of u's.
    """
    var_terms = []
    offsets = []
    nu = 0
    bound_rows = []
    for lo, hi in lp.bounds:
        if lo is not None:
            var_terms.append(((nu, 1),))
            offsets.append(lo)
            if hi is not None:
                bound_rows.append((nu, hi - lo))  # negative bound row -> infeasible
            nu += 1
        elif hi is not None:
            var_terms.append(((nu, -1),))
            offsets.append(hi)
            nu += 1
        else:
            var_terms.append(((nu, 1), (nu + 1, -1)))
            offsets.append(0)
            nu += 2
    simple = all(len(t) == 1 and t[0][1] == 1 for t in var_terms)
    shifted = any(offsets)
    rows, rels = [], []
    for c in lp.constraints:
        b = c.rhs
        if shifted:
            for a, off in zip(c.row, offsets):
                if a and off:
                    b -= a * off
        if simple:
            coeffs = list(c.row)
        else:
            coeffs = [0] * nu
            for j, a in enumerate(c.row):
                if a:
                    for k, sgn in var_terms[j]:
                        coeffs[k] += sgn * a
        d = 1
        for v in coeffs:
            vd = v.denominator
            if vd != 1:
                d = d * vd // math.gcd(d, vd)
        bd = b.denominator
        if bd != 1:
            d = d * bd // math.gcd(d, bd)
        if d == 1:
            coeffs = [int(v) for v in coeffs]
            b = int(b)
        else:
            coeffs = [int(v * d) for v in coeffs]
            b = int(b * d)
        rows.append((coeffs, b, d))
        rels.append(c.rel)
    for k, ub in bound_rows:
        coeffs = [0] * nu
        d = ub.denominator
        coeffs[k] = d
        rows.append((coeffs, int(ub * d), d))
        rels.append("<=")
    return rows, rels, var_terms, offsets, nu


def solve(lp: LinearProgram, rule: str = "bland") -> LPResult:
    """Solve ``lp`` exactly.

    ``rule`` is ``"bland"`` (smallest-index entering column, never cycles) or
    ``"dantzig"`` (most negative reduced cost; faster on typical inputs, with
    ties among leaving rows still broken by smallest index).
    """
    if rule not in ("bland", "dantzig"):
        raise LPError(f"unknown pivot rule {rule!r}")
    rows, rels, var_terms, offsets, nu = _standardize(lp)
    m = len(rows)
    n_orig = len(lp.constraints)

    slack_of = {}
    ns = 0
    for i, rel in enumerate(rels):
        if rel != "=":
            slack_of[i] = nu + ns
            ns += 1
    # slack columns absorb the row scale, so every initial basis column is a unit vector
    int_rows = []
    scale = []
    flip = []
    needs_art = []
    for i, (coeffs, b, d) in enumerate(rows):
        s = -1 if b < 0 else 1
        slack = [0] * ns
        if rels[i] == "<=":
            slack[slack_of[i] - nu] = s
        elif rels[i] == ">=":
            slack[slack_of[i] - nu] = -s
        if s < 0:
            coeffs = [-v for v in coeffs]
            b = -b
        int_rows.append(coeffs + slack + [b])
        scale.append(d)
        flip.append(s)
        sl = slack_of.get(i)
        needs_art.append(sl is None or int_rows[-1][sl] <= 0)
    arts = [i for i in range(m) if needs_art[i]]
    art_index = {i: k for k, i in enumerate(arts)}
    na = len(arts)
    width = nu + ns + na + 1
    tab_rows = []
    basis = []
    init_col = []
    art_cols = set()
    for i in range(m):
        r = int_rows[i]
        row = r[:-1] + [0] * na + [r[-1]]
        if needs_art[i]:
            col = nu + ns + art_index[i]
            row[col] = 1
            art_cols.add(col)
        else:
            col = slack_of[i]
        tab_rows.append(row)
        basis.append(col)
        init_col.append(col)

    if m == 0:
        return _solve_unconstrained(lp, var_terms, offsets, nu)

    tab = _Tableau(tab_rows, [1] * m, basis, set())

    def row_multipliers(cost):
        # y_r = c_{init col} - d_{init col}, in std-row units
        ys = []
        for i in range(m):
            col = init_col[i]
            c = cost[col] if col < len(cost) else 0
            ys.append(Fraction(c) - Fraction(tab.obj[col], tab.obj_den))
        return ys

    def to_original(ys):
        # multiplier for original constraint i (row was multiplied by flip*scale)
        return tuple(ys[i] * flip[i] * scale[i] for i in range(n_orig))

    if na:
        cost1 = [0] * (width - 1)
        for c in art_cols:
            cost1[c] = 1
        tab.set_objective(cost1)
        tab.run(rule)
        phase1 = sum(tab.value(i) for i in range(m) if tab.basis[i] in art_cols)
        if phase1 > 0:
            ys = row_multipliers(cost1)
            return LPResult(INFEASIBLE, farkas=to_original(ys))
        # drive zero-valued artificials out of the basis where possible
        for i in range(m):
            if tab.basis[i] in art_cols:
                row = tab.rows[i]
                for j in range(nu + ns):
                    if row[j] != 0:
                        tab.pivot(i, j)
                        break
        tab.forbidden = art_cols

    sign = 1 if lp.sense == "min" else -1
    cost_u = [Fraction(0)] * (width - 1)
    for j, c in enumerate(lp.objective):
        if c:
            for k, s in var_terms[j]:
                cost_u[k] += sign * s * c
    cd = _lcm_den(cost_u)
    cost2 = [int(c * cd) for c in cost_u]
    tab.set_objective(cost2)
    if not tab.run(rule):
        return LPResult(UNBOUNDED)

    u = [Fraction(0)] * nu
    for i, b in enumerate(tab.basis):
        if b < nu:
            u[b] = tab.value(i)
    x = tuple(
        offsets[j] + sum((s * u[k] for k, s in var_terms[j]), Fraction(0))
        for j in range(lp.num_vars)
    )
    value = sum((c * xi for c, xi in zip(lp.objective, x)), Fraction(0))
    ys = row_multipliers(cost2)
    duals = tuple(sign * y / cd for y in to_original(ys))
    return LPResult(OPTIMAL, x=x, value=value, duals=duals)


def _solve_unconstrained(lp, var_terms, offsets, nu):
    sign = 1 if lp.sense == "min" else -1
    x = []
    for (lo, hi), c in zip(lp.bounds, lp.objective):
        c = sign * c
        if c > 0:
            if lo is None:
                return LPResult(UNBOUNDED)
            x.append(lo)
        elif c < 0:
            if hi is None:
                return LPResult(UNBOUNDED)
            x.append(hi)
        else:
            x.append(lo if lo is not None else (hi if hi is not None else Fraction(0)))
    for lo, hi in lp.bounds:
        if lo is not None and hi is not None and lo > hi:
            return LPResult(INFEASIBLE, farkas=())
    value = sum((c * xi for c, xi in zip(lp.objective, x)), Fraction(0))
    return LPResult(OPTIMAL, x=tuple(x), value=value, duals=())


def verify_infeasibility(lp: LinearProgram, farkas: Sequence) -> bool:
    """Check that ``farkas`` multipliers prove ``lp`` infeasible.

    Multipliers must be >= 0 on ``>=`` rows and <= 0 on ``<=`` rows. Their
    combination, completed with the best bound multipliers, must read
    ``0 >= positive``.
    """
    if len(farkas) != len(lp.constraints):
        return False
    y = [_frac(v) for v in farkas]
    for yi, c in zip(y, lp.constraints):
        if (c.rel == ">=" and yi < 0) or (c.rel == "<=" and yi > 0):
            return False
    rhs = sum((yi * c.rhs for yi, c in zip(y, lp.constraints)), Fraction(0))
    for j, (lo, hi) in enumerate(lp.bounds):
        g = sum((yi * c.row[j] for yi, c in zip(y, lp.constraints)), Fraction(0))
        r = -g
        if r > 0:
            if lo is None:
                return False
            rhs += r * lo
        elif r < 0:
            if hi is None:
                return False
            rhs += r * hi
    return rhs > 0


def lex_minimize(objectives: Sequence[Sequence], lp: LinearProgram, rule: str = "bland") -> tuple:
    """Minimize each objective in turn, freezing every achieved optimum."""
    if not objectives:
        raise LPError("empty objective stack")
    work = LinearProgram(lp.num_vars, (), "min", list(lp.constraints), list(lp.bounds))
    result = None
    for obj in objectives:
        result = solve(work.with_objective(obj, "min"), rule)
        if result.status == INFEASIBLE:
            raise LPError("lexicographic minimization of an infeasible program")
        if result.status == UNBOUNDED:
            raise LPError("objective unbounded below")
        work.add(obj, "=", result.value)
    return result.x
