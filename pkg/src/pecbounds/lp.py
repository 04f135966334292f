"""Linear constraint systems over named rate variables and a simplex solver.

The solver is a two-phase primal simplex with Bland's anti-cycling rule.
In exact mode every number is a `fractions.Fraction`, so optima compare
exactly against closed forms; a float mode with tolerance 1e-9 is available
for larger instances. No big-M: phase 1 minimizes explicit artificials.
Every optimal solve carries a dual certificate that is verified before the
solution is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import InputError
from .rational import fmt_rational, parse_rational

RELATIONS = ("<=", "=", ">=")

FLOAT_TOL = 1e-9
_FLOAT_DROP = 1e-12


@dataclass(frozen=True)
class Row:
    """One linear constraint: sum(coeffs[v] * v) rel rhs."""

    coeffs: Mapping[str, Fraction]
    rel: str
    rhs: Fraction

    def canonical(self):
        return (self.rel, self.rhs, tuple(sorted(self.coeffs.items())))


def make_row(coeffs: Mapping, rel: str, rhs) -> Row:
    if rel not in RELATIONS:
        raise InputError(f"unknown relation {rel!r}")
    parsed = {v: parse_rational(c) for v, c in coeffs.items() if parse_rational(c) != 0}
    return Row(coeffs=parsed, rel=rel, rhs=parse_rational(rhs))


class ConstraintSystem:
    """Ordered variables, linear rows, and per-variable nonnegativity flags."""

    def __init__(self, variables, rows=(), nonneg=None):
        self.variables: list[str] = list(variables)
        if len(set(self.variables)) != len(self.variables):
            raise InputError("duplicate variable names")
        index = set(self.variables)
        self.rows: list[Row] = []
        for row in rows:
            if not isinstance(row, Row):
                row = make_row(*row)
            unknown = set(row.coeffs) - index
            if unknown:
                raise InputError(f"row references undeclared variables {sorted(unknown)}")
            self.rows.append(row)
        if nonneg is None:
            self.nonneg = {v: True for v in self.variables}
        else:
            self.nonneg = {v: bool(nonneg.get(v, True)) for v in self.variables}

    def add_row(self, coeffs: Mapping, rel: str, rhs) -> None:
        row = make_row(coeffs, rel, rhs)
        unknown = set(row.coeffs) - set(self.variables)
        if unknown:
            raise InputError(f"row references undeclared variables {sorted(unknown)}")
        self.rows.append(row)

    def canonical_key(self):
        """Structural identity, used to deduplicate equivalent systems."""
        return (tuple(self.variables),
                tuple(sorted((v, self.nonneg[v]) for v in self.variables)),
                frozenset(row.canonical() for row in self.rows))

    def to_obj(self):
        return {
            "variables": list(self.variables),
            "nonneg": {v: self.nonneg[v] for v in self.variables},
            "rows": [
                {"coeffs": {v: fmt_rational(c) for v, c in sorted(row.coeffs.items())},
                 "rel": row.rel,
                 "rhs": fmt_rational(row.rhs)}
                for row in self.rows
            ],
        }

    @classmethod
    def from_obj(cls, obj) -> "ConstraintSystem":
        rows = [make_row(r["coeffs"], r["rel"], r["rhs"]) for r in obj["rows"]]
        return cls(obj["variables"], rows, obj.get("nonneg"))


@dataclass
class LpSolution:
    status: str                      # optimal | infeasible | unbounded
    value: Fraction | float | None = None
    assignment: dict = field(default_factory=dict)
    duals: list = field(default_factory=list)   # one multiplier per row


def feasible(system: ConstraintSystem, point: Mapping, tol=0) -> bool:
    """Exact (or tolerance) substitution check of every row and sign flag."""
    missing = [v for v in system.variables if v not in point]
    if missing:
        raise InputError(f"point missing variables {missing}")
    vals = {v: parse_rational(point[v]) if tol == 0 else float(point[v])
            for v in system.variables}
    for v in system.variables:
        if system.nonneg[v] and vals[v] < -tol:
            return False
    for row in system.rows:
        lhs = sum((c * vals[v] for v, c in row.coeffs.items()),
                  Fraction(0) if tol == 0 else 0.0)
        if row.rel == "<=" and not lhs <= row.rhs + tol:
            return False
        if row.rel == ">=" and not lhs >= row.rhs - tol:
            return False
        if row.rel == "=" and not (abs(lhs - row.rhs) <= tol):
            return False
    return True


class _Simplex:
    """Dict-sparse tableau simplex on the canonical min form A x (rel) b, x >= 0."""

    def __init__(self, system: ConstraintSystem, objective: Mapping, mode: str):
        if mode not in ("exact", "float"):
            raise InputError(f"unknown mode {mode!r}")
        self.mode = mode
        self.tol = Fraction(0) if mode == "exact" else FLOAT_TOL
        self.zero = Fraction(0) if mode == "exact" else 0.0
        conv = (lambda x: parse_rational(x)) if mode == "exact" else (lambda x: float(x))

        # structural columns; free variables split into two nonnegative parts
        self.col_of_var: dict[str, tuple[int, int | None]] = {}
        ncol = 0
        for v in system.variables:
            if system.nonneg[v]:
                self.col_of_var[v] = (ncol, None)
                ncol += 1
            else:
                self.col_of_var[v] = (ncol, ncol + 1)
                ncol += 2
        self.n_struct = ncol

        # objective: maximize -> minimize the negation
        self.cost: dict[int, Fraction] = {}
        for v, c in objective.items():
            if v not in self.col_of_var:
                raise InputError(f"objective references undeclared variable {v!r}")
            c = conv(c)
            if c == 0:
                continue
            pos, neg = self.col_of_var[v]
            self.cost[pos] = self.cost.get(pos, self.zero) - c
            if neg is not None:
                self.cost[neg] = self.cost.get(neg, self.zero) + c

        # rows normalized to nonnegative rhs; remember the sign flip for duals
        self.rows: list[dict[int, Fraction]] = []
        self.b: list[Fraction] = []
        self.row_sign: list[int] = []
        rels = []
        for row in system.rows:
            coeffs = {}
            for v, c in row.coeffs.items():
                c = conv(c)
                pos, neg = self.col_of_var[v]
                coeffs[pos] = coeffs.get(pos, self.zero) + c
                if neg is not None:
                    coeffs[neg] = coeffs.get(neg, self.zero) - c
            rhs = conv(row.rhs)
            rel = row.rel
            sign = 1
            if rhs < 0:
                coeffs = {c: -a for c, a in coeffs.items()}
                rhs = -rhs
                rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
                sign = -1
            self.rows.append({c: a for c, a in coeffs.items() if not self._is_zero(a)})
            self.b.append(rhs)
            self.row_sign.append(sign)
            rels.append(rel)

        # slack / surplus / artificial columns; initial identity basis
        self.init_col: list[int] = []
        self.basis: list[int] = []
        self.artificial: set[int] = set()
        self.dead: set[int] = set()
        for i, rel in enumerate(rels):
            if rel == "<=":
                col = ncol
                ncol += 1
                self.rows[i][col] = self.zero + 1
                self.init_col.append(col)
                self.basis.append(col)
            else:
                if rel == ">=":
                    col = ncol
                    ncol += 1
                    self.rows[i][col] = self.zero - 1
                art = ncol
                ncol += 1
                self.rows[i][art] = self.zero + 1
                self.artificial.add(art)
                self.init_col.append(art)
                self.basis.append(art)
        self.ncol = ncol
        self.dropped: set[int] = set()

    def _is_zero(self, x) -> bool:
        if self.mode == "exact":
            return x == 0
        return abs(x) <= _FLOAT_DROP

    def _reduced_costs(self, cost: dict[int, Fraction]) -> dict[int, Fraction]:
        rrow = dict(cost)
        for i, bcol in enumerate(self.basis):
            if i in self.dropped:
                continue
            cb = cost.get(bcol, self.zero)
            if cb == 0:
                continue
            for col, a in self.rows[i].items():
                nv = rrow.get(col, self.zero) - cb * a
                if self._is_zero(nv):
                    rrow.pop(col, None)
                else:
                    rrow[col] = nv
        for bcol in self.basis:
            rrow.pop(bcol, None)
        return rrow

    def _pivot(self, rrow: dict, i: int, j: int) -> None:
        prow = self.rows[i]
        piv = prow[j]
        if piv != 1:
            self.rows[i] = prow = {c: a / piv for c, a in prow.items()}
            self.b[i] = self.b[i] / piv
        for r, row in enumerate(self.rows):
            if r == i or r in self.dropped:
                continue
            factor = row.get(j)
            if factor is None or self._is_zero(factor):
                continue
            for c, a in prow.items():
                nv = row.get(c, self.zero) - factor * a
                if self._is_zero(nv):
                    row.pop(c, None)
                else:
                    row[c] = nv
            nb = self.b[r] - factor * self.b[i]
            self.b[r] = self.zero if self._is_zero(nb) else nb
        factor = rrow.get(j)
        if factor is not None and not self._is_zero(factor):
            for c, a in prow.items():
                nv = rrow.get(c, self.zero) - factor * a
                if self._is_zero(nv):
                    rrow.pop(c, None)
                else:
                    rrow[c] = nv
        rrow.pop(j, None)
        self.basis[i] = j

    def _iterate(self, rrow: dict) -> str:
        max_iters = 200 * (len(self.rows) + self.ncol + 10)
        basic = set(self.basis)
        for _ in range(max_iters):
            entering = None
            for col, r in rrow.items():
                if col in self.dead or col in basic:
                    continue
                if r < -self.tol and (entering is None or col < entering):
                    entering = col
            if entering is None:
                return "optimal"
            leave, best = None, None
            for i, row in enumerate(self.rows):
                if i in self.dropped:
                    continue
                a = row.get(entering)
                if a is None or a <= self.tol:
                    continue
                ratio = self.b[i] / a
                if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                    leave, best = i, ratio
            if leave is None:
                return "unbounded"
            basic.discard(self.basis[leave])
            basic.add(entering)
            self._pivot(rrow, leave, entering)
        raise InputError("simplex iteration limit exceeded")

    def solve(self) -> tuple[str, dict[int, Fraction], list]:
        # phase 1: drive artificials to zero
        if self.artificial:
            p1cost = {a: self.zero + 1 for a in self.artificial}
            rrow = self._reduced_costs(p1cost)
            status = self._iterate(rrow)
            if status != "optimal":
                raise InputError("phase-1 simplex reported unbounded")
            infeas = sum((self.b[i] for i, bc in enumerate(self.basis)
                          if bc in self.artificial and i not in self.dropped), self.zero)
            if infeas > self.tol:
                return "infeasible", {}, []
            # pivot remaining degenerate artificials out, or drop redundant rows
            for i, bc in enumerate(list(self.basis)):
                if bc not in self.artificial or i in self.dropped:
                    continue
                pivot_col = None
                for col, a in self.rows[i].items():
                    if col in self.artificial or self._is_zero(a):
                        continue
                    pivot_col = col
                    break
                if pivot_col is None:
                    self.dropped.add(i)
                else:
                    self._pivot(rrow, i, pivot_col)
            self.dead |= self.artificial

        rrow = self._reduced_costs(self.cost)
        status = self._iterate(rrow)
        if status != "optimal":
            return status, {}, []

        values = {col: self.zero for col in range(self.n_struct)}
        for i, bcol in enumerate(self.basis):
            if i not in self.dropped and bcol < self.n_struct:
                values[bcol] = self.b[i]

        # dual of the user's max problem: y_i = sign_i * reduced cost of the
        # row's initial identity column (slack or artificial)
        duals = []
        for i in range(len(self.rows)):
            if i in self.dropped:
                duals.append(self.zero)
                continue
            duals.append(self.row_sign[i] * rrow.get(self.init_col[i], self.zero))
        return "optimal", values, duals


def verify_certificate(system: ConstraintSystem, objective: Mapping,
                       solution: LpSolution, tol=0) -> bool:
    """Check the dual certificate of a maximization: feasibility, signs,
    domination of the objective, and matching objective values."""
    if solution.status != "optimal":
        return False
    if not feasible(system, solution.assignment, tol=tol):
        return False
    conv = (lambda x: parse_rational(x)) if tol == 0 else (lambda x: float(x))
    zero = Fraction(0) if tol == 0 else 0.0
    duals = solution.duals
    if len(duals) != len(system.rows):
        return False
    for row, y in zip(system.rows, duals):
        if row.rel == "<=" and y < -tol:
            return False
        if row.rel == ">=" and y > tol:
            return False
    for v in system.variables:
        lhs = zero
        for row, y in zip(system.rows, duals):
            c = row.coeffs.get(v)
            if c is not None:
                lhs += conv(y) * conv(c)
        target = conv(objective.get(v, 0))
        if system.nonneg[v]:
            if lhs < target - tol:
                return False
        elif abs(lhs - target) > tol:
            return False
    dual_value = sum((conv(y) * conv(row.rhs) for row, y in zip(system.rows, duals)), zero)
    primal_value = sum((conv(objective.get(v, 0)) * conv(solution.assignment[v])
                        for v in system.variables), zero)
    return abs(dual_value - primal_value) <= tol


def maximize(system: ConstraintSystem, objective: Mapping, mode: str = "exact") -> LpSolution:
    """Maximize a linear objective over the system; exact by default.

    The returned solution carries one dual multiplier per row; optimal
    solutions are certificate-verified before being returned.
    """
    simplex = _Simplex(system, objective, mode)
    status, values, duals = simplex.solve()
    if status != "optimal":
        return LpSolution(status=status)
    assignment = {}
    for v in system.variables:
        pos, neg = simplex.col_of_var[v]
        val = values.get(pos, simplex.zero)
        if neg is not None:
            val = val - values.get(neg, simplex.zero)
        assignment[v] = val
    conv = (lambda x: parse_rational(x)) if mode == "exact" else (lambda x: float(x))
    value = sum((conv(c) * assignment[v] for v, c in objective.items()), simplex.zero)
    solution = LpSolution(status="optimal", value=value, assignment=assignment, duals=duals)
    tol = 0 if mode == "exact" else FLOAT_TOL
    if not verify_certificate(system, objective, solution, tol=tol):
        raise InputError("internal error: optimality certificate failed verification")
    return solution


def solve_feasibility(system: ConstraintSystem, mode: str = "exact") -> LpSolution:
    """Zero-objective solve: reports a feasible point or infeasibility."""
    return maximize(system, {}, mode=mode)
