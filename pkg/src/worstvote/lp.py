"""Exact rational linear programming with verifiable certificates.

A dense two-phase simplex over `fractions.Fraction` with Bland's pivot rule,
so every run terminates and is deterministic for a given input.  Variables
are nonnegative; other bounds are expressed as explicit constraint rows.

Results are treated as proofs downstream: optimal solutions are re-checked
against every constraint before being returned, and infeasible programs
come with a Farkas certificate `y` such that, writing the constraints as
rows, the combination ``sum_i y_i * row_i`` has nonnegative coefficients on
every variable while ``sum_i y_i * rhs_i`` is negative.  With ``x >= 0``
that is the contradiction ``0 <= negative``.  Sign conventions: ``y_i >= 0``
on ``<=`` rows, ``y_i <= 0`` on ``>=`` rows, free on ``=`` rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .lottery import RationalLike, as_fraction

ZERO = Fraction(0)
ONE = Fraction(1)

LE = "<="
EQ = "="
GE = ">="
_RELS = (LE, EQ, GE)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    rel: str
    rhs: Fraction

    def __post_init__(self) -> None:
        if self.rel not in _RELS:
            raise ValueError(f"unknown relation {self.rel!r}")
        if any(not isinstance(c, Fraction) for c in self.coeffs):
            object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in self.coeffs))
        if not isinstance(self.rhs, Fraction):
            object.__setattr__(self, "rhs", as_fraction(self.rhs))


def constraint(coeffs: Iterable[RationalLike], rel: str, rhs: RationalLike) -> Constraint:
    return Constraint(tuple(as_fraction(c) for c in coeffs), rel, as_fraction(rhs))


@dataclass(frozen=True)
class LinearProgram:
    """min/max of a linear objective over {x >= 0, constraints}."""

    num_vars: int
    constraints: tuple[Constraint, ...]
    objective: tuple[Fraction, ...]
    maximize: bool = True

    def __post_init__(self) -> None:
        if len(self.objective) != self.num_vars:
            raise ValueError("objective length does not match variable count")
        for row in self.constraints:
            if len(row.coeffs) != self.num_vars:
                raise ValueError("constraint length does not match variable count")

    def dump(self) -> str:
        """Plain-text rendering for external cross-checking."""
        sense = "max" if self.maximize else "min"
        lines = [f"{sense} " + " + ".join(f"{c}*x{j}" for j, c in enumerate(self.objective))]
        for row in self.constraints:
            lhs = " + ".join(f"{c}*x{j}" for j, c in enumerate(row.coeffs) if c != 0) or "0"
            lines.append(f"  {lhs} {row.rel} {row.rhs}")
        lines.append("  x >= 0")
        return "\n".join(lines)


@dataclass(frozen=True)
class LPResult:
    status: str
    primal: Optional[tuple[Fraction, ...]] = None
    objective_value: Optional[Fraction] = None
    certificate: Optional[tuple[Fraction, ...]] = None


def feasibility_program(num_vars: int, constraints: Sequence[Constraint]) -> LinearProgram:
    """A zero-objective program; `solve` then acts as a feasibility check."""
    return LinearProgram(num_vars, tuple(constraints), (ZERO,) * num_vars, maximize=False)


def verify_optimal(lp: LinearProgram, result: LPResult) -> bool:
    """Exact re-check of a claimed optimal solution (not of optimality itself)."""
    if result.status != OPTIMAL or result.primal is None:
        return False
    x = result.primal
    if len(x) != lp.num_vars or any(v < 0 for v in x):
        return False
    for row in lp.constraints:
        lhs = sum((c * v for c, v in zip(row.coeffs, x)), ZERO)
        if row.rel == LE and lhs > row.rhs:
            return False
        if row.rel == GE and lhs < row.rhs:
            return False
        if row.rel == EQ and lhs != row.rhs:
            return False
    value = sum((c * v for c, v in zip(lp.objective, x)), ZERO)
    return value == result.objective_value


def verify_infeasibility(lp: LinearProgram, certificate: Sequence[Fraction]) -> bool:
    """Mechanically re-check a Farkas certificate against the raw constraints."""
    if len(certificate) != len(lp.constraints):
        return False
    for y, row in zip(certificate, lp.constraints):
        if row.rel == LE and y < 0:
            return False
        if row.rel == GE and y > 0:
            return False
    combined = [ZERO] * lp.num_vars
    total = ZERO
    for y, row in zip(certificate, lp.constraints):
        if y == 0:
            continue
        for j, c in enumerate(row.coeffs):
            if c != 0:
                combined[j] += y * c
        total += y * row.rhs
    return all(c >= 0 for c in combined) and total < 0


class _Tableau:
    """Dense simplex tableau; rows are [coeffs..., rhs], plus a cost row."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis

    def pivot(self, row_idx: int, col: int, cost: list[Fraction]) -> None:
        rows = self.rows
        prow = rows[row_idx]
        inv = ONE / prow[col]
        if inv != 1:
            rows[row_idx] = prow = [v * inv for v in prow]
        for i, row in enumerate(rows):
            if i == row_idx:
                continue
            factor = row[col]
            if factor != 0:
                rows[i] = [v - factor * pv for v, pv in zip(row, prow)]
        factor = cost[col]
        if factor != 0:
            cost[:] = [v - factor * pv for v, pv in zip(cost, prow)]
        self.basis[row_idx] = col

    def run(self, cost: list[Fraction], blocked: frozenset[int]) -> str:
        """Minimize until optimal or unbounded; Bland's rule throughout."""
        rows = self.rows
        ncols = len(cost) - 1
        while True:
            enter = -1
            for j in range(ncols):
                if j not in blocked and cost[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best: Fraction | None = None
            for i, row in enumerate(rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED
            self.pivot(leave, enter, cost)


def solve(lp: LinearProgram) -> LPResult:
    """Exact optimum or a self-verified Farkas infeasibility certificate."""
    nv = lp.num_vars
    m = len(lp.constraints)

    # Normalize to rhs >= 0, remembering per-row sign flips.
    norm_coeffs: list[tuple[Fraction, ...]] = []
    norm_rel: list[str] = []
    norm_rhs: list[Fraction] = []
    flipped: list[bool] = []
    for row in lp.constraints:
        if row.rhs < 0:
            norm_coeffs.append(tuple(-c for c in row.coeffs))
            norm_rhs.append(-row.rhs)
            norm_rel.append({LE: GE, GE: LE, EQ: EQ}[row.rel])
            flipped.append(True)
        else:
            norm_coeffs.append(row.coeffs)
            norm_rhs.append(row.rhs)
            norm_rel.append(row.rel)
            flipped.append(False)

    n_slack = sum(1 for r in norm_rel if r == LE)
    n_surplus = sum(1 for r in norm_rel if r == GE)
    n_art = sum(1 for r in norm_rel if r in (GE, EQ))
    slack0 = nv
    surplus0 = nv + n_slack
    art0 = nv + n_slack + n_surplus
    ncols = art0 + n_art

    rows: list[list[Fraction]] = []
    basis: list[int] = []
    unit_col: list[int] = []  # column whose reduced cost encodes this row's dual
    si = slack0
    ui = surplus0
    ai = art0
    for i in range(m):
        row = [ZERO] * (ncols + 1)
        for j, c in enumerate(norm_coeffs[i]):
            row[j] = c
        row[-1] = norm_rhs[i]
        rel = norm_rel[i]
        if rel == LE:
            row[si] = ONE
            basis.append(si)
            unit_col.append(si)
            si += 1
        elif rel == GE:
            row[ui] = -ONE
            ui += 1
            row[ai] = ONE
            basis.append(ai)
            unit_col.append(ai)
            ai += 1
        else:
            row[ai] = ONE
            basis.append(ai)
            unit_col.append(ai)
            ai += 1
        rows.append(row)

    tab = _Tableau(rows, basis)

    # Phase 1: minimize the sum of artificial variables.
    art_cols = frozenset(range(art0, ncols))
    cost1 = [ZERO] * (ncols + 1)
    for j in art_cols:
        cost1[j] = ONE
    for i, b in enumerate(basis):
        if b in art_cols:
            cost1 = [c - r for c, r in zip(cost1, rows[i])]
    status = tab.run(cost1, blocked=frozenset())
    assert status == OPTIMAL, "phase 1 cannot be unbounded"
    w = -cost1[-1]

    if w > 0:
        # Infeasible; read the dual off the cost row and map back to the
        # original row order and orientations.
        cert: list[Fraction] = []
        for i in range(m):
            col = unit_col[i]
            red = cost1[col]
            pi = (ONE - red) if col >= art0 else -red
            y = -pi
            cert.append(-y if flipped[i] else y)
        result = LPResult(status=INFEASIBLE, certificate=tuple(cert))
        assert verify_infeasibility(lp, result.certificate), "bad Farkas certificate"
        return result

    # Drive any zero-valued artificial out of the basis, dropping redundant rows.
    drop: list[int] = []
    for i in range(m):
        if tab.basis[i] in art_cols:
            pivot_col = -1
            for j in range(art0):
                if tab.rows[i][j] != 0:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                tab.pivot(i, pivot_col, cost1)
            else:
                drop.append(i)
    if drop:
        for i in reversed(drop):
            del tab.rows[i]
            del tab.basis[i]

    # Phase 2 on the original objective (as minimization).
    sense = -1 if lp.maximize else 1
    cost2 = [ZERO] * (ncols + 1)
    for j in range(nv):
        cost2[j] = sense * lp.objective[j]
    for i, b in enumerate(tab.basis):
        if cost2[b] != 0:
            cost2 = [c - cost2[b] * r for c, r in zip(cost2, tab.rows[i])]
    status = tab.run(cost2, blocked=art_cols)
    if status == UNBOUNDED:
        return LPResult(status=UNBOUNDED)

    x = [ZERO] * nv
    for i, b in enumerate(tab.basis):
        if b < nv:
            x[b] = tab.rows[i][-1]
    value = sum((c * v for c, v in zip(lp.objective, x)), ZERO)
    result = LPResult(status=OPTIMAL, primal=tuple(x), objective_value=value)
    assert verify_optimal(lp, result), "optimal solution failed re-verification"
    return result
