import itertools
from fractions import Fraction

import pytest

from worstvote.lp import (
    Constraint,
    LinearProgram,
    constraint,
    feasibility_program,
    solve,
    verify_infeasibility,
    verify_optimal,
)

F = Fraction


def brute_force_maximum(lp):
    """Independent oracle: enumerate every basic point of the constraint
    system (including the nonnegativity facets) and take the best feasible
    one.  Only for tiny programs."""
    rows = []
    for c in lp.constraints:
        rows.append((list(c.coeffs), c.rel, c.rhs))
    for j in range(lp.num_vars):
        coeffs = [F(0)] * lp.num_vars
        coeffs[j] = F(1)
        rows.append((coeffs, ">=", F(0)))

    def solve_square(system):
        # Gaussian elimination over the rationals; None if singular.
        m = [list(coeffs) + [rhs] for coeffs, rhs in system]
        size = len(m)
        for col in range(size):
            pivot = next((r for r in range(col, size) if m[r][col] != 0), None)
            if pivot is None:
                return None
            m[col], m[pivot] = m[pivot], m[col]
            inv = F(1) / m[col][col]
            m[col] = [v * inv for v in m[col]]
            for r in range(size):
                if r != col and m[r][col] != 0:
                    factor = m[r][col]
                    m[r] = [v - factor * w for v, w in zip(m[r], m[col])]
        return [m[r][-1] for r in range(size)]

    best = None
    for combo in itertools.combinations(range(len(rows)), lp.num_vars):
        system = [(rows[i][0], rows[i][2]) for i in combo]
        x = solve_square(system)
        if x is None:
            continue
        ok = True
        for coeffs, rel, rhs in rows:
            lhs = sum(c * v for c, v in zip(coeffs, x))
            if rel == "<=" and lhs > rhs:
                ok = False
            if rel == ">=" and lhs < rhs:
                ok = False
            if rel == "=" and lhs != rhs:
                ok = False
            if not ok:
                break
        if not ok:
            continue
        value = sum(c * v for c, v in zip(lp.objective, x))
        if best is None or value > best:
            best = value
    return best


class TestSolve:
    def test_simple_maximum(self):
        lp = LinearProgram(1, (constraint([1], "<=", 1),), (F(1),), maximize=True)
        result = solve(lp)
        assert result.status == "optimal"
        assert result.primal == (F(1),)
        assert result.objective_value == 1

    def test_infeasible_with_certificate(self):
        lp = feasibility_program(1, [constraint([1], "<=", -1)])
        result = solve(lp)
        assert result.status == "infeasible"
        assert verify_infeasibility(lp, result.certificate)

    def test_unbounded(self):
        lp = LinearProgram(2, (constraint([0, 1], "=", 1),), (F(1), F(0)), maximize=True)
        assert solve(lp).status == "unbounded"

    def test_equalities_and_ge(self):
        lp = LinearProgram(
            2,
            (constraint([1, 1], ">=", 2), constraint([1, -1], "=", 0)),
            (F(2), F(3)),
            maximize=False,
        )
        result = solve(lp)
        assert result.primal == (F(1), F(1))
        assert result.objective_value == 5

    def test_degenerate_matches_vertex_scan(self):
        # pairwise-sum caps create massive pivot ties
        lp = LinearProgram(
            3,
            (
                constraint([1, 1, 0], "<=", 1),
                constraint([1, 0, 1], "<=", 1),
                constraint([0, 1, 1], "<=", 1),
                constraint([1, 1, 1], "<=", 1),
                constraint([2, 1, 1], "<=", 2),
            ),
            (F(1), F(1), F(1)),
            maximize=True,
        )
        result = solve(lp)
        assert result.status == "optimal"
        assert result.objective_value == brute_force_maximum(lp)

    def test_random_small_programs_match_vertex_scan(self):
        import random

        rng = random.Random(9)
        for _ in range(40):
            rows = tuple(
                constraint([rng.randint(-3, 3) for _ in range(3)], "<=", rng.randint(0, 4))
                for _ in range(4)
            )
            # bound the feasible region so the oracle comparison is total
            rows = rows + (constraint([1, 1, 1], "<=", 5),)
            lp = LinearProgram(
                3, rows, tuple(F(rng.randint(-3, 3)) for _ in range(3)), maximize=True
            )
            result = solve(lp)
            assert result.status == "optimal"
            assert result.objective_value == brute_force_maximum(lp)

    def test_determinism(self):
        lp = LinearProgram(
            3,
            (
                constraint([1, 1, 0], "<=", 1),
                constraint([1, 0, 1], "<=", 1),
                constraint([0, 1, 1], "<=", 1),
            ),
            (F(1), F(1), F(1)),
            maximize=True,
        )
        assert solve(lp) == solve(lp)


class TestVerification:
    def test_optimal_reverifies(self):
        lp = LinearProgram(
            2,
            (constraint([2, 1], "<=", 4), constraint([1, 3], "<=", 6)),
            (F(3), F(5)),
            maximize=True,
        )
        result = solve(lp)
        assert verify_optimal(lp, result)

    def test_certificates_reverify_on_random_infeasible_systems(self):
        import random

        rng = random.Random(11)
        found = 0
        while found < 15:
            rows = [
                constraint([rng.randint(-2, 2) for _ in range(3)], rng.choice(["<=", ">=", "="]), rng.randint(-3, 3))
                for _ in range(4)
            ]
            lp = feasibility_program(3, rows)
            result = solve(lp)
            if result.status != "infeasible":
                continue
            found += 1
            assert verify_infeasibility(lp, result.certificate)

    def test_tampered_certificate_rejected(self):
        lp = feasibility_program(1, [constraint([1], "<=", -1)])
        result = solve(lp)
        bad = tuple(-y for y in result.certificate)
        assert not verify_infeasibility(lp, bad)


class TestValidation:
    def test_dimension_checks(self):
        with pytest.raises(ValueError):
            LinearProgram(2, (constraint([1], "<=", 1),), (F(1), F(0)))
        with pytest.raises(ValueError):
            LinearProgram(1, (), (F(1), F(0)))

    def test_relation_check(self):
        with pytest.raises(ValueError):
            Constraint((F(1),), "<", F(1))

    def test_dump_is_readable(self):
        lp = LinearProgram(2, (constraint([1, 2], "<=", 3),), (F(1), F(0)), maximize=False)
        text = lp.dump()
        assert "min" in text and "<= 3" in text and "x >= 0" in text
