"""Deciding whether a feasible guarantee can be improved.

A guarantee is maximal when no other feasible guarantee dominates it.  The
decision runs a cutting-plane loop: a small master LP proposes a candidate
dominating the input with maximum total cumulative slack, subject to cover
cuts accumulated from profiles that refuted earlier candidates.  A candidate
that survives the working profiles goes to the full feasibility engine;
its witness profile, if any, contributes a new cut.  The loop ends either
with a certified improver (dominated) or with master slack exactly zero
(maximal: even the relaxation admits no strict dominator, and the true
feasible set is contained in the relaxation).

Positive verdicts can be decorated with per-rank forcing profiles (profiles
where every implementing lottery is pinned to the guarantee's cumulative
value at that rank) and cross-checked with polar certificates: strictly
increasing zero-sum vectors orthogonal to the guarantee.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .lottery import RankLottery, ZERO, dominates, uniform
from .lp import (
    EQ,
    GE,
    INFEASIBLE,
    LE,
    OPTIMAL,
    Constraint,
    LinearProgram,
    solve,
)
from .feasibility import (
    FEASIBLE,
    UNDECIDED,
    FeasibilityReport,
    active_ranks,
    implement_program,
    implement_report,
    is_feasible,
    verified_anchors,
)
from .library import hard_profiles
from .profiles import Profile

MAXIMAL = "maximal"
DOMINATED = "dominated"

_witness_cache: dict[tuple[int, int], list[Profile]] = {}


@dataclass(frozen=True)
class MaximalityReport:
    verdict: str
    n: int
    p: int
    improver: Optional[RankLottery] = None
    witnesses: Optional[dict[int, Profile]] = None
    iterations: int = 0
    profiles_in_working_set: int = 0
    feasibility: Optional[FeasibilityReport] = None
    runtime_ms: int = 0

    @property
    def maximal(self) -> bool:
        return self.verdict == MAXIMAL


@dataclass(frozen=True)
class PolarCertificate:
    """A strictly increasing zero-sum vector orthogonal to the guarantee."""

    z: tuple[Fraction, ...]


def check_polar_certificate(
    cert: PolarCertificate,
    lam: RankLottery,
    test_set: Sequence[RankLottery] = (),
) -> bool:
    """Validate all checkable certificate conditions.

    The test set stands in for the full polar cone: every member must have
    been verified feasible beforehand, and the certificate must price each
    one nonpositively.
    """
    z = cert.z
    if len(z) != lam.p:
        return False
    if sum(z, ZERO) != 0:
        return False
    if any(a >= b for a, b in zip(z, z[1:])):
        return False
    if sum((x * v for x, v in zip(lam.probs, z)), ZERO) != 0:
        return False
    for mu in test_set:
        if sum((x * v for x, v in zip(mu.probs, z)), ZERO) > 0:
            return False
    return True


def _cover_cut(mu_active: tuple[int, ...], certificate: Sequence[Fraction], p: int) -> Constraint:
    """Turn a Farkas certificate of an implementation LP into a master cut.

    The LP rows are the mass equality followed by one tail row per (agent,
    active rank).  Normalizing the multipliers by the equality's weight
    gives cover weights w_k with sum_k w_k * cum_k(mu) >= 1 for every
    lottery mu implementable at the refuting profile.
    """
    assert mu_active, "a candidate with no tail constraints cannot be refuted"
    y0 = certificate[0]
    assert y0 < 0, "degenerate certificate"
    tau = -y0
    weight_by_rank: dict[int, Fraction] = {}
    idx = 1
    while idx < len(certificate):
        for k in mu_active:
            y = certificate[idx]
            if y != 0:
                weight_by_rank[k] = weight_by_rank.get(k, ZERO) + y / tau
            idx += 1
    coeffs = [ZERO] * p
    for k, w in weight_by_rank.items():
        for t in range(k):
            coeffs[t] += w
    return Constraint(tuple(coeffs), GE, Fraction(1))


def _master_program(lam: RankLottery, cuts: Sequence[Constraint]) -> LinearProgram:
    p = lam.p
    cum = lam.cumulative()
    rows = [Constraint((Fraction(1),) * p, EQ, Fraction(1))]
    for k in range(1, p):
        coeffs = tuple(Fraction(1) if t < k else ZERO for t in range(p))
        rows.append(Constraint(coeffs, LE, cum[k - 1]))
    rows.extend(cuts)
    # maximizing total cumulative slack == minimizing sum_t (p - t) * mu_t
    objective = tuple(Fraction(-(p - t)) for t in range(1, p + 1))
    return LinearProgram(p, tuple(rows), objective, maximize=True)


def improve(
    lam: RankLottery,
    n: int,
    *,
    jobs: int = 1,
    max_iterations: int = 400,
    limit_profiles: Optional[int] = None,
    time_budget: Optional[float] = None,
    working: Optional[list[Profile]] = None,
) -> tuple[Optional[RankLottery], str, int, int]:
    """Search for a feasible guarantee strictly dominating `lam`.

    Returns (improver or None, status, iterations, working set size) where
    status is "dominated", "maximal", or "undecided".  The caller must have
    established that `lam` itself is feasible.
    """
    p = lam.p
    cum = lam.cumulative()
    deadline = None if time_budget is None else time.monotonic() + time_budget

    anchors = verified_anchors(n, p, jobs=jobs) if 3 <= n < p else (uniform(p),)
    for anchor in anchors:
        if anchor.probs != lam.probs and dominates(anchor, lam):
            return anchor, DOMINATED, 0, 0

    if working is None:
        working = []
    seeds = _witness_cache.setdefault((n, p), [])
    for prof in [*seeds, *hard_profiles(n, p)]:
        working.append(prof)

    slack_base = sum(cum[:-1], ZERO)
    cuts: list[Constraint] = []
    for iteration in range(1, max_iterations + 1):
        if deadline is not None and time.monotonic() > deadline:
            return None, UNDECIDED, iteration - 1, len(working)
        result = solve(_master_program(lam, cuts))
        assert result.status == OPTIMAL, "master must stay solvable"
        slack = slack_base + result.objective_value
        assert slack >= 0, "the input lottery should keep the master nonempty"
        if slack == 0:
            return None, MAXIMAL, iteration, len(working)
        mu = RankLottery(result.primal)
        mu_active = active_ranks(mu)

        refuted = False
        for prof in reversed(working):
            lp_result = solve(implement_program(mu, prof))
            if lp_result.status == INFEASIBLE:
                cuts.append(_cover_cut(mu_active, lp_result.certificate, p))
                refuted = True
                break
        if refuted:
            continue

        remaining = None if deadline is None else max(0.0, deadline - time.monotonic())
        report = is_feasible(
            mu, n, jobs=jobs, limit_profiles=limit_profiles, time_budget=remaining
        )
        if report.verdict == FEASIBLE:
            return mu, DOMINATED, iteration, len(working)
        if report.verdict == UNDECIDED:
            return None, UNDECIDED, iteration, len(working)
        witness = report.witness_profile
        assert witness is not None and report.witness_certificate is not None
        working.append(witness)
        seeds.append(witness)
        # The feasibility engine builds the same row layout, so its Farkas
        # certificate converts directly into a master cut.
        cuts.append(_cover_cut(mu_active, report.witness_certificate, p))

    return None, UNDECIDED, max_iterations, len(working)


def is_maximal(
    lam: RankLottery,
    n: int,
    *,
    jobs: int = 1,
    witnesses: bool = False,
    max_iterations: int = 400,
    limit_profiles: Optional[int] = None,
    time_budget: Optional[float] = None,
) -> MaximalityReport:
    """Full maximality decision with optional per-rank forcing profiles."""
    started = time.perf_counter()
    feas = is_feasible(lam, n, jobs=jobs, limit_profiles=limit_profiles, time_budget=time_budget)
    if feas.verdict == UNDECIDED:
        return _report(UNDECIDED, lam, n, feasibility=feas, started=started)
    if feas.verdict != FEASIBLE:
        raise ValueError(f"not a feasible guarantee: {lam.text()}")

    if n == 2:
        reflected = lam.reflect()
        if reflected.probs == lam.probs:
            report = _report(MAXIMAL, lam, n, feasibility=feas, started=started)
        else:
            half = Fraction(1, 2)
            improver = RankLottery(
                tuple(half * a + half * b for a, b in zip(lam.probs, reflected.probs))
            )
            report = _report(
                DOMINATED, lam, n, improver=improver, feasibility=feas, started=started
            )
    else:
        improver, status, iterations, working_size = improve(
            lam,
            n,
            jobs=jobs,
            max_iterations=max_iterations,
            limit_profiles=limit_profiles,
            time_budget=time_budget,
        )
        report = _report(
            status,
            lam,
            n,
            improver=improver,
            iterations=iterations,
            working_size=working_size,
            feasibility=feas,
            started=started,
        )

    if witnesses and report.verdict == MAXIMAL:
        found: dict[int, Profile] = {}
        for k in range(1, lam.p):
            prof = forcing_profile(lam, n, k)
            if prof is not None:
                found[k] = prof
        report = _report(
            MAXIMAL,
            lam,
            n,
            witnesses=found,
            iterations=report.iterations,
            working_size=report.profiles_in_working_set,
            feasibility=feas,
            started=started,
        )
    return report


def _report(
    verdict: str,
    lam: RankLottery,
    n: int,
    *,
    improver: Optional[RankLottery] = None,
    witnesses: Optional[dict[int, Profile]] = None,
    iterations: int = 0,
    working_size: int = 0,
    feasibility: Optional[FeasibilityReport] = None,
    started: float,
) -> MaximalityReport:
    return MaximalityReport(
        verdict=verdict,
        n=n,
        p=lam.p,
        improver=improver,
        witnesses=witnesses,
        iterations=iterations,
        profiles_in_working_set=working_size,
        feasibility=feasibility,
        runtime_ms=int((time.perf_counter() - started) * 1000),
    )


def forcing_value(lam: RankLottery, prof: Profile, k: int) -> Fraction:
    """The smallest achievable worst k-tail mass over lotteries implementing
    `lam` at `prof` (the input must be implementable there)."""
    p = lam.p
    cum = lam.cumulative()
    rows = [Constraint((Fraction(1),) * p + (ZERO,), EQ, Fraction(1))]
    for pref in prof.prefs:
        for ka in active_ranks(lam):
            coeffs = [ZERO] * (p + 1)
            for a in pref.order[:ka]:
                coeffs[a - 1] = Fraction(1)
            rows.append(Constraint(tuple(coeffs), LE, cum[ka - 1]))
    for pref in prof.prefs:
        coeffs = [ZERO] * (p + 1)
        for a in pref.order[:k]:
            coeffs[a - 1] = Fraction(1)
        coeffs[p] = Fraction(-1)
        rows.append(Constraint(tuple(coeffs), LE, ZERO))
    objective = (ZERO,) * p + (Fraction(1),)
    result = solve(LinearProgram(p + 1, tuple(rows), objective, maximize=False))
    if result.status != OPTIMAL:
        raise ValueError("lottery is not implementable at this profile")
    return result.objective_value


def forcing_profile(
    lam: RankLottery,
    n: int,
    k: int,
    *,
    candidates: Optional[Iterable[Profile]] = None,
) -> Optional[Profile]:
    """A profile at which every lottery implementing `lam` has some agent's
    k-tail mass exactly at the guarantee's cumulative value.

    Searches the structured library (plus any supplied candidates); failure
    to find one is inconclusive unless the search was exhaustive.
    """
    if not 1 <= k <= lam.p - 1:
        raise ValueError(f"k={k} out of range")
    target = lam.cumulative()[k - 1]
    pool: list[Profile] = list(candidates) if candidates is not None else []
    pool.extend(_witness_cache.get((n, lam.p), []))
    pool.extend(hard_profiles(n, lam.p))
    for prof in pool:
        if prof.n != n or prof.p != lam.p:
            continue
        ell, _ = implement_report(lam, prof)
        if ell is None:
            continue
        if forcing_value(lam, prof, k) == target:
            return prof
    return None
