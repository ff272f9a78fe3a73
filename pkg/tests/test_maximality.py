import random
from fractions import Fraction

import pytest

from worstvote.duality import dual
from worstvote.feasibility import is_feasible
from worstvote.lottery import (
    RankLottery,
    convex_combination,
    dominates,
    is_symmetric,
    lottery,
    m2_vertices,
    parse_lottery,
    rd,
    uniform,
    vt,
)
from worstvote.maximality import (
    PolarCertificate,
    check_polar_certificate,
    forcing_profile,
    forcing_value,
    improve,
    is_maximal,
)
from worstvote.profiles import identical_profile, parse_profile, reversal_profile

from .test_lottery import rand_lottery

F = Fraction

LEFT_SHOWCASE = parse_profile("1 2 4 5 6 3 / 2 3 5 6 4 1 / 3 1 6 4 5 2")
RIGHT_SHOWCASE = parse_profile("1 4 5 6 2 3 / 2 5 6 4 3 1 / 3 6 4 5 1 2")


class TestImprove:
    def test_named_guarantees_cannot_improve(self):
        for lam in (uniform(6), vt(3, 6), rd(3, 6)):
            improver, status, _, _ = improve(lam, 3)
            assert improver is None
            assert status == "maximal"

    def test_single_veto_improved(self):
        improver, status, _, _ = improve(lottery([0, 1, 0, 0, 0, 0]), 3)
        assert status == "dominated"
        assert dominates(improver, lottery([0, 1, 0, 0, 0, 0]))
        assert is_feasible(improver, 3).feasible

    def test_half_mix_improved_by_uniform(self):
        mix = parse_lottery("1/6,1/3,1/6,1/6,0,1/6")
        improver, status, _, _ = improve(mix, 3)
        assert status == "dominated"
        assert dominates(uniform(6), mix)

    def test_iteration_cap_gives_undecided(self):
        improver, status, _, _ = improve(
            parse_lottery("1/3,0,0,1/3,1/3,0,0"), 3, max_iterations=0
        )
        assert improver is None
        assert status == "undecided"

    def test_time_budget_gives_undecided(self):
        report = is_maximal(vt(3, 6), 3, time_budget=0.0)
        assert report.verdict == "undecided"

    def test_improver_is_strict_and_feasible(self):
        rng = random.Random(0)
        checked = 0
        while checked < 6:
            lam = rand_lottery(5, rng)
            if not is_feasible(lam, 3).feasible:
                continue
            checked += 1
            improver, status, _, _ = improve(lam, 3)
            if status == "dominated":
                assert improver.probs != lam.probs
                assert dominates(improver, lam)
                assert is_feasible(improver, 3).feasible


class TestIsMaximal:
    def test_two_agent_symmetric_vertex(self):
        report = is_maximal(parse_lottery("0,1/2,0,0,1/2,0"), 2)
        assert report.verdict == "maximal"

    def test_boundary_pair_at_five_outcomes(self):
        report = is_maximal(parse_lottery("1/2,0,0,1/2,0"), 3)
        assert report.verdict == "maximal"

    def test_uniform_everywhere(self):
        for n, p in ((2, 5), (3, 6), (4, 3), (3, 3)):
            assert is_maximal(uniform(p), n).verdict == "maximal"

    def test_rejects_infeasible_input(self):
        with pytest.raises(ValueError):
            is_maximal(lottery([0, 0, 0, 0, 0, 1]), 3)

    def test_two_agent_agreement_with_symmetry(self):
        rng = random.Random(1)
        seen = 0
        while seen < 25:
            lam = rand_lottery(6, rng)
            if not is_feasible(lam, 2).feasible:
                continue
            seen += 1
            report = is_maximal(lam, 2)
            assert (report.verdict == "maximal") == is_symmetric(lam)

    def test_duality_transport(self):
        cases = [vt(3, 6), rd(3, 6), parse_lottery("1/6,1/3,1/6,1/6,0,1/6")]
        for lam in cases:
            assert is_maximal(lam, 3).verdict == is_maximal(dual(lam), 3).verdict

    def test_radius_closure(self):
        lam = vt(3, 6)
        for alpha in (F(1, 4), F(2, 3)):
            mid = convex_combination([(1 - alpha, uniform(6)), (alpha, lam)])
            assert is_maximal(mid, 3).verdict == "maximal"

    def test_improver_attached_in_report(self):
        report = is_maximal(parse_lottery("2/3,0,0,0,0,1/3"), 3)
        assert report.verdict == "dominated"
        assert dominates(report.improver, parse_lottery("2/3,0,0,0,0,1/3"))

    def test_mixtures_along_dictator_headed_prefixes(self):
        # mixing the guarantees of nested dictator-headed words stays maximal
        from worstvote.compose import canonical_word

        head = canonical_word("RD", 3, 7)
        deeper = canonical_word("RD,VT", 3, 7)
        for w in (F(1, 3), F(3, 4)):
            mix = convex_combination([(w, head), (1 - w, deeper)])
            assert is_maximal(mix, 3).verdict == "maximal"


class TestAgainstMonolithicMaster:
    """The iterative improver must answer exactly like the one-shot LP that
    carries an implementing-lottery block for every canonical profile."""

    @staticmethod
    def literal_master_slack(lam, n, profiles):
        from worstvote.lp import EQ, LE, Constraint, LinearProgram, solve

        p = lam.p
        cum = lam.cumulative()
        m = len(profiles)
        nv = p + m * p
        rows = [Constraint(tuple([F(1)] * p + [F(0)] * (m * p)), EQ, F(1))]
        for k in range(1, p):
            coeffs = [F(1) if t < k else F(0) for t in range(p)] + [F(0)] * (m * p)
            rows.append(Constraint(tuple(coeffs), LE, cum[k - 1]))
        for j, prof in enumerate(profiles):
            base = p + j * p
            coeffs = [F(0)] * nv
            for t in range(p):
                coeffs[base + t] = F(1)
            rows.append(Constraint(tuple(coeffs), EQ, F(1)))
            for pref in prof.prefs:
                for k in range(1, p):
                    coeffs = [F(0)] * nv
                    for a in pref.order[:k]:
                        coeffs[base + a - 1] = F(1)
                    for t in range(k):
                        coeffs[t] = F(-1)
                    rows.append(Constraint(tuple(coeffs), LE, F(0)))
        obj = [F(-(p - t)) for t in range(1, p + 1)] + [F(0)] * (m * p)
        result = solve(LinearProgram(nv, tuple(rows), tuple(obj), maximize=True))
        assert result.status == "optimal"
        return sum(cum[:-1], F(0)) + result.objective_value

    @pytest.mark.parametrize("n,p", [(2, 3), (3, 3)])
    def test_agreement_on_random_feasible_lotteries(self, n, p):
        from worstvote.profiles import enumerate_profiles

        profiles = list(enumerate_profiles(n, p))
        rng = random.Random(42)
        tested = 0
        while tested < 6:
            lam = rand_lottery(p, rng, grain=8)
            if not is_feasible(lam, n).feasible:
                continue
            tested += 1
            slack = self.literal_master_slack(lam, n, profiles)
            _, status, _, _ = improve(lam, n)
            assert (slack == 0) == (status == "maximal")


class TestForcingProfiles:
    def test_veto_pinned_by_padded_cycle(self):
        lam = vt(3, 6)
        for k in range(1, 6):
            assert forcing_value(lam, RIGHT_SHOWCASE, k) == lam.cumulative()[k - 1]

    def test_dictator_pinned_by_top_padded_cycle(self):
        lam = rd(3, 6)
        for k in range(1, 6):
            assert forcing_value(lam, LEFT_SHOWCASE, k) == lam.cumulative()[k - 1]

    def test_identical_profile_does_not_pin_uniform(self):
        # mass can hide on the shared best outcome, so the common-preference
        # profile enforces nothing
        lam = uniform(6)
        assert forcing_value(lam, identical_profile(3, 6), 3) == 0

    def test_reversal_profile_pins_uniform(self):
        lam = uniform(6)
        prof = reversal_profile(3, 6)
        for k in range(1, 6):
            assert forcing_value(lam, prof, k) == F(k, 6)

    def test_search_finds_witnesses_for_named_guarantees(self):
        for lam in (uniform(6), vt(3, 6), rd(3, 6)):
            for k in (1, 3, 5):
                prof = forcing_profile(lam, 3, k)
                assert prof is not None
                assert forcing_value(lam, prof, k) == lam.cumulative()[k - 1]

    def test_witnesses_attached_to_report(self):
        report = is_maximal(vt(3, 6), 3, witnesses=True)
        assert report.verdict == "maximal"
        assert set(report.witnesses) == {1, 2, 3, 4, 5}


class TestPolarCertificates:
    def test_centered_ramp_certifies_symmetric_guarantees(self):
        rng = random.Random(2)
        p = 6
        ramp = PolarCertificate(tuple(F(2 * k - (p + 1), 2) for k in range(1, p + 1)))
        feasible_pool = []
        while len(feasible_pool) < 10:
            lam = rand_lottery(p, rng)
            if is_feasible(lam, 2).feasible:
                feasible_pool.append(lam)
        for vertex in m2_vertices(p):
            assert check_polar_certificate(ramp, vertex, feasible_pool)

    def test_not_increasing_rejected(self):
        z = PolarCertificate((F(0), F(0), F(0)))
        assert not check_polar_certificate(z, uniform(3), [])

    def test_nonorthogonal_rejected(self):
        z = PolarCertificate((F(-1), F(0), F(1)))
        lam = lottery([F(1, 2), F(1, 2), 0])
        assert not check_polar_certificate(z, lam, [])

    def test_nonzero_sum_rejected(self):
        z = PolarCertificate((F(-1), F(0), F(2)))
        assert not check_polar_certificate(z, uniform(3), [])

    def test_positive_pricing_rejected(self):
        ramp = PolarCertificate((F(-1), F(0), F(1)))
        top = lottery([0, 0, 1])
        assert not check_polar_certificate(ramp, uniform(3), [top])
