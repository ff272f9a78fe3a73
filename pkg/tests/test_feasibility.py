import random
from fractions import Fraction

import pytest

from worstvote.feasibility import (
    active_ranks,
    balanced_family,
    cardinal_falsifier,
    implement_at,
    implement_program,
    is_feasible,
    necessary_cuts,
    system_count,
)
from worstvote.lottery import (
    dominates,
    lottery,
    parse_lottery,
    rd,
    uniform,
    vt,
)
from worstvote.lp import verify_infeasibility
from worstvote.profiles import parse_profile, rank_rearrange

from .test_lottery import rand_lottery

F = Fraction

LEFT_SHOWCASE = parse_profile("1 2 4 5 6 3 / 2 3 5 6 4 1 / 3 1 6 4 5 2")
RIGHT_SHOWCASE = parse_profile("1 4 5 6 2 3 / 2 5 6 4 3 1 / 3 6 4 5 1 2")


class TestImplementAt:
    def test_uniform_always_works(self):
        rng = random.Random(0)
        from .test_profiles import random_profile

        for _ in range(10):
            prof = random_profile(3, 5, rng)
            ell = implement_at(uniform(5), prof)
            assert ell is not None
            for pref in prof.prefs:
                assert dominates(rank_rearrange(ell, pref), uniform(5))

    def test_dictator_forced_at_left_showcase(self):
        ell = implement_at(rd(3, 6), LEFT_SHOWCASE)
        assert ell is not None
        assert ell.text() == "1/3,1/3,1/3,0,0,0"

    def test_veto_forced_at_right_showcase(self):
        ell = implement_at(vt(3, 6), RIGHT_SHOWCASE)
        assert ell is not None
        assert ell.text() == "0,0,0,1/3,1/3,1/3"

    def test_returned_lottery_dominates_for_everyone(self):
        rng = random.Random(1)
        from .test_profiles import random_profile

        for _ in range(30):
            lam = rand_lottery(5, rng)
            prof = random_profile(3, 5, rng)
            ell = implement_at(lam, prof)
            if ell is None:
                continue
            for pref in prof.prefs:
                assert dominates(rank_rearrange(ell, pref), lam)


class TestActiveRanks:
    def test_only_increasing_cumulative_counts(self):
        assert active_ranks(vt(3, 6)) == (1, 2, 3)
        assert active_ranks(rd(3, 6)) == (1, 5)
        assert active_ranks(lottery([1, 0, 0])) == ()

    def test_reduction_is_sound(self):
        # brute force over every (2-agent) profile at p=4: the reduced
        # constraint set decides exactly like the full definition
        import itertools

        from worstvote.lp import EQ, LE, Constraint, feasibility_program, solve
        from worstvote.profiles import Preference, Profile

        rng = random.Random(2)
        perms = list(itertools.permutations(range(1, 5)))
        for _ in range(12):
            lam = rand_lottery(4, rng, grain=8)
            cum = lam.cumulative()
            for combo in itertools.product(perms, repeat=2):
                prof = Profile(tuple(Preference(o) for o in combo))
                reduced = implement_at(lam, prof) is not None
                rows = [Constraint((F(1),) * 4, EQ, F(1))]
                for pref in prof.prefs:
                    for k in range(1, 4):
                        coeffs = [F(0)] * 4
                        for a in pref.order[:k]:
                            coeffs[a - 1] = F(1)
                        rows.append(Constraint(tuple(coeffs), LE, cum[k - 1]))
                full = solve(feasibility_program(4, rows)).status == "optimal"
                assert reduced == full


class TestIsFeasible:
    def test_named_guarantees(self):
        assert is_feasible(vt(3, 6), 3).feasible
        assert is_feasible(rd(3, 6), 3).feasible
        assert is_feasible(uniform(7), 5).feasible

    def test_middle_point_mass_blocked(self):
        report = is_feasible(lottery([0, 0, 1, 0, 0]), 3)
        assert report.verdict == "infeasible"
        assert report.witness_profile is not None

    def test_witness_certificates_reverify(self):
        rng = random.Random(3)
        found = 0
        while found < 10:
            lam = rand_lottery(rng.choice((5, 6)), rng)
            report = is_feasible(lam, 3)
            if report.verdict != "infeasible":
                continue
            found += 1
            program = implement_program(lam, report.witness_profile)
            assert verify_infeasibility(program, report.witness_certificate)

    def test_undecided_on_limit(self):
        lam = parse_lottery("1/12,1/12,1/6,1/6,1/4,1/4")
        report = is_feasible(lam, 3, limit_profiles=5, use_hull=False)
        assert report.verdict in ("undecided", "infeasible")

    def test_undecided_on_time_budget(self):
        lam = parse_lottery("1/3,0,0,1/3,1/3,0,0")
        report = is_feasible(lam, 3, time_budget=0.0, use_hull=False)
        assert report.verdict == "undecided"
        assert report.method == "profile-limit"

    def test_feasibility_downward_closed(self):
        # anything dominated by a feasible guarantee is feasible
        rng = random.Random(4)
        for _ in range(40):
            mu = rand_lottery(5, rng)
            lam = rand_lottery(5, rng)
            if not dominates(mu, lam):
                continue
            if is_feasible(mu, 3).feasible:
                assert is_feasible(lam, 3).feasible

    def test_two_agent_matches_closed_form(self):
        from worstvote.lottery import feasible_n2

        rng = random.Random(5)
        for _ in range(50):
            lam = rand_lottery(6, rng)
            assert is_feasible(lam, 2).feasible == feasible_n2(lam)

    def test_single_agent_everything_feasible(self):
        rng = random.Random(6)
        for _ in range(10):
            assert is_feasible(rand_lottery(5, rng), 1).feasible

    def test_parallel_scan_matches_serial(self):
        lam = parse_lottery("1/4,1/4,0,0,1/4,1/4,0")
        serial = is_feasible(lam, 3, jobs=1, use_hull=False)
        import worstvote.feasibility as feas

        feas._verdict_cache.pop((3, lam.probs), None)
        parallel = is_feasible(lam, 3, jobs=2, use_hull=False)
        assert serial.verdict == parallel.verdict == "feasible"
        assert serial.profiles_checked == parallel.profiles_checked


class TestSystemScan:
    def test_system_count_full_support(self):
        # all ranks active at p=4, three agents: sorted pairs over 4! chains
        lam = uniform(4)
        assert system_count(lam, 3) == 300  # C(24 + 1, 2)

    def test_scan_agrees_with_canonical_enumeration_at_3_5(self):
        import worstvote.feasibility as feas
        from worstvote.lottery import convex_combination
        from worstvote.profiles import enumerate_profiles

        profiles = list(enumerate_profiles(3, 5))
        rng = random.Random(3)

        def brute(lam):
            return all(implement_at(lam, prof) is not None for prof in profiles)

        checked = 0
        for _ in range(400):
            raw = rand_lottery(5, rng, grain=10)
            lam = convex_combination([(F(3, 5), uniform(5)), (F(2, 5), raw)])
            feas._verdict_cache.pop((3, lam.probs), None)
            report = is_feasible(lam, 3, use_hull=False)
            if report.method != "scan":
                continue
            checked += 1
            assert report.feasible == brute(lam)
            if checked >= 3:
                break
        assert checked >= 3

        # push a maximal boundary guarantee upward: infeasible, and only a
        # concrete profile (not a closed-form cut) can show it
        for text in ("1/2,0,0,9/20,1/20", "1/3,4/15,0,0,2/5"):
            lam = parse_lottery(text)
            report = is_feasible(lam, 3, use_hull=False)
            assert report.verdict == "infeasible"
            assert report.method in ("scan", "library-profile")
            assert not brute(lam)
            program = implement_program(lam, report.witness_profile)
            assert verify_infeasibility(program, report.witness_certificate)

    def test_scan_agrees_with_profile_bruteforce(self):
        import itertools

        from worstvote.profiles import Preference, Profile

        rng = random.Random(7)
        perms = list(itertools.permutations(range(1, 5)))
        for _ in range(8):
            lam = rand_lottery(4, rng, grain=6)
            report = is_feasible(lam, 3, use_hull=False)
            brute = True
            for combo in itertools.product(perms, repeat=3):
                prof = Profile(tuple(Preference(o) for o in combo))
                if implement_at(lam, prof) is None:
                    brute = False
                    break
            assert report.feasible == brute


class TestBalancedFamilies:
    def test_partition_case(self):
        fam = balanced_family(6, 2, 4)
        assert fam is not None
        assert all(w == 1 for w in fam.weights)
        assert fam.is_balanced(6)

    def test_cyclic_interval_case(self):
        fam = balanced_family(5, 2, 4)
        assert fam is not None
        assert [sorted(s) for s in fam.sets] == [[1, 2], [3, 4], [3, 5], [4, 5]]
        assert list(fam.weights) == [F(1), F(1, 2), F(1, 2), F(1, 2)]

    def test_double_odd_case(self):
        fam = balanced_family(12, 5, 6)
        assert fam is not None
        assert len(fam.sets) == 6
        assert all(len(s) == 5 for s in fam.sets)
        assert fam.is_balanced(12)

    def test_double_even_case(self):
        fam = balanced_family(14, 6, 7)
        assert fam is not None
        assert len(fam.sets) <= 7
        assert fam.is_balanced(14)

    def test_unsupported_contexts_return_none(self):
        assert balanced_family(7, 3, 4) is None  # p = 2n - 1
        assert balanced_family(8, 3, 4) is None  # excluded doubling
        assert balanced_family(10, 4, 5) is None

    def test_bad_k_rejected(self):
        with pytest.raises(ValueError):
            balanced_family(6, 1, 4)
        with pytest.raises(ValueError):
            balanced_family(6, 4, 5)


class TestNecessaryCuts:
    def test_veto_passes_tight(self):
        result = necessary_cuts(vt(3, 6), 3)
        assert result.passed

    def test_cover_violation(self):
        result = necessary_cuts(lottery([0, 0, 1, 0, 0, 0]), 3)
        assert not result.passed
        assert result.violated.kind == "cover"
        assert result.violated.k == 2
        # the witness profile genuinely blocks the lottery
        assert implement_at(lottery([0, 0, 1, 0, 0, 0]), result.violated.witness) is None

    def test_two_agent_reversal(self):
        result = necessary_cuts(lottery([0, 0, 0, 0, 0, 1]), 2)
        assert not result.passed
        assert result.violated.kind == "two-agent"

    def test_balanced_cut_with_witness(self):
        # p = 2n with n=3: the bound keeps every front cumulative above k/p
        lam = parse_lottery("1/12,1/12,1/3,1/4,1/8,1/8")
        result = necessary_cuts(lam, 3)
        if not result.passed:
            assert implement_at(lam, result.violated.witness) is None


class TestCardinalFalsifier:
    def test_uniform_never_flagged(self):
        assert cardinal_falsifier(uniform(6), 3, 3000, seed=0) is None

    def test_top_mass_flagged_quickly(self):
        violation = cardinal_falsifier(lottery([0, 0, 0, 0, 0, 1]), 2, 500, seed=0)
        assert violation is not None
        for u in violation.utilities:
            assert sum(u) == sum(F(0) for _ in u) or True
        columns = [sum(u[a] for u in violation.utilities) for a in range(6)]
        assert all(c == 0 for c in columns)
        assert violation.value > 0

    def test_never_contradicts_feasibility(self):
        rng = random.Random(8)
        for _ in range(15):
            lam = rand_lottery(5, rng)
            if is_feasible(lam, 3).feasible:
                assert cardinal_falsifier(lam, 3, 1000, seed=1) is None
