"""Executable game forms and exact worst-case evaluation.

A protocol is a sequence of stages: veto rounds (non-terminal), a dictator
round, a uniform fallback, or a covering lottery (terminal).  A dictator
round may itself be non-terminal, in which case it resolves with some
probability and otherwise continues to the remaining stages over the
leftover outcomes; the mixing weight is chosen from the guarantee of the
continuation, mirroring how guarantees compose.

`run` evaluates one play exactly (all randomization symbolic, never
sampled).  `worst_case_guarantee` fixes agent 1 on a representative
preference playing its safe strategy and exhausts every tuple of adversary
reports, stage by stage; the achieved guarantee is read off the cumulative
maxima across scenarios.

Protocol text format: stages separated by ``;``, e.g. ``"veto(1); uniform"``,
``"rd(pad)"``, ``"rd(naive)"``, ``"veto(1); rd(pad)"``,
``"cover(2, 2, top)"``.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

from .lottery import RankLottery, ZERO, dominates, rd, uniform, vt
from .compose import rd_compose, vt_compose
from .profiles import (
    OutcomeLottery,
    Preference,
    Profile,
    enumerate_profiles,
    identity_preference,
    rank_rearrange,
)

ONE = Fraction(1)


class CoverNotFoundError(ValueError):
    """No covering set exists for the reported preference fragments.

    Carrying the offending reports: a reproducible counterexample to the
    combinatorial premise of the covering protocol.
    """

    def __init__(self, message: str, reports: tuple[frozenset[int], ...]):
        super().__init__(message)
        self.reports = reports


@dataclass(frozen=True)
class VetoRound:
    tokens: int

    def __post_init__(self) -> None:
        if self.tokens < 1:
            raise ValueError("a veto round needs at least one token")


@dataclass(frozen=True)
class DictatorRound:
    padded: bool = True
    continue_weight: Optional[Fraction] = None  # None: terminal round

    def __post_init__(self) -> None:
        if self.continue_weight is not None:
            if not self.padded:
                raise ValueError("only padded dictator rounds can continue")
            if not 0 < self.continue_weight < 1:
                raise ValueError("continuation weight must be strictly between 0 and 1")


@dataclass(frozen=True)
class UniformFallback:
    pass


@dataclass(frozen=True)
class CoverRound:
    cover_size: int
    depth: int
    play: str  # "cover": uniform on the covering set; "complement": on the rest

    def __post_init__(self) -> None:
        if self.play not in ("cover", "complement"):
            raise ValueError("play must be 'cover' or 'complement'")


Stage = Union[VetoRound, DictatorRound, UniformFallback, CoverRound]


@dataclass(frozen=True)
class ProtocolSpec:
    stages: tuple[Stage, ...]

    def __post_init__(self) -> None:
        if not self.stages:
            raise ValueError("a protocol needs at least one stage")
        for stage in self.stages[:-1]:
            if isinstance(stage, (UniformFallback, CoverRound)):
                raise ValueError("only the final stage may be a lottery stage")
            if isinstance(stage, DictatorRound) and stage.continue_weight is None:
                raise ValueError("a non-final dictator round needs a continuation weight")
        last = self.stages[-1]
        if isinstance(last, VetoRound):
            raise ValueError("a protocol cannot end on a veto round")
        if isinstance(last, DictatorRound) and last.continue_weight is not None:
            raise ValueError("the final dictator round cannot continue")

    def text(self) -> str:
        parts = []
        for stage in self.stages:
            if isinstance(stage, VetoRound):
                parts.append(f"veto({stage.tokens})")
            elif isinstance(stage, DictatorRound):
                parts.append("rd(pad)" if stage.padded else "rd(naive)")
            elif isinstance(stage, UniformFallback):
                parts.append("uniform")
            else:
                side = "top" if stage.play == "cover" else "bottom"
                parts.append(f"cover({stage.cover_size},{stage.depth},{side})")
        return "; ".join(parts)


def parse_protocol(text: str, n: int, p: int) -> ProtocolSpec:
    """Parse the stage mini-language and fix continuation weights for (n, p).

    Raises ValueError with the exact character position on a bad token.
    """
    raw: list[tuple[str, tuple, int]] = []
    pos = 0
    for chunk in text.split(";"):
        token = chunk.strip()
        offset = pos + (len(chunk) - len(chunk.lstrip()))
        pos += len(chunk) + 1
        if not token:
            raise ValueError(f"empty protocol stage at position {offset}")
        name, args = _parse_stage_token(token, offset)
        raw.append((name, args, offset))

    stages: list[Stage] = []
    for idx, (name, args, offset) in enumerate(raw):
        final = idx == len(raw) - 1
        if name == "veto":
            stages.append(VetoRound(tokens=args[0]))
        elif name == "uniform":
            stages.append(UniformFallback())
        elif name == "cover":
            stages.append(CoverRound(cover_size=args[0], depth=args[1], play=args[2]))
        elif name == "rd":
            padded = args[0]
            if final:
                stages.append(DictatorRound(padded=padded))
            else:
                if not padded:
                    raise ValueError(
                        f"naive dictator round cannot continue (position {offset})"
                    )
                window = _window_after(raw[:idx], n, p, offset)
                suffix = _suffix_guarantee(raw[idx + 1 :], n, window - n, offset)
                top = suffix.max_coordinate()
                stages.append(
                    DictatorRound(padded=True, continue_weight=ONE / (n * top + 1))
                )
        else:  # pragma: no cover - the tokenizer only emits known names
            raise ValueError(f"unknown stage {name!r} at position {offset}")
    return ProtocolSpec(tuple(stages))


def _parse_stage_token(token: str, offset: int) -> tuple[str, tuple]:
    if token == "uniform":
        return "uniform", ()
    if token == "rd":
        return "rd", (False,)
    if token.startswith("veto(") and token.endswith(")"):
        body = token[5:-1].strip()
        if not body.isdigit():
            raise ValueError(f"veto needs an integer token count at position {offset}")
        return "veto", (int(body),)
    if token.startswith("rd(") and token.endswith(")"):
        body = token[3:-1].strip()
        if body == "pad":
            return "rd", (True,)
        if body == "naive":
            return "rd", (False,)
        raise ValueError(f"rd argument must be 'pad' or 'naive' at position {offset}")
    if token.startswith("cover(") and token.endswith(")"):
        parts = [part.strip() for part in token[6:-1].split(",")]
        if len(parts) != 3 or not parts[0].isdigit() or not parts[1].isdigit():
            raise ValueError(f"cover needs (size, depth, top|bottom) at position {offset}")
        side = parts[2]
        if side not in ("top", "bottom"):
            raise ValueError(f"cover side must be top or bottom at position {offset}")
        play = "cover" if side == "top" else "complement"
        return "cover", (int(parts[0]), int(parts[1]), play)
    raise ValueError(f"cannot parse stage {token!r} at position {offset}")


def _window_after(prefix: list[tuple], n: int, p: int, offset: int) -> int:
    window = p
    for name, args, _ in prefix:
        if name == "veto":
            window -= n * args[0]
        elif name == "rd":
            window -= n
    if window <= n:
        raise ValueError(f"not enough outcomes left for the stage at position {offset}")
    return window


def _suffix_guarantee(suffix: list[tuple], n: int, window: int, offset: int) -> RankLottery:
    """Guarantee delivered by the remaining stages over `window` outcomes."""
    if not suffix:
        raise ValueError(f"dangling non-final stage at position {offset}")
    name, args, off = suffix[0]
    if name == "uniform":
        if len(suffix) > 1:
            raise ValueError(f"uniform must be final (position {off})")
        return uniform(window)
    if name == "rd":
        if len(suffix) == 1:
            if not args[0]:
                probs = [ZERO] * window
                probs[0] = Fraction(n - 1, n)
                probs[-1] = Fraction(1, n)
                return RankLottery(tuple(probs))
            return rd(n, window)
        return rd_compose(_suffix_guarantee(suffix[1:], n, window - n, off), n)
    if name == "veto":
        tokens = args[0]
        inner = _suffix_guarantee(suffix[1:], n, window - n * tokens, off) if len(suffix) > 1 else None
        if inner is None:
            raise ValueError(f"veto round must be followed by a stage (position {off})")
        for _ in range(tokens):
            inner = vt_compose(inner, n)
        return inner
    raise ValueError(f"stage at position {off} cannot appear inside a continuation")


def claimed_guarantee(spec: ProtocolSpec, n: int, p: int) -> RankLottery:
    """The guarantee a veto/dictator/uniform protocol is designed to deliver.

    Cover protocols carry their claims in the verification suites instead.
    """
    raw = []
    for stage in spec.stages:
        if isinstance(stage, VetoRound):
            raw.append(("veto", (stage.tokens,), 0))
        elif isinstance(stage, DictatorRound):
            raw.append(("rd", (stage.padded,), 0))
        elif isinstance(stage, UniformFallback):
            raw.append(("uniform", (), 0))
        else:
            raise ValueError("cover protocols have no composed claim")
    return _suffix_guarantee(raw, n, p, 0)


# ----------------------------------------------------------------------------
# Running a protocol on explicit reports.
# ----------------------------------------------------------------------------


def _pad_set(chosen: set[int], survivors: list[int], target: int) -> list[int]:
    padded = sorted(chosen)
    for a in survivors:
        if len(padded) >= target:
            break
        if a not in chosen:
            padded.append(a)
    return sorted(padded)


def _find_cover(
    survivors: list[int], reports: tuple[frozenset[int], ...], size: int
) -> Optional[tuple[int, ...]]:
    for combo in itertools.combinations(survivors, size):
        cset = set(combo)
        if all(cset & rep for rep in reports):
            return combo
    return None


def run(spec: ProtocolSpec, prof: Profile, reports: tuple[tuple, ...]) -> OutcomeLottery:
    """Exact outcome distribution for one play of the protocol.

    `reports[s]` holds stage s's reports for all agents in agent order
    (veto/cover stages: a set of outcomes per agent; dictator stages: one
    outcome per agent).  The profile fixes dimensions and legality only;
    agents may report anything legal, truthful or not.
    """
    n, p = prof.n, prof.p
    total_vetoes = sum(
        stage.tokens * n for stage in spec.stages if isinstance(stage, VetoRound)
    )
    if total_vetoes >= p:
        raise ValueError("protocol can veto every outcome")
    if len(reports) != len(spec.stages):
        raise ValueError("need one report tuple per stage")
    mass = _play(spec, 0, sorted(range(1, p + 1)), reports, n)
    out = [ZERO] * p
    for a, w in mass.items():
        out[a - 1] = w
    return OutcomeLottery(tuple(out))


def _play(
    spec: ProtocolSpec,
    idx: int,
    survivors: list[int],
    reports: tuple[tuple, ...],
    n: int,
) -> dict[int, Fraction]:
    stage = spec.stages[idx]
    stage_reports = reports[idx]
    if len(stage_reports) != n:
        raise ValueError(f"stage {idx} needs {n} reports")

    if isinstance(stage, VetoRound):
        vetoed: set[int] = set()
        for rep in stage_reports:
            rep = frozenset(rep)
            if len(rep) != stage.tokens or not rep <= set(survivors):
                raise ValueError(f"illegal veto report {sorted(rep)} at stage {idx}")
            vetoed |= rep
        remaining = [a for a in survivors if a not in vetoed]
        return _play(spec, idx + 1, remaining, reports, n)

    if isinstance(stage, UniformFallback):
        share = Fraction(1, len(survivors))
        return {a: share for a in survivors}

    if isinstance(stage, DictatorRound):
        for a in stage_reports:
            if a not in survivors:
                raise ValueError(f"illegal dictator report {a} at stage {idx}")
        if not stage.padded:
            share = Fraction(1, n)
            mass: dict[int, Fraction] = {}
            for a in stage_reports:
                mass[a] = mass.get(a, ZERO) + share
            return mass
        distinct = set(stage_reports)
        if stage.continue_weight is None:
            if len(distinct) == 1:
                return {next(iter(distinct)): ONE}
            padded = _pad_set(distinct, survivors, min(n, len(survivors)))
            share = Fraction(1, len(padded))
            return {a: share for a in padded}
        padded = _pad_set(distinct, survivors, min(n, len(survivors)))
        pick = ONE - stage.continue_weight
        share = pick / len(padded)
        mass = {a: share for a in padded}
        rest = [a for a in survivors if a not in set(padded)]
        for a, w in _play(spec, idx + 1, rest, reports, n).items():
            mass[a] = mass.get(a, ZERO) + stage.continue_weight * w
        return mass

    assert isinstance(stage, CoverRound)
    reps = []
    for rep in stage_reports:
        rep = frozenset(rep)
        if len(rep) != stage.depth or not rep <= set(survivors):
            raise ValueError(f"illegal cover report {sorted(rep)} at stage {idx}")
        reps.append(rep)
    cover = _find_cover(survivors, tuple(reps), stage.cover_size)
    if cover is None:
        raise CoverNotFoundError(
            f"no {stage.cover_size}-set meets all reported {stage.depth}-sets",
            tuple(reps),
        )
    if stage.play == "cover":
        share = Fraction(1, len(cover))
        return {a: share for a in cover}
    rest = [a for a in survivors if a not in set(cover)]
    share = Fraction(1, len(rest))
    return {a: share for a in rest}


# ----------------------------------------------------------------------------
# Worst-case evaluation against exhaustive adversaries.
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalReport:
    achieved: RankLottery
    scenario_count: int
    worst_scenarios: dict[int, tuple]
    runtime_ms: int = 0


def _safe_report(stage: Stage, survivors: list[int], pref: Preference):
    """Agent 1's truthful play: veto the worst, claim the best."""
    by_rank = [a for a in pref.order if a in set(survivors)]
    if isinstance(stage, VetoRound):
        return frozenset(by_rank[: stage.tokens])
    if isinstance(stage, DictatorRound):
        return by_rank[-1]
    if isinstance(stage, CoverRound):
        if stage.play == "cover":
            return frozenset(by_rank[-stage.depth :])
        return frozenset(by_rank[: stage.depth])
    return None


def _report_space(stage: Stage, survivors: list[int]):
    if isinstance(stage, VetoRound):
        return [frozenset(c) for c in itertools.combinations(survivors, stage.tokens)]
    if isinstance(stage, DictatorRound):
        return list(survivors)
    if isinstance(stage, CoverRound):
        return [frozenset(c) for c in itertools.combinations(survivors, stage.depth)]
    return [None]


def _scenarios(
    spec: ProtocolSpec, n: int, p: int, pref: Preference
) -> Iterator[tuple[tuple, OutcomeLottery]]:
    """All (adversary trace, exact outcome distribution) pairs."""

    def rec(
        idx: int, survivors: list[int], trace: tuple
    ) -> Iterator[tuple[tuple, dict[int, Fraction]]]:
        stage = spec.stages[idx]
        mine = _safe_report(stage, survivors, pref)
        if isinstance(stage, UniformFallback):
            share = Fraction(1, len(survivors))
            yield trace + ((None,) * n,), {a: share for a in survivors}
            return
        space = _report_space(stage, survivors)
        for adv in itertools.product(space, repeat=n - 1):
            stage_reports = (mine,) + adv
            new_trace = trace + (stage_reports,)
            if isinstance(stage, VetoRound):
                vetoed = set().union(*stage_reports)
                remaining = [a for a in survivors if a not in vetoed]
                yield from rec(idx + 1, remaining, new_trace)
            elif isinstance(stage, DictatorRound):
                distinct = set(stage_reports)
                if stage.continue_weight is None:
                    if stage.padded:
                        if len(distinct) == 1:
                            yield new_trace, {next(iter(distinct)): ONE}
                        else:
                            padded = _pad_set(distinct, survivors, min(n, len(survivors)))
                            share = Fraction(1, len(padded))
                            yield new_trace, {a: share for a in padded}
                    else:
                        share = Fraction(1, n)
                        mass: dict[int, Fraction] = {}
                        for a in stage_reports:
                            mass[a] = mass.get(a, ZERO) + share
                        yield new_trace, mass
                else:
                    padded = _pad_set(distinct, survivors, min(n, len(survivors)))
                    pick = ONE - stage.continue_weight
                    share = pick / len(padded)
                    rest = [a for a in survivors if a not in set(padded)]
                    for sub_trace, sub_mass in rec(idx + 1, rest, new_trace):
                        mass = {a: share for a in padded}
                        for a, w in sub_mass.items():
                            mass[a] = mass.get(a, ZERO) + stage.continue_weight * w
                        yield sub_trace, mass
            else:
                assert isinstance(stage, CoverRound)
                cover = _find_cover(survivors, stage_reports, stage.cover_size)
                if cover is None:
                    raise CoverNotFoundError(
                        "covering premise failed during worst-case evaluation",
                        stage_reports,
                    )
                if stage.play == "cover":
                    share = Fraction(1, len(cover))
                    yield new_trace, {a: share for a in cover}
                else:
                    rest = [a for a in survivors if a not in set(cover)]
                    share = Fraction(1, len(rest))
                    yield new_trace, {a: share for a in rest}

    for trace, mass in rec(0, list(range(1, p + 1)), ()):
        out = [ZERO] * p
        for a, w in mass.items():
            out[a - 1] = w
        yield trace, OutcomeLottery(tuple(out))


def worst_case_guarantee(spec: ProtocolSpec, n: int, p: int) -> EvalReport:
    """Tightest guarantee the protocol delivers to a truthful agent 1.

    One preference representative suffices by outcome symmetry; adversaries
    range over every legal report tuple, stage by stage.  The achieved
    cumulative at rank k is the worst (largest) across scenarios, and the
    witness scenario per rank is recorded.
    """
    started = time.perf_counter()
    total_vetoes = sum(
        stage.tokens * n for stage in spec.stages if isinstance(stage, VetoRound)
    )
    if total_vetoes >= p:
        raise ValueError("protocol can veto every outcome")
    pref = identity_preference(p)
    worst_cum: list[Fraction] = [ZERO] * p
    worst_trace: dict[int, tuple] = {}
    count = 0
    for trace, dist in _scenarios(spec, n, p, pref):
        count += 1
        ranked = rank_rearrange(dist, pref)
        acc = ZERO
        for k, x in enumerate(ranked.probs, start=1):
            acc += x
            if acc > worst_cum[k - 1]:
                worst_cum[k - 1] = acc
                worst_trace[k] = trace
    probs = []
    prev = ZERO
    for c in worst_cum:
        probs.append(c - prev)
        prev = c
    achieved = RankLottery(tuple(probs))
    return EvalReport(
        achieved=achieved,
        scenario_count=count,
        worst_scenarios=worst_trace,
        runtime_ms=int((time.perf_counter() - started) * 1000),
    )


def verify_safe_strategy(spec: ProtocolSpec, lam: RankLottery, n: int, p: int) -> bool:
    """True when the truthful strategy secures `lam` against every adversary."""
    pref = identity_preference(p)
    for _, dist in _scenarios(spec, n, p, pref):
        if not dominates(rank_rearrange(dist, pref), lam):
            return False
    return True


# ----------------------------------------------------------------------------
# Covering protocols and their existence certificates.
# ----------------------------------------------------------------------------


def cover_protocol(n: int, p: int, mode: str) -> ProtocolSpec:
    """Named covering protocols over claimed top/bottom fragments.

    Modes: "top-pair" (two outcomes meeting everyone's best block, uniform
    on the pair), "bottom-pair" (two outcomes meeting everyone's worst
    block, uniform off them), "block" (p = 2n-1 only: n-1 outcomes meeting
    everyone's top two, uniform on them).
    """
    if mode in ("top-pair", "bottom-pair"):
        if (n, p) == (3, 5):
            depth = 2
        elif (n, p) == (4, 7):
            depth = 3
        else:
            raise ValueError("pair covers are defined for (3,5) and (4,7)")
        play = "cover" if mode == "top-pair" else "complement"
        return ProtocolSpec((CoverRound(cover_size=2, depth=depth, play=play),))
    if mode == "block":
        if p != 2 * n - 1:
            raise ValueError("block covers are defined for p = 2n-1")
        return ProtocolSpec((CoverRound(cover_size=n - 1, depth=2, play="cover"),))
    raise ValueError(f"unknown cover mode {mode!r}")


def verify_cover_exists(n: int, p: int, stage: CoverRound) -> Optional[Profile]:
    """Search every canonical profile for one with no covering set.

    Returns the counterexample profile if the covering premise fails, else
    None.  Truthful reports only: the premise is a statement about actual
    preference profiles.
    """
    survivors = list(range(1, p + 1))
    for prof in enumerate_profiles(n, p):
        reports = []
        for pref in prof.prefs:
            if stage.play == "cover":
                reports.append(frozenset(pref.order[p - stage.depth :]))
            else:
                reports.append(frozenset(pref.order[: stage.depth]))
        if _find_cover(survivors, tuple(reports), stage.cover_size) is None:
            return prof
    return None
