"""Strict preference profiles, rank rearrangement, and canonical forms.

Outcomes carry ids ``1..p``.  A preference lists outcome ids from WORST to
best, so ``order[0]`` is the agent's least liked outcome.  Profiles are
quotiented by the symmetry group (permuting agents, relabeling outcomes);
`canonicalize` picks a unique orbit representative and `enumerate_profiles`
streams one representative per orbit.

Only strict orders are modeled.  This loses no generality for guarantee
checking: refining a tie can only shrink the set of implementing lotteries
(every tail of a refinement is one of the tied order's tails, and the
implementation requirement takes the minimum over tails), so a guarantee
implementable at every strict profile is implementable at profiles with
indifferences as well.

Profile text format: one agent per ``/``-separated block, outcome ids
worst to best, e.g. ``"1 2 3 / 2 3 1 / 3 1 2"``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .lottery import RankLottery, RationalLike, ZERO, as_fraction


@dataclass(frozen=True)
class Preference:
    """A strict order over outcomes 1..p, listed worst to best."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        p = len(self.order)
        if p < 1 or sorted(self.order) != list(range(1, p + 1)):
            raise ValueError(f"not a permutation of 1..{p}: {self.order}")

    @property
    def p(self) -> int:
        return len(self.order)

    def rank_of(self, outcome: int) -> int:
        """Rank of an outcome under this preference (1 = worst)."""
        return self.order.index(outcome) + 1

    def k_tail(self, k: int) -> frozenset[int]:
        """The agent's k worst outcomes."""
        if not 1 <= k <= self.p:
            raise ValueError(f"k={k} out of range 1..{self.p}")
        return frozenset(self.order[:k])

    def top(self, k: int = 1) -> frozenset[int]:
        """The agent's k best outcomes."""
        if not 1 <= k <= self.p:
            raise ValueError(f"k={k} out of range 1..{self.p}")
        return frozenset(self.order[self.p - k :])

    def reversed(self) -> "Preference":
        return Preference(tuple(reversed(self.order)))


def k_tail(pref: Preference, k: int) -> frozenset[int]:
    """The k worst outcomes of a preference."""
    return pref.k_tail(k)


@dataclass(frozen=True)
class OutcomeLottery:
    """Exact probability vector over outcome ids 1..p."""

    mass: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if any(not isinstance(x, Fraction) for x in self.mass):
            object.__setattr__(self, "mass", tuple(as_fraction(x) for x in self.mass))
        if any(x < 0 for x in self.mass):
            raise ValueError("negative mass")
        if sum(self.mass) != 1:
            raise ValueError("mass must sum to exactly 1")

    @property
    def p(self) -> int:
        return len(self.mass)

    def of(self, outcome: int) -> Fraction:
        return self.mass[outcome - 1]

    def on_set(self, outcomes: Iterable[int]) -> Fraction:
        return sum((self.mass[a - 1] for a in outcomes), ZERO)

    def text(self) -> str:
        return ",".join(str(x) for x in self.mass)


def outcome_lottery(values: Iterable[RationalLike]) -> OutcomeLottery:
    return OutcomeLottery(tuple(as_fraction(v) for v in values))


def uniform_outcomes(p: int) -> OutcomeLottery:
    return OutcomeLottery((Fraction(1, p),) * p)


@dataclass(frozen=True)
class Profile:
    """An n-tuple of strict preferences over the same p outcomes."""

    prefs: tuple[Preference, ...]
    canonical: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if not self.prefs:
            raise ValueError("empty profile")
        p = self.prefs[0].p
        if any(pref.p != p for pref in self.prefs):
            raise ValueError("preferences over different outcome sets")

    @property
    def n(self) -> int:
        return len(self.prefs)

    @property
    def p(self) -> int:
        return self.prefs[0].p

    def text(self) -> str:
        return format_profile(self)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.text()


def profile(orders: Sequence[Sequence[int]]) -> Profile:
    return Profile(tuple(Preference(tuple(order)) for order in orders))


def parse_profile(text: str) -> Profile:
    blocks = [block.strip() for block in text.strip().split("/")]
    if not blocks or blocks == [""]:
        raise ValueError("empty profile text")
    return profile([[int(tok) for tok in block.split()] for block in blocks])


def format_profile(prof: Profile) -> str:
    return " / ".join(" ".join(str(a) for a in pref.order) for pref in prof.prefs)


def rank_rearrange(ell: OutcomeLottery, pref: Preference) -> RankLottery:
    """Rearrange an outcome lottery into the agent's rank order (worst first)."""
    if ell.p != pref.p:
        raise ValueError("dimension mismatch")
    return RankLottery(tuple(ell.mass[a - 1] for a in pref.order))


# ----------------------------------------------------------------------------
# Canonical forms under agent permutations x outcome relabelings.
# ----------------------------------------------------------------------------


def _canonical_orders(orders: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    """Orbit representative of a tuple of raw orders.

    For each pivot agent, relabel outcomes so the pivot's order becomes the
    identity, sort all relabeled orders lexicographically (the identity is
    the global lexicographic minimum, so it leads), and keep the smallest
    resulting tuple across pivots.
    """
    p = len(orders[0])
    best: tuple[tuple[int, ...], ...] | None = None
    for pivot in orders:
        relabel = [0] * (p + 1)
        for new_id, outcome in enumerate(pivot, start=1):
            relabel[outcome] = new_id
        candidate = tuple(sorted(tuple(relabel[a] for a in order) for order in orders))
        if best is None or candidate < best:
            best = candidate
    assert best is not None
    return best


def canonicalize(prof: Profile) -> Profile:
    """Unique representative of the profile's symmetry orbit.

    Two profiles related by permuting agents and/or relabeling outcomes map
    to the same canonical profile.
    """
    orders = tuple(pref.order for pref in prof.prefs)
    best = _canonical_orders(orders)
    return Profile(tuple(Preference(o) for o in best), canonical=True)


def relabel_outcomes(prof: Profile, mapping: Sequence[int]) -> Profile:
    """Apply an outcome relabeling; mapping[a-1] is the new id of outcome a."""
    if sorted(mapping) != list(range(1, prof.p + 1)):
        raise ValueError("mapping is not a permutation")
    return Profile(
        tuple(Preference(tuple(mapping[a - 1] for a in pref.order)) for pref in prof.prefs)
    )


def permute_agents(prof: Profile, perm: Sequence[int]) -> Profile:
    """Reorder the agents; perm[i] is the 0-based old index placed at slot i."""
    if sorted(perm) != list(range(prof.n)):
        raise ValueError("perm is not a permutation of agent slots")
    return Profile(tuple(prof.prefs[i] for i in perm))


def enumerate_profiles(
    n: int, p: int, *, start: int = 0, stop: int | None = None
) -> Iterator[Profile]:
    """Stream every canonical (n, p)-profile exactly once.

    Candidates fix agent 1 to the identity order and take the remaining
    agents as a lexicographically sorted multiset; a candidate is emitted
    only when it equals its own canonical form.  The stream is deterministic,
    so it can be restarted or partitioned by slicing the candidate index
    range with `start`/`stop`.
    """
    if n < 1 or p < 2:
        raise ValueError("need n >= 1 and p >= 2")
    perms = sorted(itertools.permutations(range(1, p + 1)))
    identity = perms[0]
    combos = itertools.combinations_with_replacement(perms, n - 1)
    for combo in itertools.islice(combos, start, stop):
        orders = (identity,) + combo
        if _canonical_orders(orders) == orders:
            yield Profile(tuple(Preference(o) for o in orders), canonical=True)


PROFILE_CACHE_VERSION = 1


def profile_cache_path(directory, n: int, p: int):
    """Cache file location keyed by (n, p, format version)."""
    from pathlib import Path

    return Path(directory) / f"profiles-n{n}-p{p}-v{PROFILE_CACHE_VERSION}.txt"


def save_profile_cache(directory, n: int, p: int) -> int:
    """Materialize the canonical profile stream to a text cache file.

    Returns the number of profiles written.  One profile per line in the
    standard text format.
    """
    path = profile_cache_path(directory, n, p)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w") as handle:
        for prof in enumerate_profiles(n, p):
            handle.write(format_profile(prof) + "\n")
            count += 1
    return count


def load_profile_cache(directory, n: int, p: int) -> Optional[list[Profile]]:
    """Read a previously saved canonical profile list, or None if absent."""
    path = profile_cache_path(directory, n, p)
    if not path.exists():
        return None
    out = []
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if line:
                prof = parse_profile(line)
                out.append(Profile(prof.prefs, canonical=True))
    return out


def cyclic_pad_profile(inner: Profile) -> Profile:
    """Grow an (n, p)-profile to (n, p+n) by cyclic padding at the extremes.

    Each agent i gets a dedicated new outcome at their worst rank, the inner
    profile in ranks 2..p+1, and the other new outcomes cyclically at the
    top n-1 ranks.  New outcomes receive ids p+1..p+n.
    """
    n, p = inner.n, inner.p
    extras = [p + 1 + i for i in range(n)]
    prefs = []
    for i, pref in enumerate(inner.prefs):
        tops = tuple(extras[(i + j) % n] for j in range(1, n))
        prefs.append(Preference((extras[i],) + pref.order + tops))
    return Profile(tuple(prefs))


def cyclic_top_pad_profile(inner: Profile) -> Profile:
    """Grow an (n, p)-profile to (n, p+n) with the mirrored padding.

    Agent i places new outcomes cyclically at the worst n-1 ranks, the inner
    profile in the middle, and one dedicated new outcome at the top.
    """
    n, p = inner.n, inner.p
    extras = [p + 1 + i for i in range(n)]
    prefs = []
    for i, pref in enumerate(inner.prefs):
        bottoms = tuple(extras[(i + j) % n] for j in range(n - 1))
        top = extras[(i + n - 1) % n]
        prefs.append(Preference(bottoms + pref.order + (top,)))
    return Profile(tuple(prefs))


# ----------------------------------------------------------------------------
# Structured base profiles used as seeds in searches.
# ----------------------------------------------------------------------------


def identity_preference(p: int) -> Preference:
    return Preference(tuple(range(1, p + 1)))


def identical_profile(n: int, p: int) -> Profile:
    """All agents share the identity order."""
    pref = identity_preference(p)
    return Profile((pref,) * n)


def reversal_profile(n: int, p: int) -> Profile:
    """Agent 2 holds the exact reverse of agent 1; others follow agent 1."""
    if n < 2:
        raise ValueError("need at least two agents")
    pref = identity_preference(p)
    rev = pref.reversed()
    return Profile((pref, rev) + (pref,) * (n - 2))


def cyclic_profile(n: int, p: int) -> Profile:
    """Agent i's order is the identity rotated by i positions."""
    base = list(range(1, p + 1))
    prefs = []
    for i in range(n):
        rot = base[i % p :] + base[: i % p]
        prefs.append(Preference(tuple(rot)))
    return Profile(tuple(prefs))
