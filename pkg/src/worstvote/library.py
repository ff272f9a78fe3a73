"""Structured profiles that make good counterexample candidates.

Infeasible guarantees and non-maximal candidates are almost always refuted
by a profile with strong combinatorial structure: everyone agreeing, two
agents exactly opposed, cyclic shifts, tails tiling the outcome set, or a
small core profile padded outward one composition round at a time.  This
module generates those families; searches consult them before falling back
to exhaustive enumeration.
"""

from __future__ import annotations

import itertools

from .profiles import (
    Preference,
    Profile,
    cyclic_pad_profile,
    cyclic_profile,
    cyclic_top_pad_profile,
    identical_profile,
    identity_preference,
    reversal_profile,
)


def tiling_profile(n: int, p: int, k: int) -> Profile | None:
    """A profile whose first ceil(p/k) agents have k-tails covering 1..p."""
    if not 1 <= k <= p - 1:
        return None
    m = -(-p // k)
    if m > n:
        return None
    prefs = []
    for i in range(m):
        lo = i * k
        if lo + k <= p:
            tail = list(range(lo + 1, lo + k + 1))
        else:
            tail = list(range(p - k + 1, p + 1))
        rest = [a for a in range(1, p + 1) if a not in set(tail)]
        prefs.append(Preference(tuple(tail + rest)))
    for _ in range(n - m):
        prefs.append(identity_preference(p))
    return Profile(tuple(prefs))


def tails_profile(n: int, p: int, tails: list[frozenset[int]]) -> Profile:
    """Agents 1..len(tails) get the given sets as their worst outcomes."""
    if len(tails) > n:
        raise ValueError("more tails than agents")
    prefs = []
    for tail in tails:
        ordered = sorted(tail)
        rest = [a for a in range(1, p + 1) if a not in tail]
        prefs.append(Preference(tuple(ordered + rest)))
    for _ in range(n - len(tails)):
        prefs.append(identity_preference(p))
    return Profile(tuple(prefs))


def tops_profile(n: int, p: int, tops: list[frozenset[int]]) -> Profile:
    """Agents 1..len(tops) get the given sets as their best outcomes."""
    if len(tops) > n:
        raise ValueError("more top sets than agents")
    prefs = []
    for top in tops:
        ordered = sorted(top)
        rest = [a for a in range(1, p + 1) if a not in top]
        prefs.append(Preference(tuple(rest + ordered)))
    for _ in range(n - len(tops)):
        prefs.append(identity_preference(p))
    return Profile(tuple(prefs))


def _base_profiles(n: int, p: int) -> list[Profile]:
    out = [identical_profile(n, p)]
    if p >= 2:
        out.append(cyclic_profile(n, p))
        if n >= 2:
            out.append(reversal_profile(n, p))
    return out


def padded_profiles(n: int, p: int) -> list[Profile]:
    """All ways of padding a small base profile out to p outcomes.

    Each padding round adds n outcomes either at the extremes favouring a
    veto round (dedicated worst outcome per agent) or favouring a dictator
    round (dedicated best outcome per agent); the bases are the structured
    profiles on p - h*n outcomes.
    """
    out: list[Profile] = []
    max_rounds = (p - 1) // n
    for rounds in range(0, max_rounds + 1):
        base_p = p - rounds * n
        if base_p < 1:
            continue
        if base_p == 1:
            bases = [Profile((Preference((1,)),) * n)]
        else:
            bases = _base_profiles(n, base_p)
        for pads in itertools.product((cyclic_pad_profile, cyclic_top_pad_profile), repeat=rounds):
            for base in bases:
                prof = base
                for pad in reversed(pads):
                    prof = pad(prof)
                if prof.p == p:
                    out.append(prof)
    return out


def hard_profiles(n: int, p: int) -> list[Profile]:
    """Deduplicated seed list for witness searches at (n, p)."""
    seen: set[tuple[tuple[int, ...], ...]] = set()
    out: list[Profile] = []
    candidates: list[Profile] = []
    candidates.extend(_base_profiles(n, p))
    candidates.extend(padded_profiles(n, p))
    for k in range(1, p):
        prof = tiling_profile(n, p, k)
        if prof is not None:
            candidates.append(prof)
    for prof in candidates:
        key = tuple(pref.order for pref in prof.prefs)
        if key not in seen:
            seen.add(key)
            out.append(prof)
    return out
