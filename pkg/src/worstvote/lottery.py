"""Exact algebra of lotteries over preference ranks.

A rank lottery is a probability vector over the ranks ``1..p`` of a strict
preference order, where rank 1 is the WORST rank and rank ``p`` the best.
Every quantity is an exact rational (`fractions.Fraction`); no operation in
this module introduces rounding of any kind.

The text format for a lottery is a comma-separated list of rationals in
rank order, e.g. ``"0,1/3,1/3,1/3,0,0"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ints, strings like ``"1/3"``, and Fractions to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


@dataclass(frozen=True)
class RankLottery:
    """Immutable exact probability vector over ranks 1..p (rank 1 = worst)."""

    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.probs) < 1:
            raise ValueError("a rank lottery needs at least one rank")
        if any(not isinstance(x, Fraction) for x in self.probs):
            object.__setattr__(self, "probs", tuple(as_fraction(x) for x in self.probs))
        if any(x < 0 for x in self.probs):
            raise ValueError(f"negative probability in {self.probs}")
        if sum(self.probs) != 1:
            raise ValueError(f"probabilities sum to {sum(self.probs)}, not 1")

    @property
    def p(self) -> int:
        return len(self.probs)

    def prob(self, rank: int) -> Fraction:
        """Probability of `rank` (1-based, 1 = worst)."""
        if not 1 <= rank <= self.p:
            raise ValueError(f"rank {rank} out of range 1..{self.p}")
        return self.probs[rank - 1]

    def cumulative(self) -> tuple[Fraction, ...]:
        """Prefix sums over ranks: entry k is the mass on ranks 1..k+1."""
        out = []
        acc = ZERO
        for x in self.probs:
            acc += x
            out.append(acc)
        return tuple(out)

    def partial_sum(self, k1: int, k2: int) -> Fraction:
        """Exact mass on ranks k1..k2 inclusive."""
        if not 1 <= k1 <= k2 <= self.p:
            raise ValueError(f"rank range {k1}..{k2} invalid for p={self.p}")
        return sum(self.probs[k1 - 1 : k2], ZERO)

    def reflect(self) -> "RankLottery":
        """Mirror the lottery around the middle rank (best and worst swap)."""
        return RankLottery(tuple(reversed(self.probs)))

    def max_coordinate(self) -> Fraction:
        return max(self.probs)

    def min_coordinate(self) -> Fraction:
        return min(self.probs)

    def is_boundary(self) -> bool:
        """True when some rank has probability exactly zero."""
        return any(x == 0 for x in self.probs)

    def support(self) -> frozenset[int]:
        """Ranks carrying positive mass."""
        return frozenset(k + 1 for k, x in enumerate(self.probs) if x > 0)

    def text(self) -> str:
        return format_lottery(self)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.text()


def lottery(values: Iterable[RationalLike]) -> RankLottery:
    """Build a RankLottery, coercing entries to exact rationals."""
    return RankLottery(tuple(as_fraction(v) for v in values))


def parse_lottery(text: str) -> RankLottery:
    """Parse the comma-separated rational format, e.g. ``"0,1/3,1/3,1/3,0,0"``."""
    parts = [part.strip() for part in text.strip().split(",")]
    if not parts or parts == [""]:
        raise ValueError("empty lottery text")
    return lottery(parts)


def format_lottery(lam: RankLottery) -> str:
    """Emit the comma-separated rational format (bit-exact round trip)."""
    return ",".join(str(x) for x in lam.probs)


def uniform(p: int) -> RankLottery:
    """The uniform lottery over p ranks."""
    if p < 1:
        raise ValueError("p must be positive")
    share = Fraction(1, p)
    return RankLottery((share,) * p)


def vt(n: int, p: int) -> RankLottery:
    """One-round-of-vetoes guarantee: zero on the worst rank, uniform on the
    next p-n ranks, zero on the top n-1 ranks."""
    if not 1 <= n < p:
        raise ValueError(f"vt requires 1 <= n < p, got n={n}, p={p}")
    share = Fraction(1, p - n)
    return RankLottery((ZERO,) + (share,) * (p - n) + (ZERO,) * (n - 1))


def rd(n: int, p: int) -> RankLottery:
    """Random-dictator guarantee: 1/n on each of the worst n-1 ranks and on
    the best rank, zero in between."""
    if not 1 <= n < p:
        raise ValueError(f"rd requires 1 <= n < p, got n={n}, p={p}")
    share = Fraction(1, n)
    return RankLottery((share,) * (n - 1) + (ZERO,) * (p - n) + (share,))


def dominates(lam: RankLottery, mu: RankLottery) -> bool:
    """Stochastic dominance: every lower cumulative of `lam` is <= that of `mu`.

    Intuitively `lam` shifts mass to better ranks than `mu` does.
    """
    if lam.p != mu.p:
        raise ValueError(f"dimension mismatch: {lam.p} vs {mu.p}")
    acc_l = ZERO
    acc_m = ZERO
    for xl, xm in zip(lam.probs, mu.probs):
        acc_l += xl
        acc_m += xm
        if acc_l > acc_m:
            return False
    return True


def is_symmetric(lam: RankLottery) -> bool:
    """True when the lottery equals its own reflection."""
    return lam.probs == tuple(reversed(lam.probs))


def m2_vertices(p: int) -> list[RankLottery]:
    """Extreme symmetric lotteries: 1/2 on ranks t and p+1-t for each
    t <= p/2, plus the point mass on the middle rank when p is odd."""
    if p < 2:
        raise ValueError("p must be at least 2")
    half = Fraction(1, 2)
    out = []
    for t in range(1, p // 2 + 1):
        probs = [ZERO] * p
        probs[t - 1] = half
        probs[p - t] = half
        out.append(RankLottery(tuple(probs)))
    if p % 2 == 1:
        probs = [ZERO] * p
        probs[(p + 1) // 2 - 1] = ONE
        out.append(RankLottery(tuple(probs)))
    return out


def feasible_n2(lam: RankLottery) -> bool:
    """Two-agent feasibility test: the bottom-k mass must weakly exceed the
    top-k mass for every k up to p/2."""
    p = lam.p
    if p < 2:
        raise ValueError("p must be at least 2")
    for k in range(1, p // 2 + 1):
        if lam.partial_sum(1, k) < lam.partial_sum(p + 1 - k, p):
            return False
    return True


def convex_combination(terms: Sequence[tuple[RationalLike, RankLottery]]) -> RankLottery:
    """Exact convex combination; weights must be nonnegative and sum to 1."""
    if not terms:
        raise ValueError("empty combination")
    weights = [as_fraction(w) for w, _ in terms]
    if any(w < 0 for w in weights):
        raise ValueError("negative weight")
    if sum(weights) != 1:
        raise ValueError("weights must sum to exactly 1")
    p = terms[0][1].p
    if any(lam.p != p for _, lam in terms):
        raise ValueError("mixed dimensions in combination")
    probs = [ZERO] * p
    for w, lam in zip(weights, (lam for _, lam in terms)):
        for i, x in enumerate(lam.probs):
            probs[i] += w * x
    return RankLottery(tuple(probs))


def sorted_dot(lam: RankLottery, utilities: Sequence[RationalLike]) -> Fraction:
    """Dot product of `lam` with the ascending rearrangement of `utilities`.

    This is the guaranteed expected utility of an agent whose utility vector
    is `utilities` under the rank guarantee `lam`.
    """
    if len(utilities) != lam.p:
        raise ValueError("dimension mismatch")
    ordered = sorted(as_fraction(u) for u in utilities)
    return sum((x * u for x, u in zip(lam.probs, ordered)), ZERO)
