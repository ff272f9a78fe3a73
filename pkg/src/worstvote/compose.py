"""Composition operators that prepend a veto or dictator round to a guarantee.

``vt_compose`` wraps a guarantee on p ranks into p+n ranks by reserving the
worst rank (everyone can dodge one outcome) and the top n-1 ranks.
``rd_compose`` is its dual twin: it spreads mass on the worst n-1 ranks and
the best rank.  Iterating the two operators over a word in {VT, RD} yields
the canonical guarantees, which are uniform on their support and pair up
under duality by swapping the letters of the word.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .duality import dual
from .lottery import RankLottery, ZERO, rd, uniform, vt

VT = "VT"
RD = "RD"
_LETTERS = (VT, RD)


def vt_compose(lam: RankLottery, n: int) -> RankLottery:
    """Insert `lam` between one zero rank below and n-1 zero ranks above."""
    if n < 2:
        raise ValueError("composition needs n >= 2")
    return RankLottery((ZERO,) + lam.probs + (ZERO,) * (n - 1))


def rd_compose(lam: RankLottery, n: int) -> RankLottery:
    """Fill the worst n-1 ranks and the best rank, squeezing `lam` between.

    Boundary lotteries (some zero coordinate) use the direct filling rule;
    interior ones go through the duality identity, which agrees with the
    direct rule whenever both apply.
    """
    if n < 2:
        raise ValueError("composition needs n >= 2")
    if lam.is_boundary():
        top = lam.max_coordinate()
        denom = n * top + 1
        edge = top / denom
        middle = tuple(x / denom for x in lam.probs)
        return RankLottery((edge,) * (n - 1) + middle + (edge,))
    return dual(vt_compose(dual(lam), n))


def compose(letter: str, lam: RankLottery, n: int) -> RankLottery:
    if letter == VT:
        return vt_compose(lam, n)
    if letter == RD:
        return rd_compose(lam, n)
    raise ValueError(f"unknown composition letter {letter!r}")


@dataclass(frozen=True)
class CanonicalSequence:
    """A word over {VT, RD} naming a canonical guarantee at context (n, p)."""

    word: tuple[str, ...]
    n: int
    p: int

    def __post_init__(self) -> None:
        if not 3 <= self.n < self.p:
            raise ValueError("canonical guarantees need 3 <= n < p")
        if any(letter not in _LETTERS for letter in self.word):
            raise ValueError(f"word letters must be in {_LETTERS}")
        if not 1 <= len(self.word) <= self.depth:
            raise ValueError(
                f"word length must be between 1 and {self.depth} at (n={self.n}, p={self.p})"
            )

    @property
    def depth(self) -> int:
        """Maximum number of composition rounds: floor((p-1)/n)."""
        return (self.p - 1) // self.n

    @property
    def remainder(self) -> int:
        """Outcomes left after `depth` rounds of n removals."""
        return self.p - self.depth * self.n

    def text(self) -> str:
        return ",".join(self.word)


def parse_word(text: str) -> tuple[str, ...]:
    letters = tuple(tok.strip().upper() for tok in text.split(","))
    if any(letter not in _LETTERS for letter in letters):
        raise ValueError(f"cannot parse word {text!r}; letters must be VT or RD")
    return letters


def canonical(seq: CanonicalSequence) -> RankLottery:
    """The guarantee named by a word, built by folding compositions inward-out.

    With d = depth and q = remainder, the innermost letter acts on
    (d - h + 1) * n + q outcomes (h = word length), i.e. it composes over the
    uniform lottery on the next-smaller window; each outer letter then adds
    n outcomes.
    """
    n = seq.n
    h = len(seq.word)
    base = (seq.depth - h) * n + seq.remainder
    lam = uniform(base)
    for letter in reversed(seq.word):
        lam = compose(letter, lam, n)
    return lam


def canonical_word(word: tuple[str, ...] | str, n: int, p: int) -> RankLottery:
    if isinstance(word, str):
        word = parse_word(word)
    return canonical(CanonicalSequence(word, n, p))


def enumerate_canonical(n: int, p: int) -> list[tuple[tuple[str, ...], RankLottery]]:
    """All canonical guarantees at (n, p): every word of length 1..depth."""
    if not 3 <= n < p:
        raise ValueError("canonical guarantees need 3 <= n < p")
    d = (p - 1) // n
    out = []
    for h in range(1, d + 1):
        for word in itertools.product(_LETTERS, repeat=h):
            out.append((word, canonical(CanonicalSequence(word, n, p))))
    return out


def dual_word(word: tuple[str, ...]) -> tuple[str, ...]:
    """Swap every VT with RD; names the dual canonical guarantee."""
    return tuple(RD if letter == VT else VT for letter in word)


def word_simplex(word: tuple[str, ...] | str, n: int, p: int) -> list[RankLottery]:
    """Vertices [uniform, word[:1], word[:2], ..., word] for a full-depth word.

    The d+1 vertices are affinely independent (checked exactly); their hull
    is a d-dimensional simplex of guarantees.
    """
    if isinstance(word, str):
        word = parse_word(word)
    d = (p - 1) // n
    if len(word) != d:
        raise ValueError(f"need a word of full length {d}")
    vertices = [uniform(p)]
    for h in range(1, d + 1):
        vertices.append(canonical(CanonicalSequence(word[:h], n, p)))
    if not _affinely_independent(vertices):
        raise AssertionError("simplex vertices are affinely dependent")
    return vertices


def _affinely_independent(points: list[RankLottery]) -> bool:
    base = points[0].probs
    rows = [[x - b for x, b in zip(pt.probs, base)] for pt in points[1:]]
    rank = 0
    cols = len(base)
    for col in range(cols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [v * inv for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [v - factor * w for v, w in zip(rows[i], rows[rank])]
        rank += 1
    return rank == len(rows)


@dataclass(frozen=True)
class SupportTable:
    """Block decomposition of the ranks induced by an RD-headed word.

    `blocks[j]` is the rank set claimed by letter j+1 of the word (block 0
    belongs to the leading RD); the final entry is the residual window.
    `flags[j]` is 1 when letter j+2 is RD.  `sizes[k]` gives the support
    size contributed by the sub-word after the leading RD, truncated at
    letter k; the full guarantee for that truncation is uniform on a
    support of size `sizes[k] + n`.
    """

    blocks: tuple[frozenset[int], ...]
    flags: tuple[int, ...]
    sizes: dict[int, int]
    support: frozenset[int]
    value: Fraction


def support_table(seq: CanonicalSequence) -> SupportTable:
    """Predict support and value of an RD-headed canonical guarantee.

    Walks the word from the outside in, carving off each letter's block:
    an RD letter takes the first n-1 and last ranks of the current window,
    a VT letter takes the first rank and the last n-1.  The support is then
    read off the letter pattern and cross-checked against `canonical`.
    """
    if seq.word[0] != RD:
        raise ValueError("support tables are defined for RD-headed words")
    n, p = seq.n, seq.p
    h = len(seq.word)
    window = list(range(1, p + 1))
    blocks: list[frozenset[int]] = []
    for letter in seq.word:
        if letter == RD:
            block = frozenset(window[: n - 1] + window[-1:])
            window = window[n - 1 : -1]
        else:
            block = frozenset(window[:1] + window[-(n - 1) :])
            window = window[1 : -(n - 1)]
        blocks.append(block)
    blocks.append(frozenset(window))

    flags = tuple(1 if letter == RD else 0 for letter in seq.word[1:])
    sizes: dict[int, int] = {}
    for k in range(2, h + 1):
        eps_k = flags[k - 2]
        sizes[k] = n * sum(flags[: k - 1]) + (p - k * n) * (1 - eps_k)

    support: set[int] = set(blocks[0])
    for j, eps in enumerate(flags):
        if eps:
            support |= blocks[j + 1]
    if seq.word[-1] == VT:
        # A trailing VT keeps everything deeper than the last carved block.
        for block in blocks[h:]:
            support |= block
    lam = canonical(seq)
    predicted = frozenset(support)
    if lam.support() != predicted:
        raise AssertionError("support table disagrees with the composed guarantee")
    value = Fraction(1, len(predicted))
    if any(lam.probs[k - 1] != value for k in predicted):
        raise AssertionError("composed guarantee is not uniform on its support")
    return SupportTable(
        blocks=tuple(blocks),
        flags=flags,
        sizes=sizes,
        support=predicted,
        value=value,
    )
