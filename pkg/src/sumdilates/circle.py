"""Finite unions of half-open rational intervals on the circle [0, 1).

Everything is exact: endpoints are :class:`fractions.Fraction` values and
sets are kept normalized (sorted, disjoint, non-adjacent, no empty pieces),
so equality of two ``IntervalSet`` objects is equality of the point sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

from .errors import InvalidDilateError, SetFileError, WindowError
from .zp import ZpSet, check_prime, dilate, sumset, window

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def _normalize(pieces: Iterable[tuple[Fraction, Fraction]]) -> tuple[tuple[Fraction, Fraction], ...]:
    items = sorted((a, b) for a, b in pieces if a < b)
    out: list[list[Fraction]] = []
    for a, b in items:
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1][1] = b
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


def _wrapped(start: Fraction, length: Fraction) -> list[tuple[Fraction, Fraction]]:
    """The arc [start, start+length) mod 1 as pieces inside [0, 1)."""
    if length >= 1:
        return [(ZERO, ONE)]
    start = frac(start)
    end = start + length
    if end <= 1:
        return [(start, end)]
    return [(start, ONE), (ZERO, end - 1)]


@dataclass(frozen=True)
class IntervalSet:
    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        for a, b in self.intervals:
            if not (0 <= a < b <= 1):
                raise ValueError(f"interval [{a}, {b}) not inside [0, 1)")
        if _normalize(self.intervals) != self.intervals:
            raise ValueError("intervals are not normalized; use IntervalSet.of")

    @classmethod
    def of(cls, *pieces) -> IntervalSet:
        """Build from (a, b) pairs in [0, 1); overlapping or adjacent pieces merge."""
        conv = []
        for a, b in pieces:
            a, b = Fraction(a), Fraction(b)
            if not (0 <= a <= b <= 1):
                raise ValueError(f"interval [{a}, {b}) not inside [0, 1]")
            conv.append((a, b))
        return cls(_normalize(conv))

    @classmethod
    def empty(cls) -> IntervalSet:
        return cls(())

    @classmethod
    def full(cls) -> IntervalSet:
        return cls(((ZERO, ONE),))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __contains__(self, x) -> bool:
        x = frac(Fraction(x))
        return any(a <= x < b for a, b in self.intervals)

    def __or__(self, other):
        return union(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def __sub__(self, other):
        return difference(self, other)

    def __repr__(self) -> str:
        body = " ∪ ".join(f"[{a},{b})" for a, b in self.intervals[:6])
        more = f" ∪ ... ({len(self)} pieces)" if len(self) > 6 else ""
        return f"IntervalSet({body or '∅'}{more})"


def measure(S: IntervalSet) -> Fraction:
    return sum((b - a for a, b in S.intervals), ZERO)


def union(S: IntervalSet, T: IntervalSet) -> IntervalSet:
    return IntervalSet(_normalize(S.intervals + T.intervals))


def union_all(sets: Iterable[IntervalSet]) -> IntervalSet:
    pieces: list[tuple[Fraction, Fraction]] = []
    for S in sets:
        pieces.extend(S.intervals)
    return IntervalSet(_normalize(pieces))


def intersect(S: IntervalSet, T: IntervalSet) -> IntervalSet:
    out = []
    i = j = 0
    xs, ys = S.intervals, T.intervals
    while i < len(xs) and j < len(ys):
        a = max(xs[i][0], ys[j][0])
        b = min(xs[i][1], ys[j][1])
        if a < b:
            out.append((a, b))
        if xs[i][1] < ys[j][1]:
            i += 1
        else:
            j += 1
    return IntervalSet(_normalize(out))


def complement(S: IntervalSet) -> IntervalSet:
    out = []
    cur = ZERO
    for a, b in S.intervals:
        if cur < a:
            out.append((cur, a))
        cur = b
    if cur < ONE:
        out.append((cur, ONE))
    return IntervalSet(tuple(out))


def difference(S: IntervalSet, T: IntervalSet) -> IntervalSet:
    return intersect(S, complement(T))


def is_subset(S: IntervalSet, T: IntervalSet) -> bool:
    return not difference(S, T)


def dilate_mod1(S: IntervalSet, lam: int) -> IntervalSet:
    """Image {λx mod 1 : x in S}."""
    if lam == 0:
        raise InvalidDilateError("cannot dilate by 0 on the circle")
    pieces = []
    for a, b in S.intervals:
        length = abs(lam) * (b - a)
        # for λ < 0 the image of [a, b) is (λb, λa], normalized to [λb, λa)
        start = lam * a if lam > 0 else lam * b
        pieces.extend(_wrapped(start, length))
        if length >= 1:
            return IntervalSet.full()
    return IntervalSet(_normalize(pieces))


def preimage_mod1(S: IntervalSet, lam: int) -> IntervalSet:
    """{x : λx mod 1 in S}, normalized to half-open pieces."""
    if lam == 0:
        raise InvalidDilateError("cannot take a preimage under multiplication by 0")
    n = abs(lam)
    pieces = []
    for a, b in S.intervals:
        for k in range(n):
            if lam > 0:
                pieces.append(((a + k) / n, (b + k) / n))
            else:
                # -n x in [a, b) mod 1  <=>  x in (-(b+k)/n, -(a+k)/n] mod 1
                pieces.extend(_wrapped(-(b + k) / n, (b - a) / n))
    return IntervalSet(_normalize(pieces))


def fatten(S: IntervalSet, r) -> IntervalSet:
    """Minkowski sum S + [-r, r] on the circle."""
    r = Fraction(r)
    if r < 0:
        raise WindowError("fattening radius must be nonnegative")
    pieces = []
    for a, b in S.intervals:
        pieces.extend(_wrapped(a - r, b - a + 2 * r))
    return IntervalSet(_normalize(pieces))


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def discretize(S: IntervalSet, p: int) -> ZpSet:
    """{x in [0, p) : x/p in S}, by exact cross-multiplied comparisons."""
    check_prime(p)
    members = np.zeros(p, dtype=bool)
    for a, b in S.intervals:
        lo = _ceil_div(a.numerator * p, a.denominator)  # least x with x >= a p
        hi = _ceil_div(b.numerator * p, b.denominator)  # least x with x >= b p
        if lo < hi:
            members[lo:hi] = True
    return ZpSet.from_array(p, members)


class PruneResult(NamedTuple):
    set: ZpSet
    deleted: int


def prune_to_avoid(A: ZpSet, lam1: int, lam2: int, t: int) -> PruneResult:
    """Delete every x in A with λ1·x in λ2·A + {-t..t}.

    Afterwards λ1·A' - λ2·A' misses the window {-t, ..., t}.
    """
    p = A.p
    if t < 0:
        raise WindowError("window half-width must be nonnegative")
    hits = sumset(dilate(A, lam2), window(p, t))
    if lam1 % p == 0:
        bad = A if 0 in hits else ZpSet.empty(p)
    else:
        bad = A & dilate(hits, pow(lam1, -1, p))
    return PruneResult(A - bad, bad.card)


# -- serialization -------------------------------------------------------


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def format_intervals(S: IntervalSet) -> str:
    return "".join(f"{_fmt(a)} {_fmt(b)}\n" for a, b in S.intervals)


def parse_intervals(text: str) -> IntervalSet:
    pieces = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) != 2:
            raise SetFileError(f"line {lineno}: expected 'num/den num/den'")
        try:
            a, b = Fraction(toks[0]), Fraction(toks[1])
        except (ValueError, ZeroDivisionError) as exc:
            raise SetFileError(f"line {lineno}: bad rational") from exc
        if not (0 <= a < b <= 1):
            raise SetFileError(f"line {lineno}: need 0 <= a < b <= 1")
        pieces.append((a, b))
    return IntervalSet.of(*pieces)
