"""Exact set arithmetic in Z_p.

A :class:`ZpSet` stores its members as a dense bit vector packed into a
Python integer (bit ``x`` set iff ``x`` is a member). Sumsets are computed by
OR-ing shifted copies of one operand over the members of the other, which is
exact and fast at desk scale (p up to ~10^7). Runs of consecutive members
are shifted in O(log run) steps by doubling, so interval-like sets are cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np
from sympy import isprime

from .errors import (
    EmptySetError,
    InvalidDilateError,
    ModulusMismatchError,
    NotPrimeError,
    SetFileError,
    WindowError,
)


@lru_cache(maxsize=4096)
def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool) or not isprime(int(p)):
        raise NotPrimeError(f"modulus {p!r} is not prime")
    return int(p)


def _bits_from_array(arr: np.ndarray) -> int:
    packed = np.packbits(np.asarray(arr, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _array_from_bits(bits: int, p: int) -> np.ndarray:
    nbytes = (p + 7) // 8
    raw = np.frombuffer(bits.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:p].astype(bool)


@dataclass(frozen=True)
class ZpSet:
    """A subset of Z_p, p prime."""

    p: int
    bits: int = 0

    def __post_init__(self):
        check_prime(self.p)
        if self.bits < 0 or self.bits >> self.p:
            raise ValueError("membership vector has bits outside [0, p)")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_elements(cls, p: int, elements: Iterable[int]) -> ZpSet:
        check_prime(p)
        bits = 0
        for x in elements:
            bits |= 1 << (int(x) % p)
        return cls(p, bits)

    @classmethod
    def from_array(cls, p: int, members: np.ndarray) -> ZpSet:
        members = np.asarray(members, dtype=bool)
        if members.shape != (p,):
            raise ValueError(f"membership array must have shape ({p},)")
        return cls(p, _bits_from_array(members))

    @classmethod
    def empty(cls, p: int) -> ZpSet:
        return cls(p, 0)

    @classmethod
    def full(cls, p: int) -> ZpSet:
        return cls(p, (1 << p) - 1)

    @classmethod
    def interval(cls, p: int, start: int, length: int) -> ZpSet:
        """The cyclic interval {start, ..., start+length-1} mod p."""
        if length >= p:
            return cls.full(p)
        if length <= 0:
            return cls.empty(p)
        return cls(p, _fold((((1 << length) - 1) << (start % p)), p))

    # -- views ------------------------------------------------------------

    @cached_property
    def card(self) -> int:
        return self.bits.bit_count()

    def __len__(self) -> int:
        return self.card

    def __contains__(self, x: int) -> bool:
        return bool((self.bits >> (int(x) % self.p)) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements().tolist())

    def __bool__(self) -> bool:
        return self.bits != 0

    def to_array(self) -> np.ndarray:
        return _array_from_bits(self.bits, self.p)

    def elements(self) -> np.ndarray:
        """Sorted members as an int64 array."""
        return np.flatnonzero(self.to_array()).astype(np.int64)

    def runs(self) -> list[tuple[int, int]]:
        """Maximal runs of consecutive members as (start, length), non-cyclic."""
        edges = np.diff(np.concatenate(([0], self.to_array().astype(np.int8), [0])))
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1)
        return list(zip(starts.tolist(), (ends - starts).tolist()))

    @property
    def is_full(self) -> bool:
        return self.card == self.p

    def __repr__(self) -> str:
        if self.card <= 12:
            return f"ZpSet(p={self.p}, {{{', '.join(map(str, self))}}})"
        return f"ZpSet(p={self.p}, card={self.card})"

    # -- Boolean algebra ---------------------------------------------------

    def _same(self, other: ZpSet) -> None:
        if self.p != other.p:
            raise ModulusMismatchError(f"moduli differ: {self.p} vs {other.p}")

    def __or__(self, other: ZpSet) -> ZpSet:
        self._same(other)
        return ZpSet(self.p, self.bits | other.bits)

    def __and__(self, other: ZpSet) -> ZpSet:
        self._same(other)
        return ZpSet(self.p, self.bits & other.bits)

    def __sub__(self, other: ZpSet) -> ZpSet:
        self._same(other)
        return ZpSet(self.p, self.bits & ~other.bits)

    def complement(self) -> ZpSet:
        return ZpSet(self.p, ((1 << self.p) - 1) ^ self.bits)

    def translate(self, v: int) -> ZpSet:
        return ZpSet(self.p, _rotate(self.bits, v % self.p, self.p))


@dataclass(frozen=True)
class DilateVector:
    """Nonzero integer coefficients (λ1, ..., λk)."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Sequence[int]):
        coeffs = tuple(int(c) for c in coeffs)
        if not coeffs:
            raise InvalidDilateError("need at least one coefficient")
        if any(c == 0 for c in coeffs):
            raise InvalidDilateError(f"zero coefficient in {coeffs}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def parse(cls, text: str) -> DilateVector:
        try:
            return cls([int(tok) for tok in text.replace(" ", "").split(",") if tok])
        except ValueError as exc:
            raise InvalidDilateError(f"cannot parse coefficient list {text!r}") from exc

    @property
    def k(self) -> int:
        return len(self.coeffs)

    @property
    def M(self) -> int:
        return sum(abs(c) for c in self.coeffs)

    @property
    def coprime(self) -> bool:
        return math.gcd(*self.coeffs) == 1

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __str__(self) -> str:
        return ",".join(map(str, self.coeffs))


# -- kernels -------------------------------------------------------------


def _fold(wide: int, p: int) -> int:
    mask = (1 << p) - 1
    while wide >> p:
        wide = (wide & mask) | (wide >> p)
    return wide


def _rotate(bits: int, s: int, p: int) -> int:
    if s == 0:
        return bits
    return _fold(bits << s, p)


def _shift_or(runs: list[tuple[int, int]], bits: int, p: int) -> int:
    acc = 0
    for start, length in runs:
        block = bits << start
        span = 1
        while 2 * span <= length:
            block |= block << span
            span *= 2
        if span < length:
            block |= block << (length - span)
        acc |= block
    return _fold(acc, p)


def dilate(A: ZpSet, lam: int) -> ZpSet:
    """{λa mod p : a in A}."""
    p = A.p
    lam %= p
    if not A:
        return A
    if lam == 0:
        return ZpSet(p, 1)
    if lam == 1:
        return A
    out = np.zeros(p, dtype=bool)
    out[(A.elements() * lam) % p] = True
    return ZpSet.from_array(p, out)


def sumset(A: ZpSet, B: ZpSet) -> ZpSet:
    """{a + b mod p : a in A, b in B}; empty if either operand is empty."""
    A._same(B)
    p = A.p
    if not A or not B:
        return ZpSet.empty(p)
    runs_a, runs_b = A.runs(), B.runs()
    # iterate over whichever operand has fewer runs
    if len(runs_b) < len(runs_a):
        runs_a, B = runs_b, A
    return ZpSet(p, _shift_or(runs_a, B.bits, p))


def dilate_sum(A: ZpSet, lambdas: DilateVector | Sequence[int]) -> ZpSet:
    """λ1·A + ... + λk·A."""
    if not isinstance(lambdas, DilateVector):
        lambdas = DilateVector(lambdas)
    if not A:
        raise EmptySetError("dilate sum of the empty set is undefined")
    out = dilate(A, lambdas.coeffs[0])
    for lam in lambdas.coeffs[1:]:
        out = sumset(out, dilate(A, lam))
    return out


def difference_set(A: ZpSet, B: ZpSet) -> ZpSet:
    return sumset(A, dilate(B, -1))


def window(p: int, t: int) -> ZpSet:
    """The symmetric window {-t, ..., t} mod p."""
    if 2 * t + 1 >= p:
        raise WindowError(f"window of half-width {t} does not fit in Z_{p}")
    return ZpSet.interval(p, -t, 2 * t + 1)


def difference_window(A: ZpSet, B: ZpSet, t: int) -> bool:
    """True iff A - B contains none of -t, ..., t."""
    A._same(B)
    if t < 0:
        raise WindowError("window half-width must be nonnegative")
    w = window(A.p, t)
    return not (difference_set(A, B).bits & w.bits)


# -- set file format -----------------------------------------------------


def format_set(A: ZpSet, header: dict | None = None) -> str:
    lines = []
    if header:
        lines.append("# " + " ".join(f"{k}={v}" for k, v in header.items()))
    lines.append(f"p={A.p}")
    lines.append(" ".join(map(str, A)))
    return "\n".join(lines) + "\n"


def parse_set(text: str) -> ZpSet:
    lines = [ln.strip() for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    while lines and not lines[-1]:
        lines.pop()
    if not lines or not lines[0].startswith("p="):
        raise SetFileError("set file must start with a 'p=<prime>' line")
    try:
        p = int(lines[0][2:])
    except ValueError as exc:
        raise SetFileError(f"bad modulus line {lines[0]!r}") from exc
    check_prime(p)
    if len(lines) > 2:
        raise SetFileError("set file has more than two content lines")
    body = lines[1].split() if len(lines) == 2 else []
    try:
        xs = [int(tok) for tok in body]
    except ValueError as exc:
        raise SetFileError(f"non-integer residue in {lines[1]!r}") from exc
    seen = set()
    prev = -1
    for x in xs:
        if not 0 <= x < p:
            raise SetFileError(f"residue {x} outside [0, {p})")
        if x in seen:
            raise SetFileError(f"duplicate residue {x}")
        if x < prev:
            raise SetFileError("residues must be strictly increasing")
        seen.add(x)
        prev = x
    return ZpSet.from_elements(p, xs)


def read_set(path) -> ZpSet:
    with open(path) as fh:
        return parse_set(fh.read())


def write_set(path, A: ZpSet, header: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_set(A, header))
