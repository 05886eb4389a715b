"""Diameters of subsets of Z_p and their lifts to the integers."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySetError, NotRectifiableError
from .zp import DilateVector, ZpSet, check_prime


@dataclass(frozen=True)
class ApWitness:
    """The progression {x, x+d, ..., x+(l-1)d} mod p."""

    x: int
    d: int
    l: int

    def members(self, p: int) -> list[int]:
        return [(self.x + j * self.d) % p for j in range(self.l)]

    def __str__(self) -> str:
        return f"x={self.x} d={self.d} l={self.l}"


def diameter(A: ZpSet, *, chunk: int = 1 << 22) -> tuple[int, ApWitness]:
    """Length of the shortest arithmetic progression containing A.

    Scans d in [1, (p-1)/2]; d and p-d give reflected covers of equal length.
    For each d the set is mapped by d^-1 and the largest cyclic gap is cut
    out. Ties go to the smallest d, then the smallest start x.
    """
    if not A:
        raise EmptySetError("diameter of the empty set is undefined")
    p = A.p
    a = A.elements()
    n = a.size
    if n == 1:
        return 1, ApWitness(int(a[0]), 1, 1)
    ds = np.arange(1, max(1, (p - 1) // 2) + 1, dtype=np.int64)
    rows = max(1, chunk // n)
    best = None
    for lo in range(0, ds.size, rows):
        d = ds[lo:lo + rows]
        dinv = np.array([pow(int(v), -1, p) for v in d], dtype=np.int64)
        y = np.sort((a[None, :] * dinv[:, None]) % p, axis=1)
        # steps[:, i] = distance from y[i] forward to the next element (cyclic)
        steps = np.empty_like(y)
        steps[:, :-1] = y[:, 1:] - y[:, :-1]
        steps[:, -1] = y[:, 0] + p - y[:, -1]
        gap = steps.max(axis=1)
        lens = p - gap + 1
        i = int(np.argmin(lens))  # first occurrence = smallest d in chunk
        if best is not None and lens[i] >= best[0]:
            continue
        starts_y = np.roll(y[i], -1)[steps[i] == gap[i]]
        xs = (starts_y * int(d[i])) % p
        best = (int(lens[i]), ApWitness(int(xs.min()), int(d[i]), int(lens[i])))
    return best


def is_ap(A: ZpSet) -> bool:
    return bool(A) and diameter(A)[0] == A.card


@dataclass(frozen=True)
class IntLift:
    """Integer set obtained by unrolling a Z_p set along a progression."""

    elements: tuple[int, ...]
    order_map: dict
    p: int
    M: int
    witness: ApWitness


def rectify(A: ZpSet, M: int) -> IntLift:
    """Lift A to {0, ..., l-1} along its diameter witness.

    Requires l(A) < p/M, which makes the lift M-Freiman isomorphic to A, so
    every sum of dilates with sum |λi| <= M has the same size over Z and Z_p.
    """
    l, w = diameter(A)
    if l * M >= A.p:
        raise NotRectifiableError(f"diameter {l} is not below p/M = {A.p}/{M}")
    dinv = pow(w.d, -1, A.p)
    order_map = {int(a): ((int(a) - w.x) * dinv) % A.p for a in A}
    return IntLift(tuple(sorted(order_map.values())), order_map, A.p, M, w)


def int_dilate_sum(lift: IntLift | Sequence[int], lambdas: DilateVector | Sequence[int]) -> int:
    """|λ1·X + ... + λk·X| over the integers, by direct enumeration."""
    xs = np.array(lift.elements if isinstance(lift, IntLift) else list(lift), dtype=np.int64)
    if not isinstance(lambdas, DilateVector):
        lambdas = DilateVector(lambdas)
    if xs.size == 0:
        return 0
    sums = np.unique(lambdas.coeffs[0] * xs)
    for lam in lambdas.coeffs[1:]:
        sums = np.unique(np.add.outer(sums, lam * xs))
    return int(sums.size)


def freiman_isomorphic(
    A: Iterable[int],
    B: Iterable[int],
    m: int,
    mod_a: int | None = None,
    mod_b: int | None = None,
    cap: int = 12,
) -> bool:
    """Exhaustive test for an m-Freiman isomorphism A -> B.

    ``mod_a``/``mod_b`` give the ambient group (Z_p for a prime, Z for None).
    Searches bijections by backtracking; after each assignment every m-fold
    multiset of assigned elements must have matching sum-equality classes on
    both sides. Factorial worst case, hence the size cap.
    """
    A = sorted(set(int(x) % mod_a if mod_a else int(x) for x in A))
    B = sorted(set(int(x) % mod_b if mod_b else int(x) for x in B))
    if len(A) != len(B):
        return False
    if len(A) > cap:
        raise ValueError(f"oracle capped at {cap} elements")
    if mod_a:
        check_prime(mod_a)
    if mod_b:
        check_prime(mod_b)
    n = len(A)

    def red(v, mod):
        return v % mod if mod else v

    # multisets of positions, grouped by the largest position they use
    by_top: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for combo in combinations_with_replacement(range(n), m):
        by_top[combo[-1]].append(combo)

    image: list[int] = []

    def extend(level: int, fwd: dict, bwd: dict) -> bool:
        if level == n:
            return True
        for b in B:
            if b in image:
                continue
            image.append(b)
            f2, b2 = dict(fwd), dict(bwd)
            ok = True
            for combo in by_top[level]:
                sa = red(sum(A[i] for i in combo), mod_a)
                sb = red(sum(image[i] for i in combo), mod_b)
                if f2.setdefault(sa, sb) != sb or b2.setdefault(sb, sa) != sa:
                    ok = False
                    break
            if ok and extend(level + 1, f2, b2):
                return True
            image.pop()
        return False

    return extend(0, {}, {})
