"""Ground truth by search: extremal sums of dilates and exhaustive checks of
Cauchy-Davenport, Vosper and the Ruzsa triangle inequality."""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from . import circle
from .construct import ConstructionParams, block_bound_holds, rokhlin_set, tower, zero_run_measures
from .errors import EmptySetError, ScaleError
from .structure import diameter
from .zp import DilateVector, ZpSet, _fold, _rotate, check_prime, dilate_sum, sumset

ENUMERATION_BUDGET = 10**7


def _as_vector(lambdas) -> DilateVector:
    return lambdas if isinstance(lambdas, DilateVector) else DilateVector(lambdas)


def _dilate_sum_bits(elems: Sequence[int], coeffs: Sequence[int], p: int) -> int:
    """Bitmask of λ1·A + ... + λk·A for a small explicit A (p small)."""
    acc = 0
    for x in elems:
        acc |= 1 << (coeffs[0] * x % p)
    for lam in coeffs[1:]:
        nxt = 0
        for x in elems:
            nxt |= acc << (lam * x % p)
        acc = _fold(nxt, p)
    return acc


@dataclass(frozen=True)
class ExtremalRecord:
    p: int
    lambdas: DilateVector
    size: int
    min_sumset: int
    witness: ZpSet
    mode: str  # "exhaustive" or "randomized" (an upper bound)

    def __post_init__(self):
        if self.witness.card != self.size:
            raise AssertionError(f"witness has {self.witness.card} elements, expected {self.size}")
        got = dilate_sum(self.witness, self.lambdas).card
        if got != self.min_sumset:
            raise AssertionError(f"witness sum of dilates has {got} elements, recorded {self.min_sumset}")

    @property
    def k(self) -> int:
        return self.lambdas.k

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.min_sumset, self.size)

    def row(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "lambdas": str(self.lambdas),
            "size": self.size,
            "min_sumset": self.min_sumset,
            "ratio": f"{float(self.ratio):.6f}",
            "mode": self.mode,
            "witness": ";".join(map(str, self.witness)),
        }


def _canonical_min(args) -> int:
    p, coeffs, size, first = args
    best = p + 1
    for rest in combinations(range(first + 1, p), size - 3):
        v = _dilate_sum_bits((0, 1, first) + rest, coeffs, p).bit_count()
        if v < best:
            best = v
    return best


def exhaustive_ex(p: int, lambdas, size: int, *, budget: int = ENUMERATION_BUDGET, workers: int = 1) -> ExtremalRecord:
    """Exact minimum of |λ1·A + ... + λk·A| over all A ⊂ Z_p with |A| = size.

    Affine maps x -> ux + v (u a unit) preserve the size of every sum of
    dilates, so the minimum is searched over sets containing 0 and 1 only.
    The witness is the lexicographically least minimizer over all subsets.
    """
    check_prime(p)
    vec = _as_vector(lambdas)
    if size < 1:
        raise EmptySetError("size must be at least 1")
    if size > p:
        raise ValueError(f"size {size} exceeds p = {p}")
    if math.comb(p, size) > budget:
        raise ScaleError(f"C({p}, {size}) = {math.comb(p, size)} exceeds the budget {budget}")
    coeffs = vec.coeffs
    if size == 1:
        best = _dilate_sum_bits((0,), coeffs, p).bit_count()
    elif size == 2:
        best = _dilate_sum_bits((0, 1), coeffs, p).bit_count()
    else:
        tasks = [(p, coeffs, size, first) for first in range(2, p - size + 3)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                best = min(pool.map(_canonical_min, tasks))
        else:
            best = min(map(_canonical_min, tasks))
    for combo in combinations(range(p), size):
        if _dilate_sum_bits(combo, coeffs, p).bit_count() == best:
            witness = ZpSet.from_elements(p, combo)
            break
    return ExtremalRecord(p, vec, size, best, witness, "exhaustive")


def randomized_ex(
    p: int,
    lambdas,
    size: int,
    iterations: int,
    seed: int = 0,
    *,
    restart_after: int = 500,
) -> ExtremalRecord:
    """Seeded local search for a small sum of dilates; an upper bound on the minimum.

    Each step swaps one member for one non-member and keeps the swap only if
    the sum of dilates shrinks. After ``restart_after`` consecutive rejected
    swaps the search restarts from a fresh random set.
    """
    check_prime(p)
    vec = _as_vector(lambdas)
    coeffs = vec.coeffs
    if not 1 <= size <= p:
        raise ValueError(f"size must lie in [1, {p}]")
    rng = random.Random(seed)

    def fresh():
        s = rng.sample(range(p), size)
        return s, _dilate_sum_bits(s, coeffs, p).bit_count()

    cur, cur_val = fresh()
    best, best_val = list(cur), cur_val
    stagnant = 0
    for _ in range(iterations):
        if size == p:
            break
        members = set(cur)
        i = rng.randrange(size)
        y = rng.randrange(p)
        while y in members:
            y = rng.randrange(p)
        trial = list(cur)
        trial[i] = y
        val = _dilate_sum_bits(trial, coeffs, p).bit_count()
        if val < cur_val:
            cur, cur_val = trial, val
            stagnant = 0
            if val < best_val:
                best, best_val = list(trial), val
        else:
            stagnant += 1
            if stagnant >= restart_after:
                cur, cur_val = fresh()
                stagnant = 0
                if cur_val < best_val:
                    best, best_val = list(cur), cur_val
    return ExtremalRecord(p, vec, size, best_val, ZpSet.from_elements(p, best), "randomized")


# -- verification suites -------------------------------------------------


@dataclass
class SuiteReport:
    name: str
    p: int
    checked: int
    violations: int
    unit: str = "pairs"
    examples: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def summary(self) -> str:
        return f"{self.violations} violations / {self.checked} {self.unit}"


def _popcounts(p: int) -> np.ndarray:
    return np.array([bin(i).count("1") for i in range(1 << p)], dtype=np.int64)


def _sumset_table(b: int, p: int) -> np.ndarray:
    """S[a] = bitmask of A + B for every subset mask a, built over the subset lattice."""
    S = np.zeros(1 << p, dtype=np.int64)
    for j in range(p):
        S[1 << j: 1 << (j + 1)] = S[: 1 << j] | _rotate(b, j, p)
    return S


def _check_small(p: int) -> None:
    check_prime(p)
    if p > 13:
        raise ScaleError(f"exhaustive pair suites are limited to p <= 13, got {p}")


def cd_suite(p: int, *, sample: int = 200, seed: int = 0) -> SuiteReport:
    """|A + B| >= min(|A| + |B| - 1, p) for every pair of nonempty A, B ⊆ Z_p.

    Sumsets come from a subset-lattice table; a seeded sample of pairs is
    recomputed with :func:`sumset` as a cross-check.
    """
    _check_small(p)
    pop = _popcounts(p)
    n = 1 << p
    violations = 0
    examples = []
    for b in range(1, n):
        sizes = pop[_sumset_table(b, p)]
        need = np.minimum(pop + pop[b] - 1, p)
        bad = np.flatnonzero(sizes[1:] < need[1:]) + 1
        violations += bad.size
        for a in bad[: max(0, 5 - len(examples))]:
            examples.append((int(a), b))
    rng = random.Random(seed)
    mismatches = 0
    for _ in range(sample):
        a, b = rng.randrange(1, n), rng.randrange(1, n)
        via_table = int(_sumset_table(b, p)[a])
        if sumset(ZpSet(p, a), ZpSet(p, b)).bits != via_table:
            mismatches += 1
    return SuiteReport(
        "cauchy-davenport", p, (n - 1) ** 2, violations + mismatches,
        examples=examples, extra={"kernel_mismatches": mismatches},
    )


def _ap_differences(p: int) -> np.ndarray:
    """d in [1, (p-1)/2] if the mask is an AP of size >= 2 with difference ±d, else 0."""
    out = np.zeros(1 << p, dtype=np.int64)
    for mask in range(1, 1 << p):
        A = ZpSet(p, mask)
        if A.card < 2:
            continue
        l, w = diameter(A)
        if l == A.card:
            out[mask] = w.d
    return out


def vosper_suite(p: int) -> SuiteReport:
    """Equality in Cauchy-Davenport with |A|, |B| >= 2 and |A+B| <= p-2 forces
    A and B to be progressions with a common difference."""
    _check_small(p)
    pop = _popcounts(p)
    apd = _ap_differences(p)
    instances = 0
    violations = 0
    examples = []
    for b in range(1, 1 << p):
        if pop[b] < 2:
            continue
        sizes = pop[_sumset_table(b, p)]
        eq = (pop >= 2) & (sizes == pop + pop[b] - 1) & (sizes <= p - 2)
        hits = np.flatnonzero(eq)
        instances += hits.size
        bad = hits[(apd[hits] == 0) | (apd[hits] != apd[b])]
        violations += bad.size
        for a in bad[: max(0, 5 - len(examples))]:
            examples.append((int(a), b))
    return SuiteReport("vosper", p, instances, violations, unit="equality instances", examples=examples)


def _random_subset(rng: np.random.Generator, p: int) -> ZpSet:
    members = rng.random(p) < rng.random()
    members[rng.integers(p)] = True
    return ZpSet.from_array(p, members)


def ruzsa_suite(p: int, trials: int, seed: int = 0, lambdas=(1, 2), special_trials: int | None = None) -> SuiteReport:
    """|B+D|·|C| <= |B+C|·|C+D| on seeded random triples, plus the special case
    B = D = λ1·A, C = λ2·A + ... + λk·A on random A."""
    check_prime(p)
    vec = _as_vector(lambdas)
    rng = np.random.default_rng(seed)
    violations = 0
    examples = []
    for _ in range(trials):
        B, C, D = (_random_subset(rng, p) for _ in range(3))
        if sumset(B, D).card * C.card > sumset(B, C).card * sumset(C, D).card:
            violations += 1
            if len(examples) < 5:
                examples.append(("triangle", list(B), list(C), list(D)))
    cor_bad = 0
    ctrials = trials if special_trials is None else special_trials
    if vec.k >= 2:
        tail = DilateVector(vec.coeffs[1:])
        for _ in range(ctrials):
            A = _random_subset(rng, p)
            full = dilate_sum(A, vec).card
            if sumset(A, A).card * dilate_sum(A, tail).card > full * full:
                cor_bad += 1
                if len(examples) < 5:
                    examples.append(("special-case", list(A)))
    else:
        ctrials = 0
    return SuiteReport(
        "ruzsa", p, trials + ctrials, violations + cor_bad, unit="checks", examples=examples,
        extra={"triangle_trials": trials, "special_trials": ctrials, "special_violations": cor_bad},
    )


def tower_suite(nus=(2, 3), ms=(1, 2, 3), levels: int = 8, disjoint_cases=((2, 2, 3), (2, 3, 5), (3, 2, 3))) -> SuiteReport:
    """Exact checks on the circle towers E_0, ..., E_levels for ν >= 2.

    Per (ν, m): the E_i are pairwise disjoint, ν·E_{i+1} ⊆ E_i, the digit
    dynamic program reproduces every interval measure, and the residual
    obeys the block bound at n = m, 2m, ..., levels·m. Per (ν, m, t) in
    ``disjoint_cases``: A_t ∩ ν·A_t = ∅.
    """
    checked = 0
    examples = []

    def record(ok: bool, what):
        nonlocal checked
        checked += 1
        if not ok:
            examples.append(what)

    for nu in nus:
        for m in ms:
            params = ConstructionParams(-nu, m, 1)
            E = tower(params, levels + 1)
            dp = zero_run_measures(nu, m, levels + 1)
            for i in range(levels + 1):
                record(dp[i] == circle.measure(E[i]), ("measure", nu, m, i))
                if i < levels:
                    record(circle.is_subset(circle.dilate_mod1(E[i + 1], nu), E[i]), ("chain", nu, m, i))
                for j in range(i):
                    record(not circle.intersect(E[i], E[j]), ("disjoint", nu, m, j, i))
            for n in range(m, levels * m + 1, m):
                record(block_bound_holds(nu, m, n), ("block-bound", nu, m, n))
    for nu, m, t in disjoint_cases:
        A = rokhlin_set(ConstructionParams(-nu, m, t))
        record(not circle.intersect(A, circle.dilate_mod1(A, nu)), ("A_t", nu, m, t))
    return SuiteReport("tower", 0, checked, len(examples), unit="checks", examples=examples[:5])
