"""Large sets whose sum of dilates misses part of Z_p.

Two constructions:

* the cycle construction: the map x -> y with λ1 x + λ2 y = 0 splits
  Z_p \\ {0} into cycles of equal length, and alternate vertices of each
  cycle form a set A with 0 not in λ1 A + λ2 A;
* the tower construction on the circle: with ν = -λ and
  E_0 = [0, ν_eff^-m), E_i is the set of points whose orbit under x -> νx
  first enters E_0 at step i. Odd levels A_t = E_1 ∪ E_3 ∪ ... ∪ E_{2t+1}
  satisfy A_t ∩ ν A_t = ∅, which after discretization and a small pruning
  step gives A ⊂ Z_p with a window of residues missing from A + λA.

For ν > 0, E_i is exactly the set of x whose base-ν expansion has its first
run of m zeros starting at digit i + 1, so its measure follows from a
run-length dynamic program. For ν < 0 the levels are still built from ν,
but E_0 uses ν_eff = ν² and measure guarantees come from the ν² system.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from sympy.ntheory import n_order

from . import circle
from .circle import IntervalSet
from .errors import InvalidDilateError, NoValidSetError, ScaleError
from .zp import ZpSet, check_prime, dilate_sum

DEFAULT_INTERVAL_CAP = 10**6


# -- cycle construction --------------------------------------------------


class CycleConstruction(NamedTuple):
    set: ZpSet
    k: int  # common cycle length on Z_p \ {0}


def cycle_construction(p: int, lam1: int, lam2: int) -> CycleConstruction:
    check_prime(p)
    if lam1 % p == 0 or lam2 % p == 0:
        raise InvalidDilateError(f"coefficients ({lam1}, {lam2}) vanish mod {p}")
    r = (-lam1 * pow(lam2, -1, p)) % p
    if r == 1:
        raise NoValidSetError(f"x -> {r}x fixes every residue mod {p}; no independent set avoids 0")
    k = int(n_order(r, p))
    powers = np.ones(k, dtype=np.int64)
    for j in range(1, k):
        powers[j] = powers[j - 1] * r % p
    seen = np.zeros(p, dtype=bool)
    seen[0] = True
    members = np.zeros(p, dtype=bool)
    stop = 2 * (k // 2)
    for x in range(1, p):
        if seen[x]:
            continue
        cyc = (x * powers) % p  # starts at its least element since x scans upward
        seen[cyc] = True
        members[cyc[0:stop:2]] = True
    return CycleConstruction(ZpSet.from_array(p, members), k)


# -- tower parameters ----------------------------------------------------


@dataclass(frozen=True)
class ConstructionParams:
    lam: int
    m: int
    t: int
    epsilon: Fraction | None = None

    def __post_init__(self):
        if abs(self.lam) < 2:
            raise InvalidDilateError(f"need |lambda| >= 2, got {self.lam}")
        if self.m < 1 or self.t < 1:
            raise ValueError("m and t must be positive")
        if self.epsilon is not None:
            object.__setattr__(self, "epsilon", Fraction(self.epsilon))

    @property
    def nu(self) -> int:
        return -self.lam

    @property
    def nu_eff(self) -> int:
        return self.nu if self.nu > 0 else self.nu * self.nu

    @property
    def threshold(self) -> int:
        """E_0 = [0, 1/threshold)."""
        return self.nu_eff ** self.m

    @property
    def steps_bounded(self) -> int:
        """Number of ν_eff steps whose residual the block bound controls for A_t."""
        # ν < 0: levels 0..2t of ν cover levels 0..t of ν².
        return 2 * self.t + 1 if self.nu > 0 else self.t + 1

    def measure_lower_bound(self) -> float:
        q = 1 / self.threshold
        residual = (1 - q) ** (self.steps_bounded / self.m)
        return 0.5 - 0.5 * residual - 0.5 * q

    def meets_epsilon(self, epsilon=None) -> bool:
        """Exact check that the measure bound is at least 1/2 - ε."""
        eps = Fraction(epsilon if epsilon is not None else self.epsilon)
        q = Fraction(1, self.threshold)
        slack = 2 * eps - q
        if slack <= 0:
            return False
        # (1-q)^(n/m) <= slack  <=>  (1-q)^n <= slack^m
        return (1 - q) ** self.steps_bounded <= slack ** self.m

    def header(self) -> dict:
        return {
            "lambda": self.lam,
            "nu": self.nu,
            "m": self.m,
            "t": self.t,
            "epsilon": self.epsilon if self.epsilon is not None else "none",
        }


def _parse_eps(epsilon) -> Fraction:
    eps = Fraction(epsilon)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError(f"epsilon must lie in (0, 1/2), got {eps}")
    return eps


def choose_params(lam: int, epsilon) -> ConstructionParams:
    """Least m with ν_eff^-m <= ε/2, then least t with residual bound <= ε."""
    eps = _parse_eps(epsilon)
    if abs(lam) < 2:
        raise InvalidDilateError(f"need |lambda| >= 2, got {lam}")
    nu = -lam
    base = nu if nu > 0 else nu * nu
    m = 1
    while Fraction(1, base**m) > eps / 2:
        m += 1
    q = Fraction(1, base**m)
    per_t = 2 if nu > 0 else 1
    # estimate, then walk to the exact least t
    est = math.log(float(eps)) * m / math.log(float(1 - q))
    t = max(1, int((est - 1) / per_t) - 2)

    def ok(t):
        n = per_t * t + 1
        return (1 - q) ** n <= eps**m

    while t > 1 and ok(t - 1):
        t -= 1
    while not ok(t):
        t += 1
    return ConstructionParams(lam, m, t, eps)


# -- circle side ---------------------------------------------------------


def tower(params: ConstructionParams, n: int, cap: int = DEFAULT_INTERVAL_CAP) -> list[IntervalSet]:
    """[E_0, ..., E_n] as exact interval sets."""
    e0 = IntervalSet.of((0, Fraction(1, params.threshold)))
    levels = [e0]
    for i in range(1, n + 1):
        nxt = circle.difference(circle.preimage_mod1(levels[-1], params.nu), e0)
        if len(nxt) > cap:
            raise ScaleError(f"E_{i} has {len(nxt)} intervals, over the cap of {cap}")
        levels.append(nxt)
    return levels


def zero_run_set(params: ConstructionParams, i: int, cap: int = DEFAULT_INTERVAL_CAP) -> IntervalSet:
    return tower(params, i, cap)[i]


def rokhlin_set(params: ConstructionParams, cap: int = DEFAULT_INTERVAL_CAP) -> IntervalSet:
    """A_t = E_1 ∪ E_3 ∪ ... ∪ E_{2t+1}."""
    levels = tower(params, 2 * params.t + 1, cap)
    return circle.union_all(levels[1::2])


def zero_run_measures(nu: int, m: int, n: int) -> list[Fraction]:
    """Exact μ(E_0), ..., μ(E_{n-1}) for ν >= 2.

    Tracks the distribution of the current trailing-zero count over base-ν
    digits; E_i is hit when that count first reaches m at digit i + m.
    """
    if nu < 2:
        raise InvalidDilateError("digit dynamic program needs nu >= 2")
    zero = Fraction(1, nu)
    other = 1 - zero
    state = [Fraction(0)] * m
    state[0] = Fraction(1)
    out = []
    for digit in range(1, n + m):
        absorbed = state[m - 1] * zero
        nxt = [sum(state, Fraction(0)) * other] + [s * zero for s in state[:-1]]
        state = nxt
        if digit >= m:
            out.append(absorbed)
    return out


def measure_E(params: ConstructionParams, i: int) -> Fraction:
    if params.nu < 2:
        raise InvalidDilateError("measure_E needs nu >= 2; use the interval tower for nu < 0")
    return zero_run_measures(params.nu, params.m, i + 1)[i]


def residual(nu: int, m: int, n: int) -> Fraction:
    """μ of the complement of E_0 ∪ ... ∪ E_{n-1}."""
    return 1 - sum(zero_run_measures(nu, m, n), Fraction(0))


def block_bound_holds(nu: int, m: int, n: int) -> bool:
    """residual(n) <= (1 - ν^-m)^(n/m), compared exactly via m-th powers."""
    q = Fraction(1, nu**m)
    return residual(nu, m, n) ** m <= (1 - q) ** n


# -- Z_p side ------------------------------------------------------------


def first_hits(params: ConstructionParams, p: int) -> np.ndarray:
    """For each x in [0, p): least i <= 2t+1 with x/p in E_i, else -1.

    x/p lies in E_i iff (ν^i x mod p) < p / threshold, decided in integers.
    """
    check_prime(p)
    bound = (p - 1) // params.threshold + 1  # y * threshold < p  <=>  y < bound
    nu = params.nu % p
    y = np.arange(p, dtype=np.int64)
    hit = np.full(p, -1, dtype=np.int64)
    for i in range(2 * params.t + 2):
        new = (hit < 0) & (y < bound)
        hit[new] = i
        y = (y * nu) % p
    return hit


def tower_zp(params: ConstructionParams, p: int) -> ZpSet:
    """Points x with x/p in A_t, by modular membership (no intervals)."""
    hit = first_hits(params, p)
    return ZpSet.from_array(p, (hit >= 0) & (hit % 2 == 1))


@dataclass(frozen=True)
class ConstructionResult:
    set: ZpSet
    params: ConstructionParams
    window: int
    deleted: int
    sumset_card: int
    target: Fraction | None = None
    notes: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.set.p

    @property
    def density(self) -> Fraction:
        return Fraction(self.set.card, self.p)

    @property
    def sumset_density(self) -> Fraction:
        return Fraction(self.sumset_card, self.p)

    @property
    def delta(self) -> Fraction:
        return 1 - self.sumset_density

    @property
    def meets_density(self) -> bool:
        return self.target is None or self.density >= self.target

    def header(self) -> dict:
        h = self.params.header()
        h.update(
            window=self.window,
            density=f"{float(self.density):.6f}",
            sumset_density=f"{float(self.sumset_density):.6f}",
        )
        return h


def _window_for(acc: IntervalSet, nu: int, target: Fraction, p: int) -> int:
    """Largest w whose pruning provably keeps at least target*p points, or -1.

    A point x survives discretization iff x/p in A_t, so |A_p| >= μ(A_t)p - K.
    Pruning with half-width w only deletes x with x/p in
    I_w = A_t ∩ (νA_t + [-w/p, w/p]), at most μ(I_w)p + |I_w| points.
    """
    K = len(acc)
    mu = circle.measure(acc)
    image = circle.dilate_mod1(acc, nu)

    def keeps(w: int) -> bool:
        inter = circle.intersect(acc, circle.fatten(image, Fraction(w, p)))
        return (mu - circle.measure(inter) - target) * p >= K + len(inter)

    if not keeps(0):
        return -1
    lo, hi = 0, (p - 3) // 2
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if keeps(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def fit_tower(lam: int, epsilon, p: int, cap: int = 2048) -> tuple[ConstructionParams, int] | None:
    """Tower and pruning window for Z_p that maximize the provable missing window.

    Candidates are all (m, t) up to the values from :func:`choose_params`
    whose A_t has at most ``cap`` intervals; each gets the largest window
    that provably keeps |A| >= (1/2 - ε)p (see :func:`_window_for`). Ties go
    to fewer intervals, then smaller m and t. Returns None if no candidate
    qualifies even with window 0.
    """
    eps = _parse_eps(epsilon)
    top = choose_params(lam, eps)
    target = Fraction(1, 2) - eps
    best = None
    for m in range(1, top.m + 1):
        base = ConstructionParams(lam, m, 1, eps)
        e0 = IntervalSet.of((0, Fraction(1, base.threshold)))
        levels = [e0]
        acc = IntervalSet.empty()
        for t in range(0, top.t + 1):
            while len(levels) < 2 * t + 2:
                levels.append(circle.difference(circle.preimage_mod1(levels[-1], base.nu), e0))
            acc = circle.union(acc, levels[2 * t + 1])
            if len(acc) > cap or len(levels[-1]) > cap:
                break
            if t == 0 or circle.measure(acc) <= target:
                continue
            w = _window_for(acc, base.nu, target, p)
            key = (w, -len(acc), -m, -t)
            if w >= 0 and (best is None or key > best[0]):
                best = (key, ConstructionParams(lam, m, t, eps), w)
    if best is None:
        return None
    return best[1], best[2]


def construct_zp(
    lam: int,
    epsilon,
    p: int,
    *,
    params: ConstructionParams | None = None,
    window: int | None = None,
) -> ConstructionResult:
    """A ⊂ Z_p with |A| >= (1/2 - ε)p and a window of residues missing from A + λA.

    Without explicit ``params`` the tower and window come from
    :func:`fit_tower`; if no coarse tower qualifies, the :func:`choose_params`
    tower is used unpruned (window 0, so only the residue 0 is guaranteed
    missing). Explicit ``params`` default to window 1. The set is the modular
    tower membership, pruned so that A - νA = A + λA misses {-w, ..., w}.
    """
    check_prime(p)
    if abs(lam) < 2:
        raise InvalidDilateError(f"need |lambda| >= 2, got {lam}")
    if p < 10**4:
        warnings.warn(f"p = {p} is below 10^4; the density guarantee is not meaningful", stacklevel=2)
    eps = _parse_eps(epsilon) if epsilon is not None else None
    fitted = False
    if params is None:
        if eps is None:
            raise ValueError("need epsilon or explicit params")
        fit = fit_tower(lam, eps, p)
        if fit is not None:
            params, auto_window = fit
            fitted = True
        else:
            # fine towers have A_p ∩ νA_p = ∅ exactly but no room for a wider window
            params, auto_window = choose_params(lam, eps), 0
        if window is None:
            window = auto_window
    elif window is None:
        window = 1
    if params.lam != lam:
        raise ValueError(f"params are for lambda={params.lam}, not {lam}")
    target = Fraction(1, 2) - eps if eps is not None else None

    base = tower_zp(params, p)
    pruned = circle.prune_to_avoid(base, 1, params.nu, window)
    S = dilate_sum(pruned.set, (1, lam))
    return ConstructionResult(
        set=pruned.set,
        params=params,
        window=window,
        deleted=pruned.deleted,
        sumset_card=S.card,
        target=target,
        notes={"fitted": fitted, "unpruned_card": base.card},
    )
