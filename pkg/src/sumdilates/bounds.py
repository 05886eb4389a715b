"""Closed-form and numerically solved lower bounds for sums of dilates."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy.optimize import bisect

from .errors import DomainError, EmptySetError, MultipleRootsError
from .zp import DilateVector, ZpSet, dilate_sum

SCAN_POINTS = 64
XTOL = 1e-9


def _plagne_g(x: float, lam: int, alpha: float) -> float:
    c = (lam + 1) * math.sin(math.pi / (lam + 1))
    return x**1.5 * math.sin(math.pi / x) - c * (1 - alpha * x)


def plagne_root(lam: int, alpha: float) -> float | None:
    """Root of x^{3/2} sin(π/x) = (λ+1) sin(π/(λ+1)) (1 - αx) on [2, λ+1].

    The bracket is scanned at 64 points before bisecting; None means no sign
    change. More than one sign change raises, since the root is then not
    unique.
    """
    if lam < 2:
        raise DomainError(f"plagne_f needs lambda >= 2, got {lam}")
    if not 0 <= alpha < 0.5:
        raise DomainError(f"alpha must lie in [0, 1/2), got {alpha}")
    xs = np.linspace(2.0, lam + 1.0, SCAN_POINTS)
    gs = np.array([_plagne_g(x, lam, alpha) for x in xs])
    flips = np.flatnonzero(np.sign(gs[:-1]) * np.sign(gs[1:]) < 0)
    exact = np.flatnonzero(gs == 0)
    if len(flips) + len(exact) == 0:
        return None
    if len(flips) + len(exact) > 1:
        raise MultipleRootsError(
            f"{len(flips)} sign changes and {len(exact)} exact zeros for lambda={lam}, alpha={alpha}"
        )
    if len(exact):
        return float(xs[exact[0]])
    i = int(flips[0])
    return bisect(_plagne_g, xs[i], xs[i + 1], args=(lam, alpha), xtol=XTOL)


def plagne_f(lam: int, alpha: float) -> float:
    """max(2, root); the root is absent (value 2) when g has no sign change."""
    root = plagne_root(lam, alpha)
    return 2.0 if root is None else max(2.0, root)


def plagne_residual(lam: int, alpha: float) -> float:
    root = plagne_root(lam, alpha)
    return 0.0 if root is None else abs(_plagne_g(root, lam, alpha))


def plagne_threshold(lam: int) -> float:
    """Largest α with plagne_f(λ, α) > 2, i.e. where the root reaches x = 2."""
    c = (lam + 1) * math.sin(math.pi / (lam + 1))
    # g(2) = 2^{3/2} - c(1 - 2α) = 0
    return max(0.0, 0.5 - math.sqrt(2) / c)


def green_ruzsa_diameter(alpha: float, N: int) -> float:
    """12 α^{1/4} sqrt(log(1/α)) N with the natural logarithm."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return 12 * alpha**0.25 * math.sqrt(math.log(1 / alpha)) * N


def green_ruzsa_applicable(alpha, K) -> bool:
    """α <= (16K)^{-12K^2}, decided without floating point underflow."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    a = Fraction(alpha)
    k = Fraction(K)
    if k <= 0:
        raise DomainError("K must be positive")
    expo = 12 * k * k
    if expo.denominator == 1:
        return a * (16 * k) ** int(expo) <= 1
    with mpmath.workdps(60):
        lhs = mpmath.log(mpmath.mpf(a.numerator) / a.denominator)
        rhs = -mpmath.mpf(expo.numerator) / expo.denominator * mpmath.log(16 * mpmath.mpf(k.numerator) / k.denominator)
        return bool(lhs <= rhs)


def diameter_density_threshold(M: int, lo: float = 1e-30, hi: float = math.exp(-2)) -> float:
    """Largest α with 12 α^{1/4} sqrt(log(1/α)) < 1/M (the left side grows on (0, e^-2))."""
    def h(a):
        return 12 * a**0.25 * math.sqrt(math.log(1 / a)) - 1 / M

    if h(hi) < 0:
        return hi
    return bisect(h, lo, hi, xtol=1e-300, rtol=1e-12)


@dataclass
class BoundReport:
    p: int
    size: int
    lambdas: str
    cd: int
    bukh_main: int
    plagne: float | None
    plagne_is_upper_estimate: bool
    green_ruzsa_diameter: float | None
    actual: int | None

    def as_dict(self) -> dict:
        return asdict(self)


def cd_iterated(size: int, lambdas: DilateVector, p: int) -> int:
    """Cauchy-Davenport applied k-1 times: min(k|A| - (k-1), p), for unit λi."""
    k = lambdas.k
    if any(lam % p == 0 for lam in lambdas):
        return 1
    return min(k * size - (k - 1), p)


def bound_report(A: ZpSet, lambdas: DilateVector, measure: bool = True) -> BoundReport:
    if not A:
        raise EmptySetError("bounds need a nonempty set")
    if not isinstance(lambdas, DilateVector):
        lambdas = DilateVector(lambdas)
    p, n = A.p, A.card
    alpha = n / p
    plagne = None
    cs = sorted(lambdas.coeffs)
    if lambdas.k == 2 and cs[0] == 1 and cs[1] >= 2 and alpha < 0.5:
        plagne = plagne_f(cs[1], alpha) * n
    gr = green_ruzsa_diameter(alpha, p) if alpha < 1 else None
    return BoundReport(
        p=p,
        size=n,
        lambdas=str(lambdas),
        cd=cd_iterated(n, lambdas, p),
        bukh_main=lambdas.M * n,
        plagne=plagne,
        plagne_is_upper_estimate=plagne is not None,
        green_ruzsa_diameter=gr,
        actual=dilate_sum(A, lambdas).card if measure else None,
    )


def bounds_table(lams, alphas) -> list[dict]:
    """Rows for the ``bounds`` CSV: Plagne's f against the Bukh and CD ratios."""
    rows = []
    for lam in lams:
        for alpha in alphas:
            rows.append(
                {
                    "lambda": lam,
                    "alpha": alpha,
                    "plagne_f": plagne_f(lam, alpha),
                    "bukh_main_ratio": lam + 1,
                    "cd_ratio": 2.0 if alpha == 0 else min(2.0, 1 / alpha),
                }
            )
    return rows
