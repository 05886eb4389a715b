from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

import naive
from sumdilates import circle
from sumdilates.circle import IntervalSet, discretize, dilate_mod1, fatten, measure, preimage_mod1, prune_to_avoid
from sumdilates.errors import InvalidDilateError, SetFileError, WindowError
from sumdilates.zp import ZpSet, difference_window, dilate, sumset


def I(*pieces):
    return IntervalSet.of(*pieces)


rationals = st.builds(F, st.integers(0, 96), st.just(96)) | st.fractions(0, 1, max_denominator=50)


@st.composite
def interval_sets(draw, max_pieces=6):
    pts = draw(st.lists(rationals, min_size=0, max_size=2 * max_pieces))
    pts = sorted(set(pts))
    return IntervalSet.of(*[(pts[i], pts[i + 1]) for i in range(0, len(pts) - 1, 2)])


points = st.fractions(0, 1, max_denominator=997).filter(lambda x: x < 1)
nonzero_lams = st.integers(-5, 5).filter(bool)


# -- examples ---------------------------------------------------------------


def test_measure_examples():
    assert measure(I((0, F(1, 4)))) == F(1, 4)
    assert measure(IntervalSet.empty()) == 0
    assert measure(I((0, F(1, 8)), (F(1, 2), F(5, 8)))) == F(1, 4)


def test_dilate_examples():
    assert dilate_mod1(I((0, F(1, 4))), 2) == I((0, F(1, 2)))
    assert dilate_mod1(I((F(3, 8), F(1, 2))), 2) == I((F(3, 4), 1))
    img = dilate_mod1(I((F(1, 2), F(5, 8))), 2)
    assert img == I((0, F(1, 4)))
    # sampled points of [0,1/4) each have a preimage in [1/2,5/8)
    for k in range(32):
        y = F(k, 128)
        assert any(F(1, 2) <= (y + j) / 2 < F(5, 8) for j in range(2)) == (y in img)


def test_boolean_examples():
    assert I((0, F(1, 2))) & I((F(1, 4), F(3, 4))) == I((F(1, 4), F(1, 2)))
    assert circle.complement(IntervalSet.full()) == IntervalSet.empty()
    merged = I((0, F(1, 4))) | I((F(1, 4), F(1, 2)))
    assert merged.intervals == ((0, F(1, 2)),)


def test_fatten_examples():
    assert fatten(I((F(1, 4), F(1, 2))), F(1, 8)) == I((F(1, 8), F(5, 8)))
    assert fatten(IntervalSet.empty(), F(1, 3)) == IntervalSet.empty()
    S = I((0, F(1, 8)), (F(1, 2), F(5, 8)))
    fat = fatten(S, F(1, 16))
    assert fat == I((F(15, 16), 1), (0, F(3, 16)), (F(7, 16), F(11, 16)))
    assert measure(fat) == F(1, 2) == measure(S) + 2 * F(1, 16) * len(S)


def test_discretize_examples():
    assert list(discretize(I((0, F(1, 2))), 7)) == [0, 1, 2, 3]
    assert list(discretize(I((F(1, 3), F(2, 3))), 7)) == [3, 4]
    assert [x for x in range(7) if 7 * F(1, 3) <= x < 7 * F(2, 3)] == [3, 4]
    assert not discretize(IntervalSet.empty(), 7)


def test_prune_examples():
    A = ZpSet.from_elements(11, [1, 2, 3])
    res = prune_to_avoid(A, 1, -1, 0)
    assert res.set == A and res.deleted == 0
    assert 0 not in sumset(A, A)
    res = prune_to_avoid(ZpSet.full(13), 1, 1, 0)
    assert not res.set and res.deleted == 13


def test_invalid_inputs():
    with pytest.raises(InvalidDilateError):
        dilate_mod1(I((0, F(1, 2))), 0)
    with pytest.raises(InvalidDilateError):
        preimage_mod1(I((0, F(1, 2))), 0)
    with pytest.raises(WindowError):
        fatten(I((0, F(1, 2))), F(-1, 3))
    with pytest.raises(ValueError):
        IntervalSet(((F(1, 2), F(1, 4)),))
    with pytest.raises(ValueError):
        IntervalSet(((0, F(1, 4)), (F(1, 4), F(1, 2))))


def test_interval_file_format():
    S = I((F(1, 3), F(1, 2)), (F(3, 4), 1))
    text = circle.format_intervals(S)
    assert text == "1/3 1/2\n3/4 1/1\n"
    assert circle.parse_intervals("# header\n" + text) == S
    for bad in ("1/3\n", "a b\n", "1/2 1/3\n", "1/0 1/2\n", "0 3/2\n"):
        with pytest.raises(SetFileError):
            circle.parse_intervals(bad)


# -- exact properties --------------------------------------------------------


@given(interval_sets(), interval_sets(), interval_sets())
def test_boolean_identities(S, T, U):
    full = IntervalSet.full()
    assert circle.complement(S | T) == circle.complement(S) & circle.complement(T)
    assert circle.complement(S & T) == circle.complement(S) | circle.complement(T)
    assert (S | T) | U == S | (T | U)
    assert (S & T) & U == S & (T & U)
    assert S & (T | U) == (S & T) | (S & U)
    assert S | circle.complement(S) == full
    assert measure(S | T) + measure(S & T) == measure(S) + measure(T)
    assert circle.is_subset(S - T, S)


@given(interval_sets(), points, points)
def test_membership_matches_pieces(S, x, y):
    T = I((min(x, y), max(x, y)))
    for z in (x, y, (x + y) / 2):
        assert (z in S | T) == (naive.in_intervals(z, S.intervals) or naive.in_intervals(z, T.intervals))
        assert (z in S & T) == (naive.in_intervals(z, S.intervals) and naive.in_intervals(z, T.intervals))


@given(interval_sets(), nonzero_lams, points)
def test_dilate_and_preimage_pointwise(S, lam, y):
    n = abs(lam)
    # negative λ reverses orientation, so [a, b) pulls back to (., .]; compare off endpoints
    ends = {e for piece in S for e in piece} | {F(0), F(1)}
    roots = [circle.frac((y + k) / lam) for k in range(n)]
    if lam > 0:
        assert (y in dilate_mod1(S, lam)) == any(r in S for r in roots)
    elif y in ends or any(r in {circle.frac(e) for e in ends} for r in roots):
        return
    else:
        assert (y in dilate_mod1(S, lam)) == any(r in S for r in roots)
    if lam < 0 and circle.frac(lam * y) in ends:
        return
    assert (y in preimage_mod1(S, lam)) == (circle.frac(lam * y) in S)


@given(interval_sets(), nonzero_lams)
def test_dilate_measure_bounds(S, lam):
    img = dilate_mod1(S, lam)
    assert measure(S) <= measure(img) <= min(1, abs(lam) * measure(S))
    assert circle.is_subset(S, preimage_mod1(img, lam)) or lam < 0
    assert measure(preimage_mod1(S, lam)) == measure(S)


@given(interval_sets(), st.fractions(0, F(1, 4), max_denominator=64))
def test_fatten_measure(S, r):
    fat = fatten(S, r)
    assert circle.is_subset(S, fat)
    assert measure(fat) <= measure(S) + 2 * r * len(S)


@given(interval_sets(), st.sampled_from([7, 11, 101, 1009]))
def test_discretize_pointwise(S, p):
    A = discretize(S, p)
    assert set(A) == {x for x in range(p) if F(x, p) in S}


@settings(max_examples=40)
@given(interval_sets(max_pieces=20), st.sampled_from([10007, 100003]))
def test_discretize_count(S, p):
    n = discretize(S, p).card
    K = len(S)
    assert measure(S) * p - K <= n <= measure(S) * p + K


@given(st.sampled_from([11, 13, 31, 101]), st.data())
def test_prune_creates_window(p, data):
    xs = data.draw(st.sets(st.integers(0, p - 1), min_size=1, max_size=p))
    lam1 = data.draw(st.integers(1, p - 1))
    lam2 = data.draw(st.integers(1, p - 1))
    t = data.draw(st.integers(0, 3))
    A = ZpSet.from_elements(p, xs)
    res = prune_to_avoid(A, lam1, lam2, t)
    assert set(res.set) <= set(A) and res.deleted == A.card - res.set.card
    if res.set:
        assert difference_window(dilate(res.set, lam1), dilate(res.set, lam2), t)
    # every deleted point really was in conflict with the original set
    for x in set(A) - set(res.set):
        assert any((lam1 * x - lam2 * y - w) % p == 0 for y in A for w in range(-t, t + 1))


@settings(max_examples=40, deadline=None)
@given(interval_sets(), st.sampled_from([(1, 2), (1, 3), (1, -2), (2, 3), (1, -3)]), st.sampled_from([1009, 10007]), st.integers(0, 4))
def test_transference_end_to_end(S, lams, p, t):
    lam1, lam2 = lams
    # make the two images disjoint on the circle first
    S = S - preimage_mod1(dilate_mod1(S, lam2), lam1)
    assume(S)
    assert not (dilate_mod1(S, lam1) & dilate_mod1(S, lam2))
    K = len(S)
    eps = F(K * (t + 2), p)
    res = prune_to_avoid(discretize(S, p), lam1, lam2, t)
    if res.set:
        assert difference_window(dilate(res.set, lam1), dilate(res.set, lam2), t)
    assert res.set.card >= (measure(S) - 2 * (abs(lam1) + abs(lam2)) * eps) * p


def test_discretize_matches_numpy_floor():
    rng = np.random.default_rng(7)
    pts = sorted({F(int(v), 1000) for v in rng.integers(0, 1000, 30)})
    S = I(*[(pts[i], pts[i + 1]) for i in range(0, len(pts) - 1, 2)])
    p = 10007
    want = np.zeros(p, dtype=bool)
    for a, b in S:
        xs = np.arange(p)
        want |= (xs * a.denominator >= a.numerator * p) & (xs * b.denominator < b.numerator * p)
    assert np.array_equal(discretize(S, p).to_array(), want)
