import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from parahoric.padic import PadicNumber
from parahoric.weights import (RefinementData, Weight, WeightError, contragredient, crit_range,
                               integral_normalizer, non_q_critical_slope_check, normalizer_exponent,
                               regularity_flags, slope_bound)


def W(lam, p=3):
    return Weight.simple(lam, p)


@pytest.mark.parametrize("lam,crit", [
    ((0, 0), [0]),
    ((4, 0), [-4, -3, -2, -1, 0]),
    ((2, 1, -1, -2), [-1, 0, 1]),
])
def test_crit_range(lam, crit):
    assert crit_range(W(lam)) == crit


@pytest.mark.parametrize("k", [2, 3, 6, 12])
def test_crit_range_classical_strip(k):
    c = crit_range(W((k - 2, 0)))
    assert c == list(range(-(k - 2), 1)) and len(c) == k - 1


def test_non_pure_rejected():
    with pytest.raises(WeightError):
        Weight.simple((2, 1, 0, 0))
    lam = Weight(p=3, n=2, lam=((2, 1, 0, 0),), pure=False)
    with pytest.raises(WeightError):
        crit_range(lam)


def test_non_dominant_rejected():
    with pytest.raises(WeightError):
        Weight.simple((0, 2))


def test_contragredient():
    assert contragredient(W((0, 0))).lam == ((0, 0),)
    assert contragredient(W((2, 0))).lam == ((0, -2),)
    assert contragredient(W((2, 1, -1, -2))).lam == ((2, 1, -1, -2),)


def test_integral_normalizer():
    assert normalizer_exponent(W((4, 0))) == 0
    assert integral_normalizer(W((4, 0))) == 1
    assert integral_normalizer(W((0, 0, 0, 0))) == 1
    x = integral_normalizer(W((2, 1, -1, -2)))
    assert x.val == 3 and x == 27


@pytest.mark.parametrize("lam", [(2, 0), (3, -1), (2, 1, -1, -2), (1, 0, 0, -1), (5, 3)])
def test_normalizer_times_contragredient(lam):
    # checked per example: the exponents add up to -sum(lam_i + lam^v_i) over the second half
    w = W(lam)
    wv = contragredient(w)
    got = (integral_normalizer(w) * integral_normalizer(wv)).val
    n = w.n
    assert got == -sum(w.lam[0][n:]) - sum(wv.lam[0][n:])


def test_slope_check_examples():
    res = non_q_critical_slope_check(W((4, 0)), {"p": 0})
    assert res["p"] == (True, 5)
    assert non_q_critical_slope_check(W((0, 0)), {"p": 1})["p"] == (False, 1)
    assert non_q_critical_slope_check(W((2, 1, -1, -2)), {"p": 1})["p"] == (True, 3)


def test_slope_check_from_refinement():
    lam = W((2, 1, -1, -2))
    ref = RefinementData.from_circ(lam, {"p": PadicNumber.make(3, 3, 20)})
    assert ref.alpha["p"].val == -2
    assert ref.alpha_circ("p").val == 1
    assert non_q_critical_slope_check(lam, ref)["p"] == (True, 3)


@pytest.mark.parametrize("lam,flags", [
    ((0, 0, 0, 0), (False, False)),
    ((2, 1, -1, -2), (True, True)),
    ((1, 0, 0, -1), (False, True)),
])
def test_regularity(lam, flags):
    f = regularity_flags(W(lam))
    assert (f["regular"], f["H-regular"]) == flags


def test_json_round_trip():
    lam = W((2, 1, -1, -2))
    assert Weight.from_json(json.dumps(lam.to_json())) == lam
    with pytest.raises(WeightError):
        Weight.from_json({"p": 3, "n": 1})


def test_totally_real_weight():
    lam = Weight(p=5, n=1, lam=((2, 0), (4, -2)), sigma_to_prime=("p1", "p2"), e={"p1": 1, "p2": 1})
    assert lam.d == 2 and lam.w == 2
    assert crit_range(lam) == [-2, -1, 0]
    assert normalizer_exponent(lam, "p2") == 2


dominant_pairs = st.tuples(st.integers(-6, 6), st.integers(0, 8)).map(lambda t: (t[0] + t[1], t[0]))


@given(dominant_pairs)
def test_crit_size_n1(lam):
    assert len(crit_range(W(lam))) == lam[0] - lam[1] + 1


@given(st.integers(-4, 4), st.integers(0, 3), st.integers(0, 3))
def test_contragredient_involution_and_purity(a, b, c):
    lam = (a + b + c, a + b, a - b, a - b - c)
    w = W(lam)
    assert contragredient(contragredient(w)) == w
    assert contragredient(w).w == -w.w
    assert crit_range(contragredient(w)) == [-j for j in reversed(crit_range(w))]


@given(dominant_pairs, st.integers(0, 6))
def test_slope_bound_n1(lam, h):
    ok, bound = non_q_critical_slope_check(W(lam), {"p": Fraction(h)})["p"]
    assert bound == slope_bound(W(lam)) == lam[0] - lam[1] + 1
    assert ok == (h < bound)
