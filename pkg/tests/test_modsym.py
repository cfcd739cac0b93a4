from fractions import Fraction

import numpy as np
import sympy
import pytest

from conftest import P, weight
from oracles import CURVES, curve_11a_ap, curve_ap
from parahoric.modsym import (ClassicalSpace, DistributionSymbolSpace, SymbolError, hecke_classical,
                              hensel_root, lift_noncritical, p_stabilise, trace_of_hecke)
from parahoric.padic import PadicMatrix, kernel_mod_pN
from parahoric.pardist import DistributionModule


def test_level11_eigenvalues_are_point_counts():
    dec = hecke_classical(11)
    assert len(dec.rational) == 1 and len(dec.eisenstein) == 1
    sym = dec.rational[0]
    for ell, a in sym.eigenvalues.items():
        assert a == curve_11a_ap(ell)


@pytest.mark.parametrize("label", ["14a", "15a", "43a"])
def test_single_newform_levels(label):
    N, coeffs = CURVES[label]
    got = hecke_classical(N).rational
    assert len(got) == 1
    for ell, a in got[0].eigenvalues.items():
        assert a == curve_ap(coeffs, ell)


def test_level37_has_two_rational_forms():
    got = sorted(tuple(s.eigenvalues.items()) for s in hecke_classical(37).rational)
    want = sorted(tuple((ell, Fraction(curve_ap(CURVES[k][1], ell))) for ell, _ in got[0]) for k in ("37a", "37b"))
    assert got == want


def test_minus_part_has_no_eisenstein_line():
    dec = hecke_classical(11, sign=-1)
    assert len(dec.eisenstein) == 0
    assert dec.rational[0].eigenvalues == hecke_classical(11).rational[0].eigenvalues


def test_43_reports_the_quadratic_system():
    x = sympy.Symbol("x")
    assert [sympy.expand(c - (x**2 - 2)) for c in hecke_classical(43).irrational] == [0]


@pytest.mark.parametrize("ell", [2, 3, 5, 7, 13])
def test_trace_matches_the_single_newform(ell):
    assert trace_of_hecke(11, ell) == curve_11a_ap(ell)


def test_trace_level37():
    for ell in (2, 3, 5):
        assert trace_of_hecke(37, ell) == sum(curve_ap(CURVES[k][1], ell) for k in ("37a", "37b"))


def test_level_one_is_empty():
    dec = hecke_classical(1)
    assert dec.rational == [] and dec.eisenstein == []


@pytest.mark.parametrize("N", [51, 12, 49])
def test_unsupported_levels(N):
    with pytest.raises(SymbolError):
        hecke_classical(N)


def test_hensel_root():
    # x^2 + x + 3 has the unit root near 2 mod 3
    r = hensel_root([3, 1, 1], 2, 3, 10)
    assert (r * r + r + 3) % 3**10 == 0 and r % 3 == 2
    with pytest.raises(SymbolError):
        hensel_root([0, 0, 1], 0, 3, 5)


def test_stabilisation_is_up_eigen(level11):
    st = level11["stab"]
    q = P**st.prec
    # alpha is the unit root of x^2 - a_3 x + 3
    assert (st.alpha**2 + st.alpha + 3) % q == 0 and st.alpha % P
    big = ClassicalSpace(33)
    U = big.operator([((P, a), (0, 1)) for a in range(P)])
    c = big.coordinates([Fraction(v) for v in st.values])
    img = big.combination([Fraction(str(x)) for x in U * sympy.Matrix([str(x) for x in c])])
    for x, v in zip(img, st.values):
        e = Fraction(x) - st.alpha * v
        assert e.denominator % P and e.numerator % q == 0
    assert any(v % P for v in st.values)


def test_p_dividing_level_rejected():
    with pytest.raises(SymbolError):
        p_stabilise(hecke_classical(15).rational[0], 3)


def test_relation_corank_matches_classical_dimension():
    # with only the total-mass moment the relation kernel mod p^N is the classical space at level 33
    mod = DistributionModule(weight((0, 0)), 1, 4)
    sp = DistributionSymbolSpace(33, mod)
    R = sp.relation_matrix()
    ker = kernel_mod_pN(PadicMatrix.from_array(R.astype(object), P, 4))
    assert len(ker) == ClassicalSpace(33).dim


def test_space_rejects_bad_levels():
    with pytest.raises(SymbolError):
        DistributionSymbolSpace(11, DistributionModule(weight((0, 0)), 3))
    with pytest.raises(NotImplementedError):
        DistributionSymbolSpace(33, DistributionModule(weight((0, 0, 0, 0)), 2))


def test_lift_postconditions(level11):
    Phi, st, M = level11["Phi"], level11["stab"], level11["M"]
    sp = Phi.space
    assert not any(int(t) for t in sp.relation_defect(Phi))
    assert Phi.moment0_values() == [v % P**M for v in st.values]
    diff = sp.apply(sp.up(), Phi) - Phi.scale(st.alpha)
    assert diff.is_zero()
    assert all(Phi.value(i).is_integral() for i in range(sp.ncos))


def test_lift_defects_increase(level11):
    d = level11["defects"]
    assert d == sorted(d) and d[-1] == level11["M"]


def test_lift_is_hecke_eigen(level11):
    Phi = level11["Phi"]
    sp = Phi.space
    for ell in (2, 5):
        a = int(curve_11a_ap(ell))
        assert (sp.apply(sp.hecke(ell), Phi) - Phi.scale(a)).is_zero()


def test_lift_fixed_point_is_stable(level11):
    # one more U_p / alpha step leaves the converged lift unchanged
    Phi, st = level11["Phi"], level11["stab"]
    sp = Phi.space
    ainv = pow(st.alpha, -1, P**level11["M"])
    assert (sp.apply(sp.up(), Phi).scale(ainv) - Phi).is_zero()


def test_non_ordinary_refinement_rejected(level11):
    st = level11["stab"]
    bad = p_stabilise(st.source, P, prec=10, unit_root=False)
    assert bad.alpha % P == 0
    with pytest.raises(SymbolError):
        lift_noncritical(bad, 5)


def test_zero_symbol():
    mod = DistributionModule(weight((0, 0)), 3)
    sp = DistributionSymbolSpace(33, mod)
    z = sp.zero()
    assert z.is_zero() and z.min_scaled_valuation() == 3
    assert not np.any(sp.relation_defect(z))
