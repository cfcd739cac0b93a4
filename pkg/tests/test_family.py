from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import P, weight
from oracles import berkowitz_charpoly
from parahoric.evalmaps import ev_beta
from parahoric.family import (ChartError, FamilyError, TruncatedAffinoid, berkowitz, chi_omega, defect,
                              family_defects, family_eigensymbol, family_ev, local_chart, log_angle, padic_log,
                              sp_lambda, specialization_check, square_defect)
from parahoric.padic import INF, PadicNumber
from parahoric.weights import Weight

SAMPLES = [(162, 0), (0, -162), (162, 162)]


def ring(D=3, prec=10):
    return TruncatedAffinoid(weight((0, 0)), D=D, prec=prec)


def series_from(R, coeffs):
    out = R.zero()
    for m, c in zip(R.monomials, coeffs):
        term = R.const(c)
        for i, e in enumerate(m):
            for _ in range(e):
                term = term * R.var(i)
        out = out + term
    return out


# -- logarithms


def test_padic_log_series():
    # log(1 + p) = p - p^2/2 + p^3/3 - ...
    x = padic_log(1 + P, P, 8)
    want = sum(Fraction((-1) ** (k + 1) * P**k, k) for k in range(1, 40))
    assert (x - PadicNumber.make(want, P, 8)).is_zero()
    with pytest.raises(FamilyError):
        padic_log(2, P, 5)


@given(st.integers(0, 200), st.integers(0, 200))
def test_padic_log_is_a_homomorphism(a, b):
    x, y = 1 + P * a, 1 + P * b
    lhs = padic_log(x * y, P, 10)
    assert (lhs - padic_log(x, P, 10) - padic_log(y, P, 10)).is_zero()


def test_log_angle_kills_roots_of_unity():
    assert log_angle(-1, P, 10).is_zero()
    assert (log_angle(-4, P, 10) - log_angle(4, P, 10)).is_zero()
    with pytest.raises(FamilyError):
        log_angle(3, P, 5)


# -- the truncated ring


def test_ring_errors():
    with pytest.raises(FamilyError):
        TruncatedAffinoid(Weight.simple((0, 0), 2))
    with pytest.raises(NotImplementedError):
        TruncatedAffinoid(weight((0, 0, 0, 0)))
    R = ring()
    with pytest.raises(FamilyError):
        R.point(weight((1, 0)))  # tame character
    with pytest.raises(FamilyError):
        R.point(weight((18, 0)))  # outside the disc
    with pytest.raises(FamilyError):
        R.point(Weight.simple((54, 0), 5))


def test_sp_at_base_point_is_constant_term():
    R = ring()
    x = series_from(R, range(3, 3 + len(R.monomials)))
    assert (sp_lambda(x, weight((0, 0))) - 3).is_zero()


coeff_lists = st.lists(st.integers(-50, 50), min_size=10, max_size=10)


@given(coeff_lists, coeff_lists, st.sampled_from(SAMPLES))
def test_sp_is_a_ring_homomorphism(a, b, lam):
    R = ring()
    x, y = series_from(R, a), series_from(R, b)
    w = weight(lam)
    assert ((x * y).sp(R.point(w)) - sp_lambda(x, w) * sp_lambda(y, w)).is_zero()
    assert ((x + y).sp(R.point(w)) - sp_lambda(x, w) - sp_lambda(y, w)).is_zero()


def test_chi_omega_identity():
    R = ring()
    assert (chi_omega(R, 1, 1) - R.one()).is_zero()


def test_chi_omega_linear_term_is_the_log():
    R = ring()
    h1, h2 = 4, 7
    c = chi_omega(R, h1, h2)
    s = Fraction(P) ** R.s
    assert (c.c[(1, 0)] - log_angle(h1, P, 15) * s).is_zero()
    assert (c.c[(0, 1)] - log_angle(h2, P, 15) * s).is_zero()


def angle(u):
    return Fraction(u) if u % P == 1 else -Fraction(u)


@pytest.mark.parametrize("lam", SAMPLES)
@pytest.mark.parametrize("h", [(4, 7), (10, 1), (-2, 5)])
def test_chi_omega_specializes_to_the_character(lam, h):
    R = ring()
    w = weight(lam)
    h1, h2 = h
    got = sp_lambda(chi_omega(R, h1, h2), w)
    # the base weight is trivial, so only <h> = h / omega(h) survives
    want = angle(h1) ** lam[0] * angle(h2) ** lam[1]
    assert got.prec >= 8
    assert (got - PadicNumber.make(want, P, got.prec)).is_zero()


# -- berkowitz over the ring (dual route: rational Berkowitz oracle)


@given(st.lists(st.integers(-30, 30), min_size=9, max_size=9))
def test_ring_berkowitz_matches_oracle(entries):
    R = ring(D=1)
    A = [entries[0:3], entries[3:6], entries[6:9]]
    got = berkowitz([[R.const(x) for x in row] for row in A], R.zero(), R.one())
    want = berkowitz_charpoly(A)
    assert all((g.constant() - PadicNumber.make(w, P, R.prec)).is_zero() for g, w in zip(got, want))


# -- local charts


def test_chart_scalar_unit():
    R = ring()
    ch = local_chart([[R.const(5) + R.var(0)]], 1)
    assert ch.free_rank_one and ch.presentation() == "O_Omega"
    assert ch.to_json()["free_rank_one"] is True


def test_chart_split_off_slope_zero():
    R = ring(prec=12)
    T1, T2 = R.var(0), R.var(1)
    A = [[R.const(7) + T1, T2], [T1 * T2, R.const(99) + T2]]
    ch = local_chart(A, 1)
    assert ch.slopes == [0, 2] and ch.rank == 1
    # the factor x - r is the unit root of the base characteristic polynomial x^2 - 106 x + 693
    r = -ch.factor[0].constant()
    assert (r * r - r * 106 + 693).is_zero()
    # G * H recovers the characteristic polynomial over the ring
    G, H = ch.factor, ch.complement
    prod = [R.zero()] * (len(G) + len(H) - 1)
    for i, g in enumerate(G):
        for j, h in enumerate(H):
            prod[i + j] = prod[i + j] + g * h
    assert all((a - b).is_zero() for a, b in zip(prod, ch.charpoly))


def test_chart_crossing_is_not_free():
    R = TruncatedAffinoid(weight((0, 0)), D=3, prec=10)
    A = [[R.const(5), R.var(0)], [R.var(1), R.const(5)]]
    ch = local_chart(A, Fraction(1, 2))
    assert not ch.free_rank_one and ch.multiplicity == 2


def test_chart_polygon_touching_h():
    R = ring()
    with pytest.raises(ChartError):
        local_chart([[R.const(3)]], 1)
    with pytest.raises(ChartError):
        local_chart([], 1)


# -- the level-11 family


def test_family_is_an_eigensymbol(family11):
    assert family_defects(family11["fam"]) == INF


def test_family_base_is_the_lift(family11):
    fam = family11["fam"]
    assert (fam.alpha.constant() - PadicNumber.make(family11["stab"].alpha, P, fam.precision)).is_zero()
    base = fam.specialize_weight(weight((0, 0)))
    sp = base.space
    assert (sp.apply(sp.up(), base) - base.scale(family11["stab"].alpha)).is_zero()
    # the constant term of the family is the base symbol itself
    assert base.moment0_values() == [int(x) for x in fam.parts[(0, 0)][::sp.dim]]


def test_specialization_is_surjective(family11):
    rep = specialization_check(family11["fam"])
    assert rep["base_eigenspace_dim"] == 1 and rep["surjective"]


def test_family_chart_is_free(family11):
    fam = family11["fam"]
    ch = local_chart([[fam.alpha]], Fraction(1, 2))
    assert ch.free_rank_one and ch.slopes == [0]


@pytest.mark.parametrize("beta", [2, 3])
def test_commuting_square(family11, beta):
    res = square_defect(family11["fam"], beta, [weight(l) for l in SAMPLES])
    for lam in SAMPLES:
        d, digits = res[lam]
        assert d == INF and digits >= 6


def test_square_detects_a_wrong_weight(family11):
    fam = family11["fam"]
    left = family_ev(fam, 2).specialize(weight(SAMPLES[0]))
    right = ev_beta(fam.specialize_weight(weight(SAMPLES[2])), 2, nmom=fam.ops.fmod.M)
    assert defect(left, right) < 6


def test_constant_family_reduces_to_single_weight():
    from parahoric.modsym import hecke_classical, lift_noncritical, p_stabilise
    M = 5
    st_ = p_stabilise(hecke_classical(11).rational[0], P, prec=M + 4)
    Phi0 = lift_noncritical(st_, M)
    R0 = TruncatedAffinoid(weight((0, 0)), D=0, prec=M)
    f0 = family_eigensymbol(st_.N, R0, M, Phi0, st_.alpha % P**M)
    for b in (1, 2):
        assert family_ev(f0, b).constant_term().agrees(ev_beta(Phi0, b, nmom=M))


def test_zero_family_evaluates_to_zero(family11):
    from dataclasses import replace
    fam = family11["fam"]
    zero = replace(fam, parts={m: [0] * len(v) for m, v in fam.parts.items()})
    assert family_ev(zero, 1).is_zero()
