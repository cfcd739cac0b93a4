import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import WEIGHT_FIXTURES, weight
from oracles import branching_multiplicity, leibniz_det
from parahoric.padic import PadicNumber
from parahoric.reprs import (DualVector, ReprError, branching_hom_dimension, build_irrep, build_VH,
                             deterministic_matrices, det_int, diagonal_invariant, kappa_j_functional,
                             nu_vector, restriction_formula, weyl_dimension)
from parahoric.weights import WeightError, crit_range

P = 3
Q = P**20


def unimodular_samples(n, count, seed):
    """Integer matrices with det = +-1 built from elementary moves."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        g = [[int(i == j) for j in range(n)] for i in range(n)]
        for _ in range(4 * n):
            i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
            if i == j:
                g[0][0] = -g[0][0]
                continue
            c = rng.randint(-2, 2)
            for k in range(n):
                g[i][k] += c * g[j][k]
        out.append(g)
    return out


# -- irreducible representations


def test_gl1_character():
    rep = build_irrep((3,), p=P)
    assert rep.dim == 1
    assert rep.evaluate(rep.basis[0], [[5]]) == 125


@pytest.mark.parametrize("lam,dim", [((1, 0), 2), ((2, 0), 3), ((2, 1, 0), 8), ((1, 0, 0, -1), 15)])
def test_weyl_dimension(lam, dim):
    assert weyl_dimension(lam) == dim
    assert build_irrep(lam, p=P).dim == dim


def test_irrep_basis_independent():
    assert build_irrep((2, 1, 0), p=P).independence_check()


@pytest.mark.parametrize("lam", [(2, 0), (1, 0, -1), (2, 1, 0)])
def test_action_is_a_homomorphism(lam):
    rep = build_irrep(lam, p=P)
    m = len(lam)
    g, h = deterministic_matrices(m, 2, P)
    prod = [[sum(g[i][k] * h[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
    A, B, C = rep.action_matrix(g), rep.action_matrix(h), rep.action_matrix(prod)
    assert ((A @ B) + C.scale(-1)).is_zero()


def test_det_matches_leibniz():
    for g in deterministic_matrices(3, 5, P):
        assert det_int(g) == leibniz_det(g)


@pytest.mark.parametrize("lam,dim", [((2, 0), 1), ((1, 0, 0, -1), 4), ((0, 0, 0, 0), 1), ((2, 1, -1, -2), 4)])
def test_VH_dimension(lam, dim):
    assert build_VH(weight(lam)).dim == dim


def test_VH_character_n1():
    VH = build_VH(weight((2, 0)))
    A = VH.action_matrix([[[5]], [[7]]])
    assert A.rows[0][0] == 25


# -- diagonal invariant


@pytest.mark.parametrize("lam", [(0, 0), (2, 0), (3, -1), (0, 0, 0, 0), (1, 0, 0, -1), (1, 1, 0, 0)])
def test_diagonal_invariant_transforms_by_det_power(lam):
    w = weight(lam)
    VH = build_VH(w)
    v = diagonal_invariant(VH, w.w)
    assert any(v)
    for h in unimodular_samples(w.n, 6, seed=hash(lam) % 1000) + [[[2] + [0] * (w.n - 1)] + [[0] * k + [1] + [0] * (w.n - 1 - k) for k in range(1, w.n)]]:
        A = VH.action_matrix([h] * len(VH.blocks))
        dw = Fraction(det_int(h)) ** w.w
        dq = dw.numerator * pow(dw.denominator, -1, Q) % Q
        for i in range(VH.dim):
            assert (sum(A.rows[i][j] * v[j] for j in range(VH.dim)) - dq * v[i]) % Q == 0


def test_diagonal_invariant_trivial():
    assert diagonal_invariant(build_VH(weight((0, 0))), 0) == [1]


def test_diagonal_invariant_identity_element():
    # V_(1,0) (x) V_(0,-1) is End(std); the invariant is the identity up to sign
    v = diagonal_invariant(build_VH(weight((1, 0, 0, -1))), 0)
    assert sorted(abs(x) for x in v) == [0, 0, 1, 1]


# -- branching


@pytest.mark.parametrize("lam", WEIGHT_FIXTURES)
def test_branching_matches_littlewood_richardson(lam):
    w = weight(lam)
    crit = crit_range(w)
    for j in range(crit[0] - 1, crit[-1] + 2):
        got = branching_hom_dimension(w, j)
        assert got == branching_multiplicity(lam, j)
        assert got == (1 if j in crit else 0)


def test_branching_examples():
    assert branching_hom_dimension(weight((2, 0)), -1) == 1
    assert branching_hom_dimension(weight((2, 0)), 1) == 0
    w = weight((1, 0, 0, -1))
    assert [branching_hom_dimension(w, j) for j in (-1, 0, 1)] == [0, 1, 0]


# -- nu vectors


@pytest.mark.parametrize("j", [-2, -1, 0])
def test_nu_n1_is_signed_monomial(j):
    nu = nu_vector(weight((2, 0)), j)
    for x in (2, 5, 7, -4):
        got = nu.restriction([[x]], ([[1]], [[1]]))
        assert (got - (-1) ** j * x ** (j + 2)).is_zero()


def test_nu_trivial_weight():
    nu = nu_vector(weight((0, 0)), 0)
    assert nu.poly == {(0, 0, 0, 0): 1}


def test_nu_n2_polynomial_in_X():
    nu = nu_vector(weight((1, 0, 0, -1)), 0)
    one = [[1, 0], [0, 1]]
    X0 = [[1, 2], [3, -1]]
    vals = [nu.restriction([[t * x for x in r] for r in X0], (one, one)).lift() for t in range(5)]
    # degree at most two along a line: third differences vanish
    d = vals
    for _ in range(3):
        d = [b - a for a, b in zip(d, d[1:])]
    assert all(x == 0 for x in d)
    assert len(set(vals)) > 1


def test_nu_rejects_non_critical():
    with pytest.raises(WeightError):
        nu_vector(weight((2, 0)), 1)


def _h_equivariance_samples(n, count):
    hs = unimodular_samples(n, 2 * count, seed=17 + n)
    # include non-unimodular elements with unit determinant
    extra = [[[2 if i == j == 0 else int(i == j) for j in range(n)] for i in range(n)]]
    hs = extra + hs
    return [(hs[2 * k], hs[2 * k + 1]) for k in range(count)]


@pytest.mark.parametrize("lam", [(2, 0), (3, -1), (1, 0, 0, -1), (1, 1, 0, 0), (2, 1, -1, -2)])
def test_nu_equivariance(lam):
    w = weight(lam)
    n, m = w.n, 2 * w.n
    for j in crit_range(w):
        nu = nu_vector(w, j)
        gs = unimodular_samples(m, 20, seed=5)
        for g, (h1, h2) in zip(gs, _h_equivariance_samples(n, 20)):
            hd = [[0] * m for _ in range(m)]
            for i in range(n):
                for k in range(n):
                    hd[i][k] = h1[i][k]
                    hd[n + i][n + k] = h2[i][k]
            gh = [[sum(g[i][t] * hd[t][k] for t in range(m)) for k in range(m)] for i in range(m)]
            chi = Fraction(det_int(h1)) ** (-j) * Fraction(det_int(h2)) ** (w.w + j)
            assert (nu.value(gh) - nu.value(g) * chi).is_zero()


@pytest.mark.parametrize("lam", [(2, 0), (4, 0), (1, 0, 0, -1), (2, 1, -1, -2)])
def test_nu_restriction_formula(lam):
    w = weight(lam)
    n = w.n
    VH = build_VH(w)
    v = diagonal_invariant(VH, w.w)
    for j in crit_range(w):
        nu = nu_vector(w, j)
        q = P**nu.N
        mats = unimodular_samples(n, 60, seed=99)
        for k in range(20):
            X, hs = mats[3 * k], (mats[3 * k + 1], mats[3 * k + 2])
            want = PadicNumber.from_residue(restriction_formula(w, j, X, hs, VH, v, q), P, nu.N)
            assert (nu.restriction(X, hs) - want).is_zero()


def test_eigenlines_for_different_j_share_the_diagonal_invariant():
    # the restriction formula uses one v_lambda for every j; each nu is nonzero there
    w = weight((2, 1, -1, -2))
    for j in crit_range(w):
        nu = nu_vector(w, j)
        assert any(c % P**nu.N for c in nu.poly.values())


# -- kappa_j


def test_kappa_dual_vector():
    w = weight((2, 0))
    rep = build_irrep((2, 0), p=P)
    nu = nu_vector(w, -1)
    c = rep.coords(nu.poly)
    # the dual basis vector of the middle basis element (the function x)
    mu = DualVector(rep, [0, 1, 0])
    assert (kappa_j_functional(mu, w, -1) - (-1)).is_zero()
    orth = DualVector(rep, [1, 0, 1])
    assert kappa_j_functional(orth, w, -1).is_zero()
    i = next(k for k, x in enumerate(c) if x)
    dual = [0, 0, 0]
    dual[i] = pow(c[i], -1, Q)
    assert (kappa_j_functional(DualVector(rep, dual), w, -1) - 1).is_zero()


def test_kappa_host_mismatch():
    rep = build_irrep((4, 0), p=P)
    with pytest.raises(ReprError):
        kappa_j_functional(DualVector(rep, [0] * rep.dim), weight((2, 0)), -1)


@given(st.lists(st.integers(-30, 30), min_size=3, max_size=3))
def test_kappa_is_linear(coeffs):
    w = weight((2, 0))
    rep = build_irrep((2, 0), p=P)
    a = kappa_j_functional(DualVector(rep, coeffs), w, 0)
    b = kappa_j_functional(DualVector(rep, [2 * x for x in coeffs]), w, 0)
    assert (b - a * 2).is_zero()
