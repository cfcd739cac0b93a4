"""Independent reference computations used to freeze expected values.

Nothing here imports the package's linear algebra or series code: each oracle
takes a different route (exact rationals, sympy, combinatorics, point counts).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import sympy


# ---------------------------------------------------------------------------
# characteristic polynomials


def berkowitz_charpoly(A):
    """det(x I - A) over Q, coefficients low -> high, by Berkowitz's algorithm."""
    A = [[Fraction(x) for x in row] for row in A]
    n = len(A)
    # C holds the Toeplitz products; start with the 1x1 leading block
    poly = [Fraction(1), -A[0][0]]  # high -> low for the leading block
    for k in range(1, n):
        R = A[k][:k]
        S = [A[i][k] for i in range(k)]
        Aprev = [row[:k] for row in A[:k]]
        a = A[k][k]
        # column of the Toeplitz matrix: 1, -a, -R S, -R A S, -R A^2 S, ...
        col = [Fraction(1), -a]
        v = S[:]
        for _ in range(k):
            col.append(-sum(r * x for r, x in zip(R, v)))
            v = [sum(Aprev[i][j] * v[j] for j in range(k)) for i in range(k)]
        new = []
        for i in range(k + 2):
            new.append(sum(col[i - j] * poly[j] for j in range(len(poly)) if 0 <= i - j < len(col)))
        poly = new
    return list(reversed(poly))


def cofactor_charpoly(A):
    """det(x I - A) by Laplace expansion with polynomial entries (lists, low -> high)."""
    n = len(A)
    M = [[[Fraction(-A[i][j])] + ([Fraction(1)] if i == j else []) for j in range(n)] for i in range(n)]
    return _trim(_det_poly(M))


def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _trim(a):
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _det_poly(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    tot = [Fraction(0)]
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = _pmul(M[0][j], _det_poly(minor))
        if j % 2:
            term = [-x for x in term]
        tot = _padd(tot, term)
    return tot


def leibniz_det(A):
    """Determinant by the permutation expansion."""
    n = len(A)
    tot = Fraction(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = Fraction(1)
        for i, j in enumerate(perm):
            prod *= Fraction(A[i][j])
        tot += -prod if inv % 2 else prod
    return tot


# ---------------------------------------------------------------------------
# the n = 1 distribution action, function side


def n1_action_matrix(lam, g, M, p, N):
    """Scaled moment matrix of g on D_lam (n = 1) from a sympy series expansion.

    (g^-1 * f)(x) = scalar (a + c x)^(l1 - l2) f((b + d x)/(a + c x)) with
    (a b; c d) = g^-1 normalised by p^v(a); scaled entry [i][j] is
    p^(i - j) times the x^j coefficient of g^-1 * x^i.
    """
    l1, l2 = lam
    x = sympy.Symbol("x")
    G = sympy.Matrix([[sympy.Rational(str(Fraction(e))) for e in row] for row in g])
    Gi = G.inv()
    a, b, c, d = Gi[0, 0], Gi[0, 1], Gi[1, 0], Gi[1, 1]
    e = sympy.multiplicity(p, a) if a.q == 1 else sympy.multiplicity(p, a.p) - sympy.multiplicity(p, a.q)
    pe = sympy.Integer(p) ** e
    detgi = Gi.det()
    r = -(sympy.multiplicity(p, detgi.p) - sympy.multiplicity(p, detgi.q))
    scalar = pe ** (l1 - l2) * detgi**l2 * sympy.Integer(p) ** (r * l1)
    den = a / pe + c / pe * x
    num = b / pe + d / pe * x
    q = p**N
    rows = []
    for i in range(M):
        f = scalar * den ** (l1 - l2) * (num / den) ** i
        ser = sympy.series(f, x, 0, M).removeO()
        poly = sympy.Poly(ser, x)
        row = []
        for j in range(M):
            coef = sympy.Rational(poly.coeff_monomial(x**j)) * sympy.Integer(p) ** (i - j)
            row.append(int(coef.p) * pow(int(coef.q), -1, q) % q)
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# branching multiplicities through Littlewood-Richardson coefficients


def lr_coefficient(lam, mu, nu):
    """c^lam_{mu, nu}: LR tableaux of shape lam/mu and content nu."""
    lam = [x for x in lam if x]
    mu = [x for x in mu if x]
    nu = [x for x in nu if x]
    if sum(lam) != sum(mu) + sum(nu) or len(mu) > len(lam) or any(m > l for m, l in zip(mu, lam)):
        return 0
    mu = mu + [0] * (len(lam) - len(mu))
    cells = [(r, c) for r in range(len(lam)) for c in range(mu[r], lam[r])]
    # fill row by row, right to left within a row (reverse reading word order)
    order = [(r, c) for r in range(len(lam)) for c in reversed(range(mu[r], lam[r]))]
    fill = {}
    count = [0] * (len(nu) + 1)

    def ok(r, c, v):
        if c + 1 < lam[r] and (r, c + 1) in fill and fill[(r, c + 1)] < v:
            return False
        if r > 0 and (r - 1, c) in fill and fill[(r - 1, c)] >= v:
            return False
        if r > 0 and c >= mu[r - 1] and c < lam[r - 1] and (r - 1, c) not in fill:
            return False
        # lattice condition on the reverse reading word
        if v > 1 and count[v] + 1 > count[v - 1]:
            return False
        return True

    def rec(k):
        if k == len(order):
            return 1
        r, c = order[k]
        tot = 0
        for v in range(1, len(nu) + 1):
            if count[v] >= nu[v - 1] or not ok(r, c, v):
                continue
            fill[(r, c)] = v
            count[v] += 1
            tot += rec(k + 1)
            count[v] -= 1
            del fill[(r, c)]
        return tot

    assert len(cells) == len(order)
    return rec(0)


def branching_multiplicity(lam, j):
    """Multiplicity of det1^(-j) det2^(w+j) in the restriction of V_lam to GL_n x GL_n."""
    n = len(lam) // 2
    w = lam[0] + lam[-1]
    s = -lam[-1]
    a, b = s - j, w + j + s
    if a < 0 or b < 0:
        return 0
    shifted = [x + s for x in lam]
    return lr_coefficient(shifted, [a] * n, [b] * n)


# ---------------------------------------------------------------------------
# the elliptic curve 11a


def curve_11a_ap(ell):
    """a_ell = ell + 1 - #E(F_ell) for y^2 + y = x^3 - x^2 - 10x - 20 (good ell)."""
    count = 1  # the point at infinity
    for x in range(ell):
        rhs = (x**3 - x**2 - 10 * x - 20) % ell
        for y in range(ell):
            if (y * y + y - rhs) % ell == 0:
                count += 1
    return ell + 1 - count


# minimal Weierstrass models [a1, a2, a3, a4, a6] of a few optimal curves
CURVES = {
    "11a": (11, (0, -1, 1, -10, -20)),
    "14a": (14, (1, 0, 1, 4, -6)),
    "15a": (15, (1, 1, 1, -10, -10)),
    "37a": (37, (0, 0, 1, -1, 0)),
    "37b": (37, (0, 1, 1, -23, -50)),
    "43a": (43, (0, 1, 1, 0, 0)),
}


def curve_ap(coeffs, ell):
    """ell + 1 - #E(F_ell) by brute force over affine points."""
    a1, a2, a3, a4, a6 = coeffs
    count = 1
    for x in range(ell):
        for y in range(ell):
            if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % ell == 0:
                count += 1
    return ell + 1 - count
