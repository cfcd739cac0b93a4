"""Truncated parahoric distribution modules and their *-action.

A distribution mu on N_Q(Z_p) = {(1 X; 0 1)} with values dual to V_lam^H is
recorded by its moments mu(X^k e_s) for |k| <= M - 1. Internally we keep the
scaled moments nu = p^|k| mu(X^k e_s) mod p^M: in these coordinates the
parahoric subgroup and t_p act by integral matrices, and the finite
approximation module (moment k known mod p^(M - |k|)) is exactly the
submodule where p^|k| divides nu.

The *-action on functions is (g*f)(X) = <h1, h2> f(Y) for the factorisation
(1 X; 0 1) g = n^- diag(h1, h2) (1 Y; 0 1), i.e. h1 = A + XC,
Y = h1^-1 (B + XD), h2 = D - C Y; on distributions (g*mu)(f) = mu(g^-1 * f).
t_p acts through t_p^-1 * f(X) = f(pX).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from . import poly as P
from .padic import (PadicMatrix, PadicNumber, charpoly, newton_polygon,
                    valuation, balanced, modmatmul)
from .weights import Weight, normalizer_exponent
from .reprs import build_VH, build_irrep, det_int, DualVector


class DistributionError(ValueError):
    pass


def multi_indices(nv, M):
    """Multi-indices of total degree <= M - 1, graded lexicographic."""
    out = []
    for deg in range(M):
        for k in sorted(_compositions(deg, nv), reverse=True):
            out.append(k)
    return out


def _compositions(deg, parts):
    if parts == 1:
        yield (deg,)
        return
    for i in range(deg + 1):
        for rest in _compositions(deg - i, parts - 1):
            yield (i,) + rest


def frac_mod(x, q):
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, q) % q


# ---------------------------------------------------------------------------
# parahoric elements


@dataclass(frozen=True)
class ParahoricElement:
    """Block matrix (A B; C D) in GL_2n(Z_p) with C = 0 mod p."""

    matrix: tuple
    p: int

    def __post_init__(self):
        g = tuple(tuple(Fraction(x) for x in r) for r in self.matrix)
        object.__setattr__(self, "matrix", g)
        m = len(g)
        if m % 2 or any(len(r) != m for r in g):
            raise DistributionError("parahoric element must be a square matrix of even size")
        n = m // 2
        for r in g:
            for x in r:
                if valuation(x, self.p) < 0:
                    raise DistributionError("parahoric element must be p-integral")
        for i in range(n, m):
            for j in range(n):
                if valuation(g[i][j], self.p) < 1:
                    raise DistributionError("lower-left block must vanish mod p")
        if valuation(det_int(g), self.p) != 0:
            raise DistributionError("parahoric element must be invertible over Z_p")

    @property
    def n(self):
        return len(self.matrix) // 2

    def blocks(self):
        n = self.n
        g = self.matrix
        A = [list(r[:n]) for r in g[:n]]
        B = [list(r[n:]) for r in g[:n]]
        C = [list(r[:n]) for r in g[n:]]
        D = [list(r[n:]) for r in g[n:]]
        return A, B, C, D

    def inverse(self):
        return ParahoricElement(tuple(map(tuple, mat_inverse(self.matrix))), self.p)


def mat_inverse(g):
    k = len(g)
    A = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(k)] for i, r in enumerate(g)]
    for c in range(k):
        piv = next(r for r in range(c, k) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(k):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [r[k:] for r in A]


def mat_mul(a, b):
    return [[sum(Fraction(a[i][t]) * b[t][j] for t in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def t_p(n, p, power=1):
    return [[Fraction(p) ** power if (i == j and i < n) else Fraction(int(i == j)) for j in range(2 * n)] for i in range(2 * n)]


def n_X(X):
    n = len(X)
    g = [[Fraction(int(i == j)) for j in range(2 * n)] for i in range(2 * n)]
    for i in range(n):
        for j in range(n):
            g[i][n + j] = Fraction(X[i][j])
    return g


# ---------------------------------------------------------------------------
# truncated power series in the entries of X


class Series:
    """Truncated multivariate power series mod q, as dicts of exponent tuples."""

    def __init__(self, nv, deg, q):
        self.nv, self.deg, self.q = nv, deg, q

    def const(self, c):
        c = frac_mod(c, self.q)
        return {(0,) * self.nv: c} if c else {}

    def var(self, i, c=1):
        e = [0] * self.nv
        e[i] = 1
        c = frac_mod(c, self.q)
        return {tuple(e): c} if c else {}

    def add(self, a, b, c=1):
        out = dict(a)
        for m, x in b.items():
            y = (out.get(m, 0) + c * x) % self.q
            if y:
                out[m] = y
            else:
                out.pop(m, None)
        return out

    def mul(self, a, b):
        out = {}
        q, deg = self.q, self.deg
        for m1, x1 in a.items():
            d1 = sum(m1)
            for m2, x2 in b.items():
                if d1 + sum(m2) > deg:
                    continue
                m = tuple(i + j for i, j in zip(m1, m2))
                out[m] = (out.get(m, 0) + x1 * x2) % q
        return {m: x for m, x in out.items() if x}

    def scale(self, a, c):
        c = frac_mod(c, self.q)
        return {m: x * c % self.q for m, x in a.items() if x * c % self.q}

    def inverse(self, a):
        """Inverse of a series with unit constant term."""
        zero = (0,) * self.nv
        c0 = a.get(zero, 0)
        inv0 = pow(c0, -1, self.q)
        rest = self.scale({m: x for m, x in a.items() if m != zero}, inv0)
        # 1 / (c0 (1 + rest)) = inv0 * sum (-rest)^k
        out = self.const(1)
        term = self.const(1)
        neg = self.scale(rest, -1)
        for _ in range(self.deg):
            term = self.mul(term, neg)
            if not term:
                break
            out = self.add(out, term)
        return self.scale(out, inv0)

    def power(self, a, e):
        if e < 0:
            return self.power(self.inverse(a), -e)
        out = self.const(1)
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return out

    def substitute(self, f, images):
        """Polynomial f (dict) with variables replaced by series images."""
        out = {}
        cache = {}
        for mono, c in f.items():
            term = self.const(c)
            for i, e in enumerate(mono):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = self.power(images[i], e)
                    term = self.mul(term, cache[key])
                    if not term:
                        break
            out = self.add(out, term)
        return out

    def matmul(self, a, b):
        n = len(a)
        return [[self._dot([a[i][t] for t in range(len(b))], [b[t][j] for t in range(len(b))])
                 for j in range(len(b[0]))] for i in range(n)]

    def _dot(self, xs, ys):
        out = {}
        for x, y in zip(xs, ys):
            if x and y:
                out = self.add(out, self.mul(x, y))
        return out

    def det(self, mat):
        n = len(mat)
        if n == 1:
            return mat[0][0]
        if n == 2:
            return self.add(self.mul(mat[0][0], mat[1][1]), self.mul(mat[0][1], mat[1][0]), -1)
        out = {}
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for row in mat[1:]]
            out = self.add(out, self.mul(mat[0][j], self.det(minor)), (-1) ** j)
        return out


# ---------------------------------------------------------------------------
# the module


class DistributionModule:
    """The truncation of D_lam to moments of degree <= M - 1 (d = 1)."""

    def __init__(self, weight, M, N=None):
        if weight.d != 1:
            raise NotImplementedError("distribution modules are implemented for d = 1")
        if M < 1:
            raise DistributionError("truncation order must be at least 1")
        self.weight = weight
        self.n = weight.n
        self.p = weight.p
        self.M = M
        self.N = M if N is None else N
        if self.N < M:
            raise DistributionError("coefficient precision must be at least the truncation order")
        self.q = self.p**self.N
        self.nv = self.n * self.n
        self.kidx = multi_indices(self.nv, M)
        self.VH = build_VH(weight)
        self.r = self.VH.dim
        self.index = [(k, s) for k in self.kidx for s in range(self.r)]
        self.pos = {key: i for i, key in enumerate(self.index)}
        self.degrees = np.array([sum(k) for k, _ in self.index], dtype=np.int64)
        self._cache = {}
        self._sym = None

    @property
    def dim(self):
        return len(self.index)

    def __eq__(self, other):
        return isinstance(other, DistributionModule) and \
            (self.weight, self.M, self.N) == (other.weight, other.M, other.N)

    def __hash__(self):
        return hash((self.weight, self.M, self.N))

    # -- matrices in scaled coordinates
    def matrix(self, g):
        """Scaled matrix S(g) with nu(g*mu) = S(g) nu(mu), for g in Delta_p.

        For n = 1 any g = (a b; c d) with v(c) > v(a) and integral
        (b + dx)/(a + cx) on the unit disc for g^-1 is allowed; for n >= 2
        only parahoric elements (use ``tp_matrix`` for t_p).
        """
        key = tuple(tuple(Fraction(x) for x in r) for r in g)
        if key not in self._cache:
            if self.n == 1:
                C = self._coefficients_n1(key)
            else:
                C = self._coefficients_general(key)
            self._cache[key] = self._scale(C)
        return self._cache[key]

    def _scale(self, C):
        """S[a][b] = C[a][b] p^(|a| - |b|) mod p^N."""
        p = self.p
        q = self.q
        dim = self.dim
        S = [[0] * dim for _ in range(dim)]
        for i in range(dim):
            da = self.degrees[i]
            for j in range(dim):
                c = C[i][j]
                if not c:
                    continue
                db = self.degrees[j]
                if db > da:
                    s = p ** int(db - da)
                    if c % s:
                        raise DistributionError("action does not preserve the integral lattice")
                    S[i][j] = (c // s) % q
                else:
                    S[i][j] = c * p ** int(da - db) % q
        dt = np.int64 if q < 2**31 else object
        return np.array(S, dtype=object).astype(dt)

    def _coefficients_n1(self, g):
        """C[a][b]: g^-1 * x^a = sum_b C[a][b] x^b, computed mod p^(N + M)."""
        p, M = self.p, self.M
        q2 = p ** (self.N + M)
        l1, l2 = self.weight.lam[0]
        gi = mat_inverse(g)
        (a, b), (c, d) = gi
        e = valuation(a, p)
        if e == float("inf"):
            raise DistributionError("upper-left entry vanishes")
        if valuation(c, p) <= e or valuation(b, p) < e or valuation(d, p) < e:
            raise DistributionError("element does not act on the unit disc")
        pe = Fraction(p) ** e
        alpha, bb, cc, dd = a / pe, b / pe, c / pe, d / pe
        detgi = a * d - b * c
        r = -valuation(detgi, p)  # g has det valuation r
        scalar = pe ** (l1 - l2) * detgi**l2 * Fraction(p) ** (r * l1)
        if valuation(scalar, p) < 0:
            raise DistributionError("normalising scalar is not integral")
        ser = Series(1, M - 1, q2)
        den = ser.add(ser.const(alpha), ser.var(0, cc))
        num = ser.add(ser.const(bb), ser.var(0, dd))
        u = ser.mul(num, ser.inverse(den))
        pref = ser.scale(ser.power(den, l1 - l2), scalar)
        C = []
        term = pref
        for k in range(M):
            row = [term.get((j,), 0) for j in range(M)]
            C.append(row)
            term = ser.mul(term, u)
        return C

    def _symbolic_VH(self):
        """R''(h): action matrix of V^H as polynomials in the entries of (h1, h2)."""
        if self._sym is not None:
            return self._sym
        VH = self.VH
        n, nvh = self.n, VH.nvars
        nb = n * n
        tot = 2 * nvh
        images = []
        for k in range(2):
            for i in range(n):
                for j in range(n):
                    f = {}
                    for t in range(n):
                        e = [0] * tot
                        e[k * nb + i * n + t] = 1
                        e[nvh + k * nb + t * n + j] = 1
                        f[tuple(e)] = 1
                    images.append(f)
        R = [[{} for _ in range(VH.dim)] for _ in range(VH.dim)]
        q = VH.p**VH.N
        for s, bfun in enumerate(VH.basis):
            full = P.substitute(bfun, images, tot)
            groups = {}
            for mono, c in full.items():
                groups.setdefault(mono[nvh:], {})[mono[:nvh]] = c
            for hmono, gpoly in groups.items():
                co = VH.coords(gpoly)
                for t in range(VH.dim):
                    if co[t]:
                        R[t][s][hmono] = balanced(co[t], q)
        self._sym = R
        return R

    def _coefficients_general(self, g):
        p, M, n = self.p, self.M, self.n
        q2 = p ** (self.N + M)
        elt = ParahoricElement(g, p)
        A, B, C, D = elt.inverse().blocks()
        ser = Series(self.nv, M - 1, q2)
        X = [[ser.var(i * n + j) for j in range(n)] for i in range(n)]
        cst = lambda mat: [[ser.const(x) for x in r] for r in mat]
        Ainv = mat_inverse(A)
        XC = ser.matmul(X, cst(C))
        W = ser.matmul(cst(Ainv), XC)
        W = [[ser.scale(x, -1) for x in r] for r in W]
        # h1^-1 = sum_m (-A^-1 X C)^m A^-1
        ident = [[ser.const(int(i == j)) for j in range(n)] for i in range(n)]
        acc = ident
        term = ident
        for _ in range(M - 1):
            term = ser.matmul(term, W)
            acc = [[ser.add(acc[i][j], term[i][j]) for j in range(n)] for i in range(n)]
        h1inv = ser.matmul(acc, cst(Ainv))
        h1 = [[ser.add(ser.const(A[i][j]), XC[i][j]) for j in range(n)] for i in range(n)]
        BXD = [[ser.add(ser.const(B[i][j]), x) for j, x in enumerate(row)]
               for i, row in enumerate(ser.matmul(X, cst(D)))]
        Y = ser.matmul(h1inv, BXD)
        CY = ser.matmul(cst(C), Y)
        h2 = [[ser.add(ser.const(D[i][j]), CY[i][j], -1) for j in range(n)] for i in range(n)]
        R = self._symbolic_VH()
        images = [x for row in h1 for x in row] + [x for row in h2 for x in row]
        s1, s2 = self.VH.blocks[0].shift, self.VH.blocks[1].shift
        detfac = ser.mul(ser.power(ser.det(h1), s1), ser.power(ser.det(h2), s2))
        Rs = [[ser.mul(detfac, ser.substitute(R[t][s], images)) if R[t][s] else {}
               for s in range(self.r)] for t in range(self.r)]
        Yflat = [x for row in Y for x in row]
        Cmat = [[0] * self.dim for _ in range(self.dim)]
        ypow = {}
        for k in self.kidx:
            mon = ser.const(1)
            for i, e in enumerate(k):
                if e:
                    if (i, e) not in ypow:
                        ypow[(i, e)] = ser.power(Yflat[i], e)
                    mon = ser.mul(mon, ypow[(i, e)])
            for s in range(self.r):
                row = self.pos[(k, s)]
                for t in range(self.r):
                    if not Rs[t][s]:
                        continue
                    f = ser.mul(mon, Rs[t][s])
                    for mono, c in f.items():
                        col = self.pos.get((mono, t))
                        if col is not None:
                            Cmat[row][col] = (Cmat[row][col] + c) % q2
        return Cmat

    def tp_matrix(self, power=1):
        """Scaled matrix of t_p^power: multiplication by p^(power |k|)."""
        q = self.q
        diag = [pow(self.p, int(power * d), q) for d in self.degrees]
        dt = np.int64 if q < 2**31 else object
        S = np.zeros((self.dim, self.dim), dtype=dt)
        for i, x in enumerate(diag):
            S[i, i] = x
        return S

    # -- elements
    def zero(self):
        return MomentDistribution(self, (0,) * self.dim)

    def from_moments(self, moments):
        """From a dict {(k, s): value} of p-integral rationals (missing = 0)."""
        nu = [0] * self.dim
        for (k, s), v in moments.items():
            i = self.pos[(tuple(k), s)]
            nu[i] = frac_mod(Fraction(v) * self.p ** int(self.degrees[i]), self.q)
        return MomentDistribution(self, tuple(nu))

    def dirac(self, X=None):
        """Evaluation at (1 X; 0 1) paired with the first V^H-dual basis vector."""
        X = X or [[0] * self.n for _ in range(self.n)]
        flat = [x for row in X for x in row]
        mom = {}
        for k in self.kidx:
            val = Fraction(1)
            for x, e in zip(flat, k):
                val *= Fraction(x) ** e
            mom[(k, 0)] = val
        return self.from_moments(mom)

    def lattice_ok(self, nu):
        return all(int(x) % self.p ** int(d) == 0 for x, d in zip(nu, self.degrees))


class MomentDistribution:
    """Element of the truncated module, stored as scaled moments mod p^M."""

    def __init__(self, module, nu):
        self.module = module
        q = module.q
        self.nu = tuple(int(x) % q for x in nu)
        if len(self.nu) != module.dim:
            raise DistributionError("moment vector has the wrong length")

    @property
    def M(self):
        return self.module.M

    def moment(self, k, s=0):
        i = self.module.pos[(tuple(k), s)]
        d = int(self.module.degrees[i])
        return PadicNumber.from_residue(self.nu[i], self.module.p, self.M - d, -d)

    def moments(self):
        return {key: self.moment(*key) for key in self.module.index}

    def is_integral(self):
        return self.module.lattice_ok(self.nu)

    def apply(self, S):
        q = self.module.q
        v = np.array(self.nu, dtype=S.dtype)
        return MomentDistribution(self.module, tuple(int(x) for x in (S.dot(v) % q)))

    def __add__(self, other):
        return MomentDistribution(self.module, tuple(a + b for a, b in zip(self.nu, other.nu)))

    def __sub__(self, other):
        return MomentDistribution(self.module, tuple(a - b for a, b in zip(self.nu, other.nu)))

    def scale(self, c):
        c = frac_mod(c, self.module.q) if not isinstance(c, PadicNumber) else c.residue(self.module.N)
        return MomentDistribution(self.module, tuple(a * c for a in self.nu))

    def __eq__(self, other):
        # scaled moments only carry p^M digits even when the working modulus is larger
        qm = self.module.p ** self.M
        return self.module == other.module and all((a - b) % qm == 0 for a, b in zip(self.nu, other.nu))

    def is_zero(self):
        qm = self.module.p ** self.M
        return not any(x % qm for x in self.nu)

    def to_json(self, lambda_ref=None):
        out = []
        for (k, s) in self.module.index:
            out.append({"k": list(k), "vh_index": s, "val": self.moment(k, s).compact()})
        return {"p": self.module.p, "N": self.M, "M": self.M,
                "lambda_ref": lambda_ref or list(self.module.weight.lam[0]), "moments": out}

    @classmethod
    def from_json(cls, data, module=None):
        if isinstance(data, str):
            data = json.loads(data)
        try:
            p, M = int(data["p"]), int(data["M"])
            if module is None:
                lam = Weight.simple(data["lambda_ref"], p)
                module = DistributionModule(lam, M)
            mom = {}
            for entry in data["moments"]:
                k = tuple(entry["k"])
                d = sum(k)
                val = PadicNumber.parse(entry["val"], p, M - d)
                mom[(k, int(entry["vh_index"]))] = val.lift()
        except KeyError as exc:
            raise DistributionError(f"moment table missing key {exc}") from None
        return module.from_moments(mom)


# ---------------------------------------------------------------------------
# operations


def act_parahoric(k, mu):
    """k * mu for a parahoric element k (a ParahoricElement or a matrix)."""
    g = k.matrix if isinstance(k, ParahoricElement) else k
    if not isinstance(k, ParahoricElement):
        ParahoricElement(g, mu.module.p)
    return mu.apply(mu.module.matrix(g))


def act_tp(mu, power=1):
    """t_p * mu: the moment of degree |k| is multiplied by p^|k|."""
    return mu.apply(mu.module.tp_matrix(power))


def act_delta(g, mu):
    """Action of a general element of the monoid (n = 1), e.g. n_a t_p."""
    return mu.apply(mu.module.matrix(g))


@lru_cache(maxsize=32)
def specialization_data(weight, M):
    """Coefficients c[(k, s)] of F_f(X) = f(h n_X) for each basis f of V_lam."""
    n = weight.n
    rep = build_irrep(weight.lam[0], p=weight.p)
    VH = build_VH(weight)
    m = 2 * n
    nvh = VH.nvars
    nX = n * n
    tot = nvh + nX
    # g = diag(h1, h2) (1 X; 0 1) as polynomials in (h, X)
    def hv(k, i, j):
        return P.var(k * n * n + i * n + j, tot)

    def xv(i, j):
        return P.var(nvh + i * n + j, tot)

    g = [[{} for _ in range(m)] for _ in range(m)]
    for i in range(n):
        for j in range(n):
            g[i][j] = hv(0, i, j)
            g[n + i][n + j] = hv(1, i, j)
            acc = {}
            for t in range(n):
                acc = P.add(acc, P.mul(hv(0, i, t), xv(t, j)))
            g[i][n + j] = acc
    images = [g[i][j] for i in range(m) for j in range(m)]
    # det(g)^shift = det(h1)^shift det(h2)^shift: absorbed by the V^H shifts
    rows = []
    for f in rep.basis:
        full = P.substitute(f, images, tot)
        groups = {}
        for mono, c in full.items():
            groups.setdefault(mono[nvh:], {})[mono[:nvh]] = c
        entry = {}
        for kX, hpoly in groups.items():
            if sum(kX) > M - 1:
                raise DistributionError(f"truncation M = {M} too small for V_lam (needs degree {sum(kX)})")
            hpoly = _shift_to_VH(hpoly, rep.shift, VH)
            co = VH.coords(hpoly)
            for s, c in enumerate(co):
                if c:
                    entry[(kX, s)] = c
        rows.append(entry)
    return rep, rows


def _shift_to_VH(hpoly, shift, VH):
    """Divide by det(h1)^s1 det(h2)^s2 and multiply by det(h1 h2)^shift.

    f(g) det(g)^shift restricted to H is a polynomial in h times the det
    powers; the V^H basis carries its own shifts, so we rebalance here.
    """
    s1, s2 = VH.blocks[0].shift, VH.blocks[1].shift
    e1, e2 = shift - s1, shift - s2
    if e1 == 0 and e2 == 0:
        return hpoly
    n = VH.n
    nv = VH.nvars
    out = hpoly
    for k, e in ((0, e1), (1, e2)):
        if e == 0:
            continue
        mat = [[P.var(k * n * n + i * n + j, nv) for j in range(n)] for i in range(n)]
        dpol = P.det(mat, nv)
        if e > 0:
            out = P.mul(out, P.power(dpol, e, nv))
        else:
            out = _exact_divide(out, P.power(dpol, -e, nv))
    return out


def _exact_divide(a, b):
    """Exact polynomial division a / b (b divides a), via leading monomials."""
    q = {}
    rem = dict(a)
    lead_b = max(b)
    cb = b[lead_b]
    while rem:
        lead = max(rem)
        c = Fraction(rem[lead]) / cb
        mono = tuple(x - y for x, y in zip(lead, lead_b))
        if any(x < 0 for x in mono):
            raise DistributionError("inexact division by a determinant power")
        if c.denominator == 1:
            c = int(c)
        q[mono] = c
        rem = P.add(rem, P.mul({mono: c}, b), -1)
    return q


def specialize(mu):
    """Restriction of mu to V_lam inside the function space: a DualVector."""
    mod = mu.module
    rep, rows = specialization_data(mod.weight, mod.M)
    p, M = mod.p, mod.M
    out = []
    for entry in rows:
        total = PadicNumber.zero(p, M)
        for key, c in entry.items():
            total = total + mu.moment(*key) * PadicNumber.make(c, p, M)
        out.append(total)
    return SpecializedVector(rep, out)


class SpecializedVector(DualVector):
    """Values of a functional on V_lam at its basis, as p-adic numbers."""

    def __init__(self, host, values):
        self.host = host
        self.values = list(values)
        self.coeffs = [v.residue() if not v.is_zero() and v.val >= 0 else 0 for v in values]

    def __eq__(self, other):
        return all((a - b).is_zero() for a, b in zip(self.values, other.values))

    def is_zero(self):
        return all(v.is_zero() for v in self.values)


def local_up_cosets(n, p):
    """The matrices n_a t_p, a running over n x n matrices with entries 0..p-1."""
    out = []
    for entries in product(range(p), repeat=n * n):
        X = [list(entries[i * n:(i + 1) * n]) for i in range(n)]
        out.append(mat_mul(n_X(X), t_p(n, p)))
    return out


def up_matrix(module, cosets=None):
    """Matrix (scaled coordinates) of sum over cosets of delta*, as a PadicMatrix."""
    n, p = module.n, module.p
    if cosets is None:
        cosets = local_up_cosets(n, p)
    q = module.q
    total = np.zeros((module.dim, module.dim), dtype=object)
    for g in cosets:
        total = (total + _delta_matrix(module, g).astype(object)) % q
    return PadicMatrix.from_array(total, p, module.N)


def _delta_matrix(module, g):
    """Matrix of g = n_X t_p^r k (k parahoric) via the decomposition when n > 1."""
    if module.n == 1:
        return module.matrix(g)
    n, p = module.n, module.p
    # g = j t_p^r with j parahoric (our cosets have this shape)
    r = valuation(det_int(g), p) // n
    j = mat_mul(g, t_p(n, p, -r))
    Sj = module.matrix(j)
    return modmatmul(Sj, module.tp_matrix(r), module.q)


def slopes(module, cosets=None, prec=None):
    """Newton polygon of the local U_p matrix; slopes >= M - 1 are flagged untrusted.

    The matrix entries are recomputed with ``prec`` digits (default generous
    enough to resolve the whole polygon of the truncation).
    """
    if prec is None:
        prec = (module.M + module.n**2) * module.dim
    work = DistributionModule(module.weight, module.M, max(prec, module.M))
    U = up_matrix(work, cosets)
    return slope_report(U, module.M)


def slope_report(U, M):
    cp = charpoly(U)
    npoly = newton_polygon(cp)
    trusted = [s for s in npoly.slopes if s < M - 1]
    untrusted = [s for s in npoly.slopes if not s < M - 1]
    return {"charpoly": cp, "newton": npoly, "trusted": trusted, "untrusted": untrusted}


def equivariance_check_star_vs_dot(weight, samples=None):
    """Check t_p * mu = lambda^vee(t_p) (t_p . mu) on all of V_lam^vee.

    Equivalently, on every basis function f of V_lam: the function-side
    substitution X -> pX of F_f equals lambda^vee(t_p) |det t_p|^(-w) times
    F of the right translate f(g t_p^-1). Returns (ok, exponent).
    """
    n, p = weight.n, weight.p
    w = weight.w
    m = 2 * n
    rep = build_irrep(weight.lam[0], p=p)
    expo = normalizer_exponent(weight)
    factor = Fraction(p) ** expo * Fraction(p) ** (n * w)
    tinv = [[Fraction(1, p) if (i == j and i < n) else Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    nvh = 2 * n * n
    tot = nvh + n * n
    star_images, dot_images = _restriction_images(n, tot, nvh, p)
    for f in rep.basis:
        star = P.substitute(f, star_images, tot)
        moved = rep.translate_poly(f, tinv)
        dot = P.substitute(moved, dot_images, tot)
        # det(g)^shift factors: g = diag(h1,h2) n_X in both routes
        if P.add(star, P.scale(dot, factor), -1):
            return False, expo
    return True, expo


def _restriction_images(n, tot, nvh, p):
    """Images of g-entries for g = diag(h1,h2) n_{pX} (star) and diag(h1,h2) n_X (dot)."""
    m = 2 * n

    def build(scale):
        g = [[{} for _ in range(m)] for _ in range(m)]
        for i in range(n):
            for j in range(n):
                g[i][j] = P.var(i * n + j, tot)
                g[n + i][n + j] = P.var(n * n + i * n + j, tot)
                acc = {}
                for t in range(n):
                    acc = P.add(acc, P.mul(P.var(i * n + t, tot), P.var(nvh + t * n + j, tot, scale)))
                g[i][n + j] = acc
        return [g[i][j] for i in range(m) for j in range(m)]

    return build(p), build(1)
