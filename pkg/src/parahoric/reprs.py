"""Algebraic representations of GL_m and of H = GL_n x GL_n as polynomial functions.

A representation of highest weight lam is the span of right translates of
the function prod_i Delta_i(g)^(lam_i - lam_{i+1}) * det(g)^lam_m, where
Delta_i is the leading principal i x i minor. We store the polynomial part
(the det power is the constant ``shift``); functions only involve the first
m - 1 rows.

The group acts by right translation, (h.f)(g) = f(g h). Coordinates are read
off at pivot monomials of a Z_(p)-basis of the saturated lattice, so action
matrices of GL_m(Z_p) are integral and invertible mod p^N.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from . import poly as P
from .padic import PadicMatrix, PadicNumber, kernel_mod_pN, balanced, to_zp, val_mod
from .weights import Weight, WeightError, crit_range

BIG_PRIME = 2147483629  # rank tests over a large prime field


class ReprError(ValueError):
    pass


def weyl_dimension(lam):
    lam = list(lam)
    m = len(lam)
    num = den = 1
    for i in range(m):
        for j in range(i + 1, m):
            num *= lam[i] - lam[j] + j - i
            den *= j - i
    return num // den


def gl_var(i, j, m):
    return i * m + j


def matrix_of_vars(m, nvars, offset=0):
    return [[P.var(offset + i * m + j, nvars) for j in range(m)] for i in range(m)]


def det_int(mat):
    """Exact determinant of a small matrix of ints/Fractions."""
    mat = [[Fraction(x) for x in r] for r in mat]
    k = len(mat)
    d = Fraction(1)
    for c in range(k):
        piv = next((r for r in range(c, k) if mat[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            mat[c], mat[piv] = mat[piv], mat[c]
            d = -d
        d *= mat[c][c]
        for r in range(c + 1, k):
            f = mat[r][c] / mat[c][c]
            if f:
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[c])]
    return d


def column_weight(mono, m):
    w = [0] * m
    for idx, e in enumerate(mono):
        if e:
            w[idx % m] += e
    return tuple(w)


def _split_weights(f, m):
    out = {}
    for mono, c in f.items():
        out.setdefault(column_weight(mono, m), {})[mono] = c
    return out


class _Echelon:
    """Incremental row echelon form of sparse polynomials over a prime field."""

    def __init__(self, prime=BIG_PRIME):
        self.prime = prime
        self.rows = []  # (pivot monomial, reduced dict)

    def reduce(self, f):
        q = self.prime
        g = P.reduce_mod(f, q)
        for piv, row in self.rows:
            c = g.get(piv)
            if c:
                g = P.reduce_mod(P.add(g, row, -c), q)
        return g

    def insert(self, f):
        g = self.reduce(f)
        if not g:
            return False
        piv = max(g)
        inv = pow(g[piv], -1, self.prime)
        g = P.reduce_mod(P.scale(g, inv), self.prime)
        # keep earlier rows reduced at the new pivot
        new_rows = []
        for p2, row in self.rows:
            c = row.get(piv)
            if c:
                row = P.reduce_mod(P.add(row, g, -c), self.prime)
            new_rows.append((p2, row))
        new_rows.append((piv, g))
        self.rows = new_rows
        return True

    def __len__(self):
        return len(self.rows)


def _saturate(rows, monos, p):
    """Z_(p)-saturate the lattice spanned by integer row vectors."""
    rows = [list(r) for r in rows]
    while True:
        if not rows:
            return rows
        T = PadicMatrix.from_rows([[rows[i][k] for i in range(len(rows))] for k in range(len(monos))], p, 1)
        ker = kernel_mod_pN(T)
        if not ker.vectors:
            return rows
        c = [balanced(x, p) for x in ker.vectors[0]]
        i = ker.free[0]
        comb = [sum(c[r] * rows[r][k] for r in range(len(rows))) for k in range(len(monos))]
        assert all(x % p == 0 for x in comb)
        rows[i] = [x // p for x in comb]


def _pivot_inverse(rows, p, N):
    """Pick columns where the rows are independent mod p; return (cols, inverse mod p^N)."""
    k = len(rows)
    if k == 0:
        return [], np.zeros((0, 0), dtype=object)
    # column pivots via echelon on the transpose
    chosen = []
    basis = []  # reduced column vectors mod p
    for col in range(len(rows[0])):
        v = [rows[i][col] % p for i in range(k)]
        for piv, b in basis:
            if v[piv]:
                f = v[piv] * pow(b[piv], -1, p)
                v = [(x - f * y) % p for x, y in zip(v, b)]
        nz = next((i for i in range(k) if v[i]), None)
        if nz is not None:
            basis.append((nz, v))
            chosen.append(col)
            if len(chosen) == k:
                break
    if len(chosen) < k:
        raise ReprError("basis is not independent mod p after saturation")
    B = [[rows[i][c] for c in chosen] for i in range(k)]  # k x k, row i = basis vector i
    inv = _inverse_mod(B, p, N)
    return chosen, inv


def _inverse_mod(B, p, N):
    q = p**N
    k = len(B)
    A = [[x % q for x in r] + [int(i == j) for j in range(k)] for i, r in enumerate(B)]
    for c in range(k):
        piv = next(r for r in range(c, k) if A[r][c] % p)
        A[c], A[piv] = A[piv], A[c]
        inv = pow(A[c][c], -1, q)
        A[c] = [x * inv % q for x in A[c]]
        for r in range(k):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [(x - f * y) % q for x, y in zip(A[r], A[c])]
    return np.array([r[k:] for r in A], dtype=object)


class PolyRep:
    """Irreducible algebraic representation of GL_m of highest weight lam."""

    def __init__(self, m, lam, p=3, N=20, basis=None):
        lam = tuple(int(x) for x in lam)
        if len(lam) != m or any(a < b for a, b in zip(lam, lam[1:])):
            raise ReprError(f"{lam} is not a dominant weight for GL_{m}")
        self.m = m
        self.lam = lam
        self.shift = lam[-1]
        self.lam_s = tuple(x - self.shift for x in lam)
        self.p = p
        self.N = N
        self.nvars = m * m
        self.basis = basis if basis is not None else self._build()
        if len(self.basis) != weyl_dimension(lam):
            raise ReprError(f"dimension {len(self.basis)} differs from Weyl dimension {weyl_dimension(lam)}")
        self._setup_coordinates()

    # -- construction
    def highest_weight_vector(self):
        m, nv = self.m, self.nvars
        g = matrix_of_vars(m, nv)
        f = P.const(1, nv)
        for i in range(1, m):
            e = self.lam_s[i - 1] - self.lam_s[i]
            if e:
                minor = P.det([row[:i] for row in g[:i]], nv)
                f = P.mul(f, P.power(minor, e, nv))
        return f

    def generators(self):
        m = self.m
        gens = []
        for i in range(m):
            for j in range(m):
                if i != j:
                    h = [[int(a == b) for b in range(m)] for a in range(m)]
                    h[i][j] = 1
                    gens.append(h)
        gens.append([[int(a + b == m - 1) for b in range(m)] for a in range(m)])
        return gens

    def _build(self):
        hw = self.highest_weight_vector()
        spaces = {}  # weight -> (_Echelon, [polys])
        queue = []

        def offer(f):
            for wt, comp in _split_weights(f, self.m).items():
                ech, polys = spaces.setdefault(wt, (_Echelon(), []))
                if ech.insert(comp):
                    polys.append(comp)
                    queue.append(comp)

        offer(hw)
        gens = self.generators()
        target = weyl_dimension(self.lam)
        while queue:
            f = queue.pop(0)
            for h in gens:
                offer(self.translate_poly(f, h))
            if sum(len(v[1]) for v in spaces.values()) > target:
                raise ReprError("closure exceeded the Weyl dimension")
        self._weights = {}
        basis = []
        for wt in sorted(spaces, reverse=True):
            polys = spaces[wt][1]
            monos = sorted({mo for f in polys for mo in f}, reverse=True)
            rows = [[_as_int(f.get(mo, 0)) for mo in monos] for f in polys]
            rows = _saturate(rows, monos, self.p)
            rows = _normalise_rows(rows)
            for r in rows:
                basis.append({mo: c for mo, c in zip(monos, r) if c})
        return basis

    def _setup_coordinates(self):
        groups = {}
        for idx, f in enumerate(self.basis):
            wt = column_weight(next(iter(f)), self.m)
            groups.setdefault(wt, []).append(idx)
        self.weights = [column_weight(next(iter(f)), self.m) for f in self.basis]
        self._pivots = {}
        for wt, idxs in groups.items():
            monos = sorted({mo for i in idxs for mo in self.basis[i]}, reverse=True)
            rows = [[self.basis[i].get(mo, 0) for mo in monos] for i in idxs]
            cols, inv = _pivot_inverse(rows, self.p, self.N)
            self._pivots[wt] = (idxs, [monos[c] for c in cols], inv)

    @property
    def dim(self):
        return len(self.basis)

    # -- the action
    def translate_poly(self, f, h, modulus=None):
        """det(h)^shift * f(g h) for a matrix h of ints or Fractions."""
        m, nv = self.m, self.nvars
        images = []
        for i in range(m):
            for j in range(m):
                images.append({_unit(nv, i * m + k): h[k][j] for k in range(m) if h[k][j]})
        out = P.substitute(f, images, nv, modulus)
        if self.shift:
            d = det_int(h) ** self.shift
            out = P.reduce_mod(P.scale(out, d), modulus) if modulus else P.scale(out, d)
        return out

    def coords(self, f):
        """Coordinates mod p^N of a polynomial lying in the span."""
        q = self.p**self.N
        out = [0] * self.dim
        for wt, comp in _split_weights(P.reduce_mod(f, q), self.m).items():
            if wt not in self._pivots:
                raise ReprError(f"weight {wt} does not occur in the representation")
            idxs, pivs, inv = self._pivots[wt]
            vec = np.array([comp.get(mo, 0) for mo in pivs], dtype=object)
            c = vec.dot(inv) % q if len(pivs) else []
            for i, x in zip(idxs, c):
                out[i] = int(x) % q
        return out

    def combination(self, coeffs):
        f = {}
        for c, b in zip(coeffs, self.basis):
            if c:
                f = P.add(f, b, c)
        return f

    def action_matrix(self, h):
        """Matrix (mod p^N) of right translation by h in the basis, columns = images."""
        q = self.p**self.N
        cols = [self.coords(self.translate_poly(b, h, q)) for b in self.basis]
        return PadicMatrix(self.p, self.N, tuple(tuple(cols[j][i] for j in range(self.dim))
                                                 for i in range(self.dim)))

    def evaluate(self, f, g, modulus=None):
        """Value of the function f * det^shift at the matrix g."""
        val = P.evaluate(f, [x for row in g for x in row])
        if self.shift:
            val = Fraction(val) * det_int(g) ** self.shift
        if modulus:
            return to_zp(Fraction(val), self.p, _log(modulus, self.p))
        return val

    def independence_check(self, samples=None):
        """Evaluation matrix at deterministic integer matrices has full rank."""
        pts = samples or deterministic_matrices(self.m, 2 * self.dim + 2, self.p)
        rows = [[self.evaluate(b, g) for b in self.basis] for g in pts]
        q = BIG_PRIME
        ech = _Echelon(q)
        rank = 0
        for j in range(self.dim):
            col = {(i,): to_zp(Fraction(rows[i][j]), q, 1) for i in range(len(pts))}
            rank += ech.insert(col)
        return rank == self.dim


def _unit(nv, i):
    e = [0] * nv
    e[i] = 1
    return tuple(e)


def _as_int(x):
    x = Fraction(x)
    if x.denominator != 1:
        raise ReprError("non-integral polynomial in the closure")
    return int(x)


def _log(q, p):
    k = 0
    while q > 1:
        q //= p
        k += 1
    return k


def _normalise_rows(rows):
    out = []
    for r in rows:
        g = 0
        for x in r:
            g = math.gcd(g, x)
        r = [x // g for x in r] if g > 1 else r
        lead = next((x for x in r if x), 0)
        out.append([-x for x in r] if lead < 0 else r)
    return out


def deterministic_matrices(m, count, p, unit_det=True, entries=(0, 1, -1, 2, -2)):
    """Integer m x m matrices, in a fixed order, with det a unit mod p."""
    out = []
    seen = 0
    # a fixed pseudo-random walk through entry tuples
    state = 12345
    while len(out) < count:
        vals = []
        for _ in range(m * m):
            state = (1103515245 * state + 12345) % 2**31
            vals.append(entries[(state >> 16) % len(entries)])
        g = [vals[i * m:(i + 1) * m] for i in range(m)]
        d = det_int(g)
        seen += 1
        if d == 0 or (unit_det and d.numerator % p == 0):
            continue
        out.append(g)
    return out


@lru_cache(maxsize=64)
def build_irrep(lam, m=None, p=3, N=20):
    """The representation of GL_m with highest weight lam (a dominant tuple)."""
    lam = tuple(lam)
    return PolyRep(len(lam) if m is None else m, lam, p, N)


# ---------------------------------------------------------------------------
# V_lam^H for H = GL_n x GL_n


class VHRep:
    """Tensor product of block representations, one GL_n block per factor.

    Variables: block b uses indices b*n^2 ... (b+1)*n^2 - 1. A group element is
    a list of n x n matrices, one per block.
    """

    def __init__(self, blocks):
        self.blocks = list(blocks)
        self.n = self.blocks[0].m
        self.p = self.blocks[0].p
        self.N = self.blocks[0].N
        nb = self.n * self.n
        self.nvars = nb * len(self.blocks)
        self.index = list(product(*[range(b.dim) for b in self.blocks]))
        self.basis = []
        for idx in self.index:
            f = P.const(1, self.nvars)
            for k, (b, i) in enumerate(zip(self.blocks, idx)):
                f = P.mul(f, _embed(b.basis[i], k * nb, self.nvars))
            self.basis.append(f)

    @property
    def dim(self):
        return len(self.basis)

    def translate_poly(self, f, hs, modulus=None):
        n, nv = self.n, self.nvars
        nb = n * n
        images = []
        scalar = Fraction(1)
        for k, (b, h) in enumerate(zip(self.blocks, hs)):
            for i in range(n):
                for j in range(n):
                    images.append({_unit(nv, k * nb + i * n + kk): h[kk][j] for kk in range(n) if h[kk][j]})
            if b.shift:
                scalar *= det_int(h) ** b.shift
        out = P.substitute(f, images, nv, modulus)
        out = P.scale(out, scalar)
        return P.reduce_mod(out, modulus) if modulus else out

    def coords(self, f):
        """Coordinates mod p^N via block pivots and the Kronecker inverse."""
        q = self.p**self.N
        f = P.reduce_mod(f, q)
        dims = [b.dim for b in self.blocks]
        # split f by block weights, then read products of block pivots
        out = np.zeros(dims, dtype=object)
        piv_lists = []
        for b in self.blocks:
            lst = []
            for wt, (idxs, pivs, inv) in b._pivots.items():
                lst.append((idxs, pivs, inv))
            piv_lists.append(lst)
        for combo in product(*piv_lists):
            shape = [len(c[1]) for c in combo]
            T = np.zeros(shape, dtype=object)
            for pos in product(*[range(s) for s in shape]):
                mono = ()
                for c, k in zip(combo, pos):
                    mono = mono + c[1][k]
                T[pos] = f.get(mono, 0)
            for axis, c in enumerate(combo):
                T = np.moveaxis(np.tensordot(T, c[2], axes=([axis], [0])), -1, axis) % q
            for pos in product(*[range(s) for s in shape]):
                tgt = tuple(c[0][k] for c, k in zip(combo, pos))
                out[tgt] = int(T[pos]) % q
        return [int(out[idx]) for idx in self.index]

    def combination(self, coeffs):
        f = {}
        for c, b in zip(coeffs, self.basis):
            if c:
                f = P.add(f, b, c)
        return f

    def action_matrix(self, hs):
        q = self.p**self.N
        cols = [self.coords(self.translate_poly(b, hs, q)) for b in self.basis]
        return PadicMatrix(self.p, self.N, tuple(tuple(cols[j][i] for j in range(self.dim))
                                                 for i in range(self.dim)))

    def evaluate(self, f, hs, modulus=None):
        pt = [x for h in hs for row in h for x in row]
        val = Fraction(P.evaluate(f, pt))
        for b, h in zip(self.blocks, hs):
            if b.shift:
                val *= det_int(h) ** b.shift
        if modulus:
            return to_zp(val, self.p, _log(modulus, self.p))
        return val


def _embed(f, offset, nvars):
    out = {}
    for mono, c in f.items():
        e = [0] * nvars
        e[offset:offset + len(mono)] = mono
        out[tuple(e)] = c
    return out


def build_VH(lam, N=20):
    """V_lam^H for a d = 1 weight: the two GL_n blocks lam[:n] and lam[n:]."""
    if lam.d != 1:
        return [build_VH(Weight(p=lam.p, n=lam.n, lam=(row,), pure=False), N) for row in lam.lam]
    n = lam.n
    return VHRep([build_irrep(lam.lam[0][:n], p=lam.p, N=N), build_irrep(lam.lam[0][n:], p=lam.p, N=N)])


def _scalar_mod(x, q):
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, q) % q


def diagonal_invariant(VH, w, samples=8):
    """The vector v with <diag(h,h)> v = det(h)^w v, normalised.

    Solved as a kernel problem over deterministic h in GL_n(Z) with unit
    determinant; the kernel generator is primitive and scaled so that its
    first nonzero coordinate is a power of p.
    """
    if isinstance(VH, list):
        return [diagonal_invariant(V, w) for V in VH]
    p, N = VH.p, VH.N
    q = p**N
    n = VH.n
    rows = []
    hs = deterministic_matrices(n, samples, p)
    for h in hs:
        A = VH.action_matrix([h] * len(VH.blocks))
        dw = _scalar_mod(det_int(h) ** w, q)
        for i in range(VH.dim):
            rows.append([(A.rows[i][j] - (dw if i == j else 0)) % q for j in range(VH.dim)])
    ker = kernel_mod_pN(PadicMatrix.from_rows(rows, p, N))
    if len(ker) != 1:
        raise ReprError(f"diagonal-invariant space has dimension {len(ker)}, expected 1")
    v = list(ker.vectors[0])
    first = next(x for x in v if x % q)
    pv = PadicNumber.from_residue(first, p, N)
    u = pow(pv.unit, -1, q)
    v = [x * u % q for x in v]
    return [balanced(x, q) for x in v]


# ---------------------------------------------------------------------------
# weight spaces of V_lam (GL_2n) via lowering derivations


def lowering(f, a, b, m):
    """Right action of the Lie algebra element E_ab: sum_k g_ka d/dg_kb."""
    out = {}
    for k in range(m):
        d = P.derivative(f, k * m + b)
        if d:
            out = P.add(out, P.times_var(d, k * m + a))
    return out


def weight_space(lam_s, target, m):
    """Spanning basis (over Q) of the weight-``target`` space, shifted weights.

    Built breadth-first from the highest weight vector by the lowering
    derivations E_ab (a > b), staying above ``target`` in dominance order.
    """
    rep = PolyRep.__new__(PolyRep)
    rep.m, rep.lam_s, rep.nvars, rep.shift = m, tuple(lam_s), m * m, 0
    hw = PolyRep.highest_weight_vector(rep)
    top = tuple(lam_s)
    target = tuple(target)
    if sum(target) != sum(top) or any(x < 0 for x in target):
        return []

    def dominates(u, v):
        su = sv = 0
        for x, y in zip(u, v):
            su += x
            sv += y
            if su < sv:
                return False
        return True

    if not dominates(top, target):
        return []
    layers = {top: [hw]}
    frontier = [top]
    while frontier:
        nxt = {}
        for wt in frontier:
            for a in range(1, m):
                for b in (a - 1,):
                    if wt[b] == 0:
                        continue
                    nw = list(wt)
                    nw[b] -= 1
                    nw[a] += 1
                    nw = tuple(nw)
                    if not dominates(nw, target):
                        continue
                    for f in layers[wt]:
                        g = lowering(f, a, b, m)
                        if g:
                            nxt.setdefault(nw, []).append(g)
        frontier = []
        for wt, polys in nxt.items():
            ech = _Echelon()
            keep = [f for f in layers.get(wt, [])]
            for f in keep:
                ech.insert(f)
            for f in polys:
                if ech.insert(f):
                    keep.append(f)
            if wt not in layers or len(keep) > len(layers[wt]):
                frontier.append(wt)
            layers[wt] = keep
    return layers.get(target, [])


def _character_target(lam, j):
    n = lam.n
    w = lam.w
    row = lam.lam[0]
    shift = row[-1]
    return tuple([-j - shift] * n + [w + j - shift] * n)


def h_samples(n, count, p):
    """Deterministic elements (h1, h2) of H(Z_p) with integer entries."""
    out = []
    for i in range(n):
        for j in range(n):
            if i != j:
                e = [[int(a == b) for b in range(n)] for a in range(n)]
                e[i][j] = 1
                one = [[int(a == b) for b in range(n)] for a in range(n)]
                out.append((e, one))
                out.append((one, e))
    mats = deterministic_matrices(n, 2 * count, p)
    k = 0
    while len(out) < count:
        out.append((mats[k], mats[k + 1]))
        k += 2
    return out[:count]


def _block_diag(h1, h2):
    n = len(h1)
    g = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            g[i][j] = h1[i][j]
            g[n + i][n + j] = h2[i][j]
    return g


def _equivariance_kernel(lam, j, N=20, samples=12):
    """Kernel of the equivariance system on the target weight space of V_lam.

    Returns (spanning set of the weight space, kernel vectors, certificate).
    """
    if lam.d != 1:
        raise NotImplementedError("per-embedding computation; call on each factor")
    n, p = lam.n, lam.p
    m = 2 * n
    q = p**N
    w = lam.w
    row = lam.lam[0]
    shift = row[-1]
    lam_s = tuple(x - shift for x in row)
    space = weight_space(lam_s, _character_target(lam, j), m)
    if not space:
        return [], [], N
    rep = PolyRep.__new__(PolyRep)
    rep.m, rep.nvars, rep.shift = m, m * m, shift
    eqs = []
    for h1, h2 in h_samples(n, samples, p):
        g = _block_diag(h1, h2)
        chi = _scalar_mod(det_int(h1) ** (-j) * det_int(h2) ** (w + j), q)
        cols = []
        for f in space:
            t = PolyRep.translate_poly(rep, f, g, q)
            cols.append(P.reduce_mod(P.add(t, f, -chi), q))
        monos = sorted({mo for c in cols for mo in c})
        for mo in monos:
            eqs.append([c.get(mo, 0) for c in cols])
    if not eqs:
        return space, [[int(i == k) for i in range(len(space))] for k in range(len(space))], N
    ker = kernel_mod_pN(PadicMatrix.from_rows(eqs, p, N))
    return space, [list(v) for v in ker.vectors], ker.cert


def branching_hom_dimension(lam, j, N=20):
    """dim Hom_{H(Z_p)}(V_lam^dual, det1^j det2^(-w-j)) as a kernel dimension."""
    if lam.d != 1:
        out = 1
        for row in lam.lam:
            out *= branching_hom_dimension(Weight(p=lam.p, n=lam.n, lam=(row,)), j, N)
        return out
    _, ker, _ = _equivariance_kernel(lam, j, N)
    return len(ker)


class BranchingVector:
    """nu_{lam,j} = poly / p^k times det^shift.

    ``poly`` has balanced integer coefficients known mod p^N.
    """

    def __init__(self, lam, j, poly, N, k=0):
        self.lam = lam
        self.j = j
        self.poly = poly
        self.N = N
        self.k = k
        self.m = 2 * lam.n
        self.shift = lam.lam[0][-1]

    def numerator(self, g, modulus):
        """p^k * nu(g) mod ``modulus``."""
        val = P.evaluate(self.poly, [x for row in g for x in row], modulus)
        if self.shift:
            val = val * _scalar_mod(det_int(g) ** self.shift, modulus) % modulus
        return val

    def value(self, g):
        """nu(g) as a p-adic number."""
        p = self.lam.p
        r = self.numerator(g, p**self.N)
        return PadicNumber.from_residue(r, p, self.N - self.k, -self.k)

    def restriction(self, X, hs):
        return self.value(_h_times_nX(hs[0], hs[1], X))

    def coordinates(self, rep):
        """Coordinates of p^k * nu in a PolyRep basis."""
        return rep.coords(self.poly)


def _h_times_nX(h1, h2, X):
    """The matrix diag(h1, h2) (1 X; 0 1)."""
    n = len(h1)
    g = _block_diag(h1, h2)
    for i in range(n):
        for k in range(n):
            g[i][n + k] = sum(h1[i][t] * X[t][k] for t in range(n))
    return g


def restriction_formula(lam, j, X, hs, VH, v, modulus):
    """(-1)^(dnj) det(X)^j <diag(X,1)> v_lam evaluated at h = (h1, h2)."""
    n = lam.n
    h1X = [[sum(hs[0][i][t] * X[t][k] for t in range(n)) for k in range(n)] for i in range(n)]
    f = VH.combination(v)
    val = VH.evaluate(f, [h1X, hs[1]], modulus)
    sign = -1 if (lam.d * n * j) % 2 else 1
    return sign * _scalar_mod(det_int(X) ** j, modulus) * val % modulus


def nu_vector(lam, j, N=20, samples=20):
    """The vector nu_{lam,j}: the H-eigenvector whose restriction to the unipotent
    radical is (-1)^(dnj) det(X)^j <diag(X,1)> v_lam.

    The eigenline comes from the equivariance kernel; the scalar is fixed at
    the sample where the eigenvector has least valuation and then checked at
    every sample.
    """
    if lam.d != 1:
        raise NotImplementedError("nu_vector is implemented for d = 1")
    if j not in crit_range(lam):
        raise WeightError(f"j = {j} is not critical for {lam}")
    p = lam.p
    space, ker, cert = _equivariance_kernel(lam, j, N)
    if len(ker) != 1:
        raise ReprError(f"equivariance system has a {len(ker)}-dimensional solution space")
    N = cert
    q = p**N
    e = {}
    for c, f in zip(ker[0], space):
        if c:
            e = P.add(e, f, c)
    e = P.reduce_mod(e, q)
    # the weight-space spanning set need not be saturated: strip the p-content
    content = min(val_mod(c, p, N) for c in e.values())
    if content:
        e = {mo: (c // p**content) for mo, c in e.items()}
        N -= content
        q = p**N
    VH = build_VH(lam)
    v = diagonal_invariant(VH, lam.w)
    cand = BranchingVector(lam, j, e, N)
    pts = restriction_samples(lam.n, samples, p)
    best = None
    for X, hs in pts:
        lhs = cand.numerator(_h_times_nX(hs[0], hs[1], X), q)
        if lhs and (best is None or val_mod(lhs, p, N) < best[0]):
            best = (val_mod(lhs, p, N), lhs, restriction_formula(lam, j, X, hs, VH, v, q))
    if best is None:
        raise ReprError("the eigenvector vanishes on every sample")
    k, lhs, rhs = best
    N -= k
    q = p**N
    poly = P.reduce_mod(P.scale(e, rhs * pow(lhs // p**k, -1, q)), q)
    while k and all(c % p == 0 for c in poly.values()):
        poly = {mo: c // p for mo, c in poly.items()}
        k -= 1
        N -= 1
        q = p**N
    poly = {mo: balanced(c, q) for mo, c in poly.items() if c % q}
    out = BranchingVector(lam, j, poly, N, k)
    for X, hs in pts:
        got = out.restriction(X, hs)
        want = restriction_formula(lam, j, X, hs, VH, v, q)
        if not (got - want).is_zero():
            raise ReprError("restriction of the eigenvector does not match the formula")
    return out


def restriction_samples(n, count, p):
    mats = deterministic_matrices(n, 3 * count, p)
    return [(mats[3 * k], (mats[3 * k + 1], mats[3 * k + 2])) for k in range(count)]


class DualVector:
    """Linear functional on a PolyRep given by its values on the basis."""

    def __init__(self, host, coeffs):
        if len(coeffs) != host.dim:
            raise ReprError("dual vector length does not match the representation")
        self.host = host
        self.coeffs = list(coeffs)

    def __call__(self, f):
        q = self.host.p**self.host.N
        c = self.host.coords(f)
        return sum(a * b for a, b in zip(self.coeffs, c)) % q


def kappa_j_functional(mu, lam, j, nu=None):
    """mu(nu_{lam,j}) as a p-adic number."""
    n = lam.n
    rep = mu.host
    if rep.m != 2 * n or rep.lam != tuple(lam.lam[0]):
        raise ReprError("dual vector does not live on V_lam")
    nu = nu or nu_vector(lam, j, rep.N)
    prec = min(nu.N, rep.N)
    return PadicNumber.from_residue(mu(nu.poly) % lam.p**prec, lam.p, prec - nu.k, -nu.k)
