"""Modular symbols for Gamma_0(N) with a left action on coefficients.

A symbol Phi: Div^0(P^1(Q)) -> M satisfies Phi(gamma D) = gamma * Phi(D). It is
recorded by its values v_i = Phi(g_i ({oo} - {0})) on fixed representatives g_i
of Gamma_0(N) \\ SL_2(Z), indexed by P^1(Z/N). The values satisfy

    v_i + gamma' * v_j = 0                      (g_i sigma = gamma' g_j)
    v_i + gamma_1 * v_j + gamma_2 * v_k = 0     (g_i tau = gamma_1 g_j, ...)

with sigma = (0 -1; 1 0) and tau = (0 -1; 1 -1). Arbitrary divisors are
reduced to these values with continued fractions.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np
import sympy

from .padic import PadicMatrix, PadicNumber, solve_mod_pN, modmatmul, to_zp
from .pardist import DistributionModule, MomentDistribution
from .weights import Weight

SIGMA = ((0, -1), (1, 0))
TAU = ((0, -1), (1, -1))
INFINITY = None  # the cusp oo


class SymbolError(ValueError):
    pass


def mul2(a, b):
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]))


def inv2(a):
    """Inverse of a 2x2 matrix; integral when det = +-1, Fractions otherwise."""
    d = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if d in (1, -1):
        return ((a[1][1] * d, -a[0][1] * d), (-a[1][0] * d, a[0][0] * d))
    d = Fraction(d)
    return ((a[1][1] / d, -a[0][1] / d), (-a[1][0] / d, a[0][0] / d))


def act_cusp(g, r):
    """Moebius action on P^1(Q); r is a Fraction or INFINITY."""
    (a, b), (c, d) = g
    if r is INFINITY:
        num, den = Fraction(a), Fraction(c)
    else:
        r = Fraction(r)
        num, den = a * r + b, c * r + d
    if den == 0:
        return INFINITY
    return Fraction(num) / den


def convergents(r):
    """Convergents p_k/q_k (as integer pairs) of a rational number."""
    r = Fraction(r)
    a, b = r.numerator, r.denominator
    p0, q0, p1, q1 = 0, 1, 1, 0
    out = []
    while True:
        quo, rem = divmod(a, b)
        p0, q0, p1, q1 = p1, q1, quo * p1 + p0, quo * q1 + q0
        out.append((p1, q1))
        if rem == 0:
            return out
        a, b = b, rem


class ManinData:
    """Cosets P^1(Z/N), their SL_2(Z) representatives and the Manin relations.

    ``variant`` changes the choice of lifts g_i; results of any computation
    that only depends on the symbol space must not depend on it.
    """

    def __init__(self, N, variant=0):
        if N < 1:
            raise SymbolError("level must be positive")
        self.N = N
        self.variant = variant
        self.units = [u for u in range(1, N + 1) if gcd(u, N) == 1] if N > 1 else [1]
        self.cosets = []
        self._index = {}
        for c in range(N):
            for d in range(N):
                if gcd(gcd(c, d), N) != 1 and N > 1:
                    continue
                key = self._normal(c, d)
                if key not in self._index:
                    self._index[key] = len(self.cosets)
                    self.cosets.append(key)
        self.reps = [self._lift(c, d) for c, d in self.cosets]
        self._build_relations()

    def _normal(self, c, d):
        if self.N == 1:
            return (0, 0)
        return min(((u * c) % self.N, (u * d) % self.N) for u in self.units)

    def index(self, c, d):
        return self._index[self._normal(c % self.N if self.N > 1 else 0, d % self.N if self.N > 1 else 0)]

    def _lift(self, c, d):
        """A matrix in SL_2(Z) with bottom row congruent to (c, d) mod N."""
        N = self.N
        if N == 1:
            return ((1, 0), (0, 1))
        c0 = c if c else N
        shift = self.variant * N
        d0 = d + shift
        while gcd(c0, d0) != 1:
            d0 += N
        # a d0 - b c0 = 1
        g, x, y = _egcd(d0, c0)
        a, b = x, -y
        assert a * d0 - b * c0 == 1
        return ((a, b), (c0, d0))

    def reduce(self, g):
        """(i, gamma) with g = gamma g_i and gamma in Gamma_0(N)."""
        i = self.index(g[1][0], g[1][1])
        gamma = mul2(g, inv2(self.reps[i]))
        if gamma[1][0] % self.N:
            raise SymbolError("coset reduction failed")
        return i, gamma

    def _build_relations(self):
        self.two_term = []
        self.three_term = []
        for i, g in enumerate(self.reps):
            j, gam = self.reduce(mul2(g, SIGMA))
            self.two_term.append([(i, ((1, 0), (0, 1))), (j, gam)])
            gt = mul2(g, TAU)
            j1, gam1 = self.reduce(gt)
            j2, gam2 = self.reduce(mul2(gt, TAU))
            self.three_term.append([(i, ((1, 0), (0, 1))), (j1, gam1), (j2, gam2)])

    @property
    def relations(self):
        return self.two_term + self.three_term

    def ncosets(self):
        return len(self.cosets)

    def path_to_infinity(self, r):
        """Phi({oo} - {r}) as a list of (+1, i, gamma): sum of gamma * v_i."""
        if r is INFINITY:
            return []
        out = []
        conv = convergents(r)
        prev = (1, 0)
        for k, (pk, qk) in enumerate(conv):
            det = prev[0] * qk - pk * prev[1]
            if det == 1:
                g = ((prev[0], pk), (prev[1], qk))
            else:
                g = ((prev[0], -pk), (prev[1], -qk))
            i, gam = self.reduce(g)
            out.append((1, i, gam))
            prev = (pk, qk)
        return out

    def divisor(self, r, s):
        """Phi({r} - {s}) = Phi({oo} - {s}) - Phi({oo} - {r})."""
        return self.path_to_infinity(s) + [(-e, i, g) for e, i, g in self.path_to_infinity(r)]

    def image_divisor(self, h, i):
        """Phi(h g_i ({oo} - {0})) for a rational matrix h."""
        g = self.reps[i]
        hg = mul2(h, g)
        return self.divisor(act_cusp(hg, INFINITY), act_cusp(hg, Fraction(0)))


def _egcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def hecke_cosets(ell, N):
    """Left coset representatives delta of Gamma_0(N) diag(ell,1) Gamma_0(N)."""
    reps = [((ell, a), (0, 1)) for a in range(ell)]
    if N % ell:
        reps.append(((1, 0), (0, ell)))
    return reps


IOTA = ((-1, 0), (0, 1))


# ---------------------------------------------------------------------------
# trivial coefficients over Q


class ClassicalSpace:
    """Symbols with trivial rational coefficients (weight 2)."""

    def __init__(self, N, variant=0):
        self.N = N
        self.manin = ManinData(N, variant)
        n = self.manin.ncosets()
        rows = []
        for rel in self.manin.relations:
            row = [0] * n
            for i, _ in rel:
                row[i] += 1
            rows.append(row)
        self.relation_matrix = sympy.Matrix(rows) if rows else sympy.zeros(0, n)
        null = self.relation_matrix.nullspace()
        self.basis = [[Fraction(int(x.p), int(x.q)) for x in v] for v in null]
        B = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in v] for v in self.basis]) \
            if self.basis else sympy.zeros(0, n)
        self._B = B
        _, piv = B.rref() if self.basis else (None, ())
        self.pivots = list(piv)
        self._Binv = B[:, self.pivots].inv() if self.basis else None

    @property
    def dim(self):
        return len(self.basis)

    def evaluate(self, values, terms):
        return sum((e * values[i] for e, i, _ in terms), Fraction(0))

    def coordinates(self, values):
        if not self.basis:
            return []
        v = sympy.Matrix([[sympy.Rational(values[i].numerator, values[i].denominator) for i in self.pivots]])
        c = v * self._Binv
        return [Fraction(int(x.p), int(x.q)) for x in c]

    def combination(self, coords):
        n = self.manin.ncosets()
        return [sum((c * b[i] for c, b in zip(coords, self.basis)), Fraction(0)) for i in range(n)]

    def operator(self, deltas, use_inverse=True):
        """Matrix (columns = images of basis vectors) of Phi -> sum delta*Phi(delta^-1 D)."""
        cols = []
        for b in self.basis:
            img = []
            for i in range(self.manin.ncosets()):
                tot = Fraction(0)
                for d in deltas:
                    h = inv2(d) if use_inverse else d
                    tot += self.evaluate(b, self.manin.image_divisor(h, i))
                img.append(tot)
            cols.append(self.coordinates(img))
        return sympy.Matrix(self.dim, self.dim, lambda r, c: sympy.Rational(cols[c][r].numerator,
                                                                              cols[c][r].denominator))

    def hecke(self, ell):
        return self.operator(hecke_cosets(ell, self.N))

    def star(self):
        """The involution Phi -> iota * Phi(iota D)."""
        return self.operator([IOTA])

    def values_at_level(self, values, other):
        """Values of a level-N symbol on the cosets of ``other`` (a multiple level)."""
        out = []
        for i in range(other.manin.ncosets()):
            g = other.manin.reps[i]
            out.append(self.evaluate(values, self.manin.divisor(act_cusp(g, INFINITY), act_cusp(g, Fraction(0)))))
        return out


class ClassicalEigensymbol:
    def __init__(self, N, values, eigenvalues, sign, eisenstein=False):
        self.N = N
        self.values = values
        self.eigenvalues = eigenvalues
        self.sign = sign
        self.eisenstein = eisenstein

    def __repr__(self):
        return f"ClassicalEigensymbol(N={self.N}, a={self.eigenvalues}, sign={self.sign})"


class HeckeDecomposition:
    def __init__(self, N, rational, irrational, eisenstein, multiple=()):
        self.N = N
        self.multiple = list(multiple)
        self.rational = rational
        self.irrational = irrational
        self.eisenstein = eisenstein


def small_primes(bound, N):
    return [q for q in sympy.primerange(2, bound) if N % q]


def hecke_classical(N, sign=1, primes=None, variant=0):
    """Rational Hecke eigensymbols (trivial weight) in the given star-eigenspace.

    Splits the sign-part of the symbol space by T_ell for the primes ell not
    dividing N below 20. Eigenlines with T_ell = 1 + ell for all ell are
    Eisenstein and reported separately; irreducible factors of degree > 1 are
    listed in ``irrational`` (these systems are not supported downstream).
    """
    if N > 50 or any(e > 1 for e in sympy.factorint(N).values()):
        raise SymbolError("hecke_classical supports squarefree N <= 50")
    space = ClassicalSpace(N, variant)
    primes = primes or small_primes(20, N)
    if space.dim == 0:
        return HeckeDecomposition(N, [], [], [])
    I = sympy.eye(space.dim)
    W = (space.star() - sign * I).nullspace()
    if not W:
        return HeckeDecomposition(N, [], [], [])
    Wm = sympy.Matrix.hstack(*W)
    pieces = [Wm]
    Ts = {ell: space.hecke(ell) for ell in primes}
    # split by each T_ell in turn
    for ell in primes:
        new = []
        for P in pieces:
            # restriction of T to the column span of P
            A = _restrict(Ts[ell], P)
            x = sympy.Symbol("x")
            for fac, mult in sympy.factor_list(A.charpoly(x).as_expr(), x)[1]:
                Q = sympy.Poly(fac, x)
                K = _poly_at(Q, A).nullspace()
                if not K:
                    continue
                new.append(P * sympy.Matrix.hstack(*K))
        pieces = new
    rational, irrational, eis, multiple = [], [], [], []
    for P in pieces:
        if P.shape[1] > 1:
            A = _restrict(Ts[primes[0]], P)
            cp = sympy.factor(A.charpoly(sympy.Symbol("x")).as_expr())
            if len(sympy.factor_list(cp)[1]) == 1 and sympy.degree(sympy.factor_list(cp)[1][0][0]) == 1:
                multiple.append((cp, P.shape[1]))  # repeated rational system (old or Eisenstein)
            else:
                irrational.append(cp)
            continue
        vec = P[:, 0]
        vals = space.combination([Fraction(int(sympy.Rational(x).p), int(sympy.Rational(x).q)) for x in vec])
        vals = _primitive(vals)
        eig = {}
        for ell in primes:
            img = Ts[ell] * vec
            eig[ell] = Fraction(int(sympy.Rational(img.dot(vec) / vec.dot(vec)).p),
                                int(sympy.Rational(img.dot(vec) / vec.dot(vec)).q))
        is_eis = all(eig[ell] == 1 + ell for ell in primes)
        sym = ClassicalEigensymbol(N, vals, eig, sign, is_eis)
        (eis if is_eis else rational).append(sym)
    return HeckeDecomposition(N, rational, irrational, eis, multiple)


def _restrict(T, P):
    """Matrix of T on the column span of P (assumed T-stable)."""
    sol = (P.T * P).inv() * P.T * T * P
    return sol


def _poly_at(Q, A):
    out = sympy.zeros(*A.shape)
    for c in Q.all_coeffs():
        out = out * A + c * sympy.eye(A.shape[0])
    return out


def _primitive(vals):
    from math import lcm
    den = 1
    for v in vals:
        den = lcm(den, v.denominator)
    ints = [int(v * den) for v in vals]
    g = 0
    for x in ints:
        g = gcd(g, x)
    g = g or 1
    first = next((x for x in ints if x), 1)
    if first < 0:
        g = -g
    return [Fraction(x, g) for x in ints]


def trace_of_hecke(N, ell, sign=1, variant=0, primes=None):
    """Trace of T_ell on the sign-part of the symbol space minus its Eisenstein part."""
    space = ClassicalSpace(N, variant)
    if space.dim == 0:
        return Fraction(0)
    primes = primes or small_primes(20, N)
    W = (space.star() - sign * sympy.eye(space.dim)).nullspace()
    if not W:
        return Fraction(0)
    P = sympy.Matrix.hstack(*W)
    A = _restrict(space.hecke(ell), P)
    eis = sympy.Matrix.vstack(*[_restrict(space.hecke(q), P) - (1 + q) * sympy.eye(P.shape[1]) for q in primes])
    n_eis = P.shape[1] - eis.rank()
    tr = sympy.Rational(A.trace()) - (1 + ell) * n_eis
    return Fraction(int(tr.p), int(tr.q))


# ---------------------------------------------------------------------------
# p-stabilisation


def hensel_root(coeffs, approx, p, N):
    """Root in Z_p of the integer polynomial (low -> high) near ``approx`` mod p^N."""
    q = p**N
    x = approx % q

    def f(t):
        return sum(c * t**k for k, c in enumerate(coeffs))

    def df(t):
        return sum(k * c * t ** (k - 1) for k, c in enumerate(coeffs) if k)

    if df(x) % p == 0:
        raise SymbolError("root is not simple mod p")
    for _ in range(N.bit_length() + 2):
        x = (x - f(x) * pow(df(x), -1, q)) % q
    if f(x) % q:
        raise SymbolError("Hensel iteration failed")
    return x


class StabilisedSymbol:
    """A U_p-eigensymbol of level Np with values in Z_p (trivial weight)."""

    def __init__(self, N, p, values, alpha, prec, source):
        self.N = N
        self.p = p
        self.values = values  # ints mod p^prec on the level-Np cosets
        self.alpha = alpha  # int mod p^prec
        self.prec = prec
        self.source = source

    def alpha_padic(self):
        return PadicNumber.from_residue(self.alpha, self.p, self.prec)


def p_stabilise(sym, p, prec=30, unit_root=True):
    """The U_p-eigenvector in span{phi(D), phi(diag(p,1) D)} at level Np."""
    N = sym.N
    if N % p == 0:
        raise SymbolError("p divides the level already")
    lvl = ClassicalSpace(N)
    big = ClassicalSpace(N * p)
    v1 = lvl.values_at_level(sym.values, big)
    Vp = ((p, 0), (0, 1))
    v2 = []
    for i in range(big.manin.ncosets()):
        g = big.manin.reps[i]
        hg = mul2(Vp, g)
        v2.append(lvl.evaluate(sym.values, lvl.manin.divisor(act_cusp(hg, INFINITY), act_cusp(hg, Fraction(0)))))
    c1, c2 = big.coordinates(v1), big.coordinates(v2)
    P = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in c1],
                      [sympy.Rational(x.numerator, x.denominator) for x in c2]]).T
    Up = big.operator([((p, a), (0, 1)) for a in range(p)])
    A = _restrict(Up, P)
    x = sympy.Symbol("x")
    cp = [int(c) for c in reversed(sympy.Poly(A.charpoly(x).as_expr(), x).all_coeffs())]
    # unit root: reduce mod p, the nonzero root
    roots = [r for r in range(p) if sum(c * r**k for k, c in enumerate(cp)) % p == 0]
    target = [r for r in roots if (r != 0) == unit_root]
    if not target:
        raise SymbolError("no root of the requested slope type")
    alpha = hensel_root(cp, target[0], p, prec)
    q = p**prec
    # eigenvector of A for alpha: (A - alpha) w = 0 with A integral after scaling
    a11, a12, a21, a22 = (A[0, 0], A[0, 1], A[1, 0], A[1, 1])
    fr = lambda z: to_zp(Fraction(int(sympy.Rational(z).p), int(sympy.Rational(z).q)), p, prec)
    if (fr(a12) % p) or (fr(a11) - alpha) % p:
        w = ((fr(a12)) % q, (alpha - fr(a11)) % q)
    else:
        w = ((alpha - fr(a22)) % q, fr(a21) % q)
    vals1 = [to_zp(v, p, prec) for v in v1]
    vals2 = [to_zp(v, p, prec) for v in v2]
    vals = [(w[0] * a + w[1] * b) % q for a, b in zip(vals1, vals2)]
    # make primitive
    from .padic import val_mod
    vmin = min(val_mod(v, p, prec) for v in vals)
    if vmin:
        vals = [(v // p**vmin) for v in vals]
        prec -= vmin
        q = p**prec
        vals = [v % q for v in vals]
        alpha %= q
    return StabilisedSymbol(N * p, p, vals, alpha, prec, sym)


# ---------------------------------------------------------------------------
# distribution-valued symbols


class DistributionSymbolSpace:
    """Symbols of level N with values in a truncated distribution module (n = 1)."""

    def __init__(self, N, module, variant=0):
        if module.n != 1:
            raise NotImplementedError("symbol spaces are implemented for n = 1")
        if N % module.p:
            raise SymbolError("the level must be divisible by p")
        self.N = N
        self.module = module
        self.manin = ManinData(N, variant)
        self.ncos = self.manin.ncosets()
        self.dim = module.dim
        self.size = self.ncos * self.dim
        self.q = module.q
        self._ops = {}

    # -- assembling operators as one big matrix on the stacked values
    def _accumulate(self, A, row_block, terms, left=None):
        d, q = self.dim, self.q
        for e, j, gam in terms:
            S = self.module.matrix(gam)
            if left is not None:
                S = modmatmul(left, S, q)
            blk = A[row_block * d:(row_block + 1) * d, j * d:(j + 1) * d]
            A[row_block * d:(row_block + 1) * d, j * d:(j + 1) * d] = (blk + e * S) % q

    def relation_matrix(self):
        rels = self.manin.relations
        d = self.dim
        A = np.zeros((len(rels) * d, self.size), dtype=np.int64 if self.q < 2**31 else object)
        for r, rel in enumerate(rels):
            self._accumulate(A, r, [(1, i, g) for i, g in rel])
        return A

    def operator(self, deltas, key=None):
        """Matrix of Phi -> sum_delta delta * Phi(delta^-1 D) on stacked values."""
        if key is not None and key in self._ops:
            return self._ops[key]
        A = np.zeros((self.size, self.size), dtype=np.int64 if self.q < 2**31 else object)
        for delta in deltas:
            Sd = self.module.matrix(delta)
            dinv = inv2(delta)
            for i in range(self.ncos):
                self._accumulate(A, i, self.manin.image_divisor(dinv, i), left=Sd)
        if key is not None:
            self._ops[key] = A
        return A

    def up(self):
        p = self.module.p
        return self.operator([((p, a), (0, 1)) for a in range(p)], key="U")

    def hecke(self, ell):
        return self.operator(hecke_cosets(ell, self.N), key=("T", ell))

    def star(self):
        return self.operator([IOTA], key="iota")

    def apply(self, A, Phi):
        v = np.array(Phi.stacked(), dtype=A.dtype)
        out = modmatmul(A, v.reshape(-1, 1), self.q).reshape(-1)
        return DistributionSymbol(self, out)

    def relation_defect(self, Phi):
        R = self.relation_matrix()
        v = np.array(Phi.stacked(), dtype=R.dtype)
        return modmatmul(R, v.reshape(-1, 1), self.q).reshape(-1)

    def lift(self, values):
        """A symbol whose moment-0 values are ``values`` (trivial weight).

        Solves the Manin relations with the moment-0 coordinates fixed; the
        other moments are unknowns constrained to the integral lattice.
        """
        mod = self.module
        if mod.r != 1:
            raise NotImplementedError("lifting is implemented for one-dimensional V^H")
        p, M, q = mod.p, mod.M, self.q
        d = self.dim
        R = self.relation_matrix().astype(object)
        # scale unknown columns of degree k by p^k (unknown x, value nu = p^k x)
        deg = np.array([int(mod.degrees[c % d]) for c in range(self.size)])
        fixed = [c for c in range(self.size) if deg[c] == 0]
        free = [c for c in range(self.size) if deg[c] > 0]
        scale = np.array([p ** int(deg[c]) for c in free], dtype=object)
        Rf = (R[:, free] * scale[None, :]) % q
        rhs = (-R[:, fixed].dot(np.array([int(values[c // d]) % q for c in fixed], dtype=object))) % q
        Mat = PadicMatrix.from_array(Rf, p, M)
        x, _ = solve_mod_pN(Mat, [int(t) for t in rhs], reduce=False)
        nu = [0] * self.size
        for c in fixed:
            nu[c] = int(values[c // d]) % q
        for c, xv, s in zip(free, x, scale):
            nu[c] = int(xv) * int(s) % q
        Phi = DistributionSymbol(self, nu)
        if any(int(t) for t in self.relation_defect(Phi)):
            raise SymbolError("lift does not satisfy the Manin relations")
        return Phi

    def zero(self):
        return DistributionSymbol(self, [0] * self.size)


class DistributionSymbol:
    def __init__(self, space, stacked):
        self.space = space
        q = space.q
        self._v = [int(x) % q for x in stacked]

    def stacked(self):
        return list(self._v)

    def value(self, i):
        d = self.space.dim
        return MomentDistribution(self.space.module, self._v[i * d:(i + 1) * d])

    def evaluate(self, terms):
        """Phi of a divisor given as (sign, i, gamma) terms."""
        mod = self.space.module
        acc = mod.zero()
        for e, i, gam in terms:
            v = self.value(i).apply(mod.matrix(gam))
            acc = acc + v if e > 0 else acc - v
        return acc

    def at(self, r, s):
        return self.evaluate(self.space.manin.divisor(r, s))

    def __sub__(self, other):
        return DistributionSymbol(self.space, [a - b for a, b in zip(self._v, other._v)])

    def scale(self, c):
        c = int(c) % self.space.q
        return DistributionSymbol(self.space, [a * c for a in self._v])

    def is_zero(self):
        return not any(self._v)

    def min_scaled_valuation(self):
        """Smallest p-adic valuation among the stacked scaled moments (M if zero)."""
        p, M = self.space.module.p, self.space.module.M
        best = M
        for x in self._v:
            if x:
                v = 0
                while x % p == 0:
                    x //= p
                    v += 1
                best = min(best, v)
        return best

    def moment0_values(self):
        d = self.space.dim
        return [self._v[i * d] for i in range(self.space.ncos)]


def lift_noncritical(stab, M, iterations=None, weight=None, report=None):
    """Overconvergent lift of a p-stabilised trivial-weight eigensymbol.

    Starts from an arbitrary solution of the Manin relations with the right
    moment-0 values and iterates Phi -> U_p Phi / alpha. Each step gains one
    digit in the scaled moments; ``report`` collects the defect valuations.
    """
    p = stab.p
    weight = weight or Weight.simple((0, 0), p)
    alpha = stab.alpha % p**M
    if alpha % p == 0:
        # positive slope: one step gains 1 - v(alpha) digits only
        raise SymbolError("only ordinary refinements are lifted by this routine; "
                          "a slope-h refinement needs M + h * iterations extra digits")
    module = DistributionModule(weight, M)
    space = DistributionSymbolSpace(stab.N, module)
    Phi = space.lift([v % p**M for v in stab.values])
    U = space.up()
    ainv = pow(alpha, -1, p**M)
    iterations = iterations or M + 1
    for _ in range(iterations):
        nxt = space.apply(U, Phi).scale(ainv)
        if report is not None:
            report.append((nxt - Phi).min_scaled_valuation())
        Phi = nxt
    return Phi
