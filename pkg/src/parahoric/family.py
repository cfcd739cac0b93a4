"""Weight families truncated at a base weight, family symbols and local charts.

The family ring is Z_p[[T1', T2']] truncated at total degree D, where the
weight coordinates are T_i = p^s T_i'. Moving the family variables into the
smaller disc makes the family action integral on the scaled moment lattice:
the x^k coefficient of log<a + c x> is only divisible by p^(k - v(k)).

n = 1 throughout: the family character on H = GL_1 x GL_1 is

    chi(h1, h2) = h1^lam1 h2^lam2 exp(T1 log<h1> + T2 log<h2>).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .modsym import IOTA, DistributionSymbol, DistributionSymbolSpace, ManinData, inv2
from .padic import INF, PadicMatrix, PadicNumber, kernel_mod_pN, modmatmul, newton_polygon, solve_mod_pN, to_zp, valuation
from .galdist import GaloisDistribution, GaloisGroupData
from .pardist import DistributionModule, Series, frac_mod, mat_inverse


class FamilyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# p-adic logarithm of principal units


def padic_log(x, p, prec):
    """log(x) for x = 1 mod p (rational), as a PadicNumber of precision prec."""
    x = Fraction(x)
    y = x - 1
    if valuation(y, p) < 1:
        raise FamilyError("logarithm needs x = 1 mod p")
    P = prec + 10
    q = p**P
    yr = to_zp(y, p, P)
    tot = 0
    k = 1
    while k - valuation(k, p) < P + 1:
        vk = valuation(k, p)
        term = pow(yr, k, p ** (P + vk))
        # y^k / k, exact since p^k divides y^k
        term = (term // p**vk) * pow(k // p**vk, -1, q)
        tot += -term if k % 2 == 0 else term
        k += 1
    return PadicNumber.from_residue(tot % q, p, prec)


def log_angle(x, p, prec):
    """log<x> = log(x^(p-1)) / (p-1) for a p-adic unit x."""
    x = Fraction(x)
    if valuation(x, p) != 0:
        raise FamilyError("not a p-adic unit")
    return padic_log(x ** (p - 1), p, prec) / (p - 1)


# ---------------------------------------------------------------------------
# the truncated ring


class TruncatedAffinoid:
    """Z_p[[T1', T2']] / (total degree > D) with coefficients known mod p^prec."""

    def __init__(self, base, D=3, prec=10, s=2, nvars=2):
        if base.p == 2:
            raise FamilyError("p = 2 is not supported")
        if base.n != 1:
            raise NotImplementedError("families are implemented for n = 1")
        self.base = base
        self.p = base.p
        self.D = D
        self.prec = prec
        self.s = s
        self.nvars = nvars
        self.monomials = [m for d in range(D + 1) for m in _monos(nvars, d)]
        self.index = {m: i for i, m in enumerate(self.monomials)}

    def degree(self, m):
        return sum(m)

    def add_mono(self, a, b):
        m = tuple(x + y for x, y in zip(a, b))
        return m if sum(m) <= self.D else None

    def sub_mono(self, e, f):
        m = tuple(x - y for x, y in zip(e, f))
        return m if all(x >= 0 for x in m) else None

    def zero(self):
        return Tseries(self, {})

    def one(self):
        return self.const(1)

    def const(self, c):
        return Tseries(self, {self.monomials[0]: _pad(c, self.p, self.prec)})

    def var(self, i):
        m = [0] * self.nvars
        m[i] = 1
        if self.D < 1:
            return self.zero()
        return Tseries(self, {tuple(m): PadicNumber.make(1, self.p, self.prec)})

    def point(self, weight):
        """T'-coordinates of an algebraic weight in the family disc."""
        if weight.p != self.p or weight.n != 1:
            raise FamilyError("weight does not belong to this family")
        shifts = [a - b for a, b in zip(weight.lam[0], self.base.lam[0])]
        if any(k % (self.p - 1) for k in shifts):
            raise FamilyError("weight differs from the base by a nontrivial tame character")
        pt = tuple(Fraction(k, self.p**self.s) for k in shifts)
        for t in pt:
            if t and valuation(t, self.p) < 1:
                raise FamilyError(f"weight {weight} lies outside the convergence disc of the truncation")
        return pt

    def truncation_error(self, point):
        """Valuation bound for the dropped terms of degree > D at a point."""
        v = min((valuation(t, self.p) for t in point if t), default=INF)
        return INF if v == INF else v * (self.D + 1)


def _monos(nv, d):
    if nv == 1:
        yield (d,)
        return
    for i in range(d, -1, -1):
        for rest in _monos(nv - 1, d - i):
            yield (i,) + rest


def _pad(c, p, prec):
    return c if isinstance(c, PadicNumber) else PadicNumber.make(c, p, prec)


class Tseries:
    def __init__(self, ring, coeffs):
        self.ring = ring
        self.c = {m: v for m, v in coeffs.items() if m in ring.index}

    def _get(self, m):
        return self.c.get(m)

    def __add__(self, other):
        if not isinstance(other, Tseries):
            other = self.ring.const(other)
        out = dict(self.c)
        for m, v in other.c.items():
            out[m] = v if m not in out else out[m] + v
        return Tseries(self.ring, out)

    def __neg__(self):
        return Tseries(self.ring, {m: -v for m, v in self.c.items()})

    def __sub__(self, other):
        if not isinstance(other, Tseries):
            other = self.ring.const(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Tseries):
            return Tseries(self.ring, {m: v * other for m, v in self.c.items()})
        out = {}
        R = self.ring
        for m1, a in self.c.items():
            for m2, b in other.c.items():
                m = R.add_mono(m1, m2)
                if m is None:
                    continue
                t = a * b
                out[m] = t if m not in out else out[m] + t
        return Tseries(R, out)

    __rmul__ = __mul__

    def constant(self):
        return self.c.get(self.ring.monomials[0], PadicNumber.zero(self.ring.p, self.ring.prec))

    def is_zero(self):
        return all(v.is_zero() for v in self.c.values())

    def min_valuation(self):
        vals = [v.val for v in self.c.values() if not v.is_zero()]
        return min(vals) if vals else INF

    def sp(self, point):
        """Substitute T' = point; the result carries the truncation bound."""
        R = self.ring
        tot = PadicNumber.zero(R.p, R.prec)
        for m, v in self.c.items():
            t = Fraction(1)
            for x, e in zip(point, m):
                t *= Fraction(x) ** e
            tot = tot + v * t
        return tot.with_prec(R.truncation_error(point)) if R.truncation_error(point) != INF else tot

    def __repr__(self):
        return "Tseries({%s})" % ", ".join(f"{m}: {v.compact()}" for m, v in sorted(self.c.items()))


def sp_lambda(x, weight):
    """Evaluate a family element at an algebraic weight of the disc."""
    return x.sp(x.ring.point(weight))


def chi_omega(ring, h1, h2):
    """h1^lam1 h2^lam2 exp(T1 log<h1> + T2 log<h2>) truncated at degree D."""
    p, P = ring.p, ring.prec + 5
    l1, l2 = ring.base.lam[0]
    base = Fraction(h1) ** l1 * Fraction(h2) ** l2
    logs = [log_angle(h1, p, P), log_angle(h2, p, P)]
    out = {}
    ps = Fraction(p) ** ring.s
    for m in ring.monomials:
        c = PadicNumber.make(base, p, P)
        for L, e in zip(logs, m):
            c = c * (L ** e) * (ps**e / factorial(e))
        out[m] = c.with_prec(ring.prec)
    return Tseries(ring, out)


# ---------------------------------------------------------------------------
# family action on the scaled moment lattice


class FamilyModule:
    """D_Omega truncated at M moments: matrices S(g) = sum_f S_f T'^f."""

    def __init__(self, ring, M):
        self.ring = ring
        self.base = DistributionModule(ring.base, M, ring.prec)
        self.p = ring.p
        self.M = M
        self.q = self.base.q
        self.dim = self.base.dim
        self.degrees = self.base.degrees
        self._cache = {}

    def components(self, g):
        key = tuple(tuple(Fraction(x) for x in r) for r in g)
        if key not in self._cache:
            self._cache[key] = self._components(key)
        return self._cache[key]

    def _components(self, g):
        R, p = self.ring, self.p
        base = self.base
        zero = R.monomials[0]
        gi = mat_inverse(g)
        (a, b), (c, d) = gi
        det = a * d - b * c
        if det != 1:
            # the family factor is trivial on diagonal matrices whose unit parts have trivial <.>
            ua = a / Fraction(p) ** valuation(a, p)
            ud = det / Fraction(p) ** valuation(det, p)
            if c != 0 or not (_trivial_angle(ua, p) and _trivial_angle(ud, p)):
                raise NotImplementedError("family action is implemented for determinant-one "
                                          "and upper-triangular elements with trivial <.>-parts")
            return {zero: base.matrix(g)}
        if valuation(a, p) != 0 or valuation(c, p) < 1:
            raise FamilyError("element is not in the Iwahori subgroup")
        M = self.M
        P = self.base.N + M
        q2 = p**P
        ser = Series(1, M - 1, q2)
        Cbase = base._coefficients_n1(g)
        # Lambda(x) = log<a> + log(1 + (c/a) x)
        L = ser.const(log_angle(a, p, P).residue(P))
        for k in range(1, M):
            L = ser.add(L, {(k,): frac_mod(Fraction((-1) ** (k + 1)) * (c / a) ** k / k, q2)})
        out = {}
        Lj = ser.const(1)
        for j in range(R.D + 1):
            if j:
                Lj = ser.mul(Lj, L)
            cj = Fraction(p ** (R.s * j), factorial(j))
            for j1 in range(j + 1):
                j2 = j - j1
                mono = (j1, j2)
                coef = cj * comb(j, j1) * (-1) ** j2
                fac = ser.scale(Lj, coef)
                C = []
                for row in Cbase:
                    rs = {(i,): x for i, x in enumerate(row) if x}
                    prod = ser.mul(rs, fac)
                    C.append([prod.get((i,), 0) for i in range(M)])
                out[mono] = base._scale(C)
        return out


def _trivial_angle(u, p):
    return Fraction(u) ** (p - 1) == 1


class _FamilySymbolOps:
    """Relation and U_p matrices of the family symbol space, one per monomial."""

    def __init__(self, N, fmod):
        self.fmod = fmod
        self.ring = fmod.ring
        self.manin = ManinData(N)
        self.ncos = self.manin.ncosets()
        self.dim = fmod.dim
        self.size = self.ncos * self.dim
        self.q = fmod.q
        self.N = N
        dt = np.int64 if self.q < 2**31 else object
        self.dtype = dt
        R = self.ring
        d = self.dim
        rels = self.manin.relations
        self.rel = {m: np.zeros((len(rels) * d, self.size), dtype=dt) for m in R.monomials}
        for r, rel in enumerate(rels):
            for i, g in rel:
                for m, S in fmod.components(g).items():
                    blk = self.rel[m][r * d:(r + 1) * d, i * d:(i + 1) * d]
                    self.rel[m][r * d:(r + 1) * d, i * d:(i + 1) * d] = (blk + S) % self.q
        p = fmod.p
        self.up = self._operator([((p, a), (0, 1)) for a in range(p)])
        self.star = self._operator([IOTA])

    def _operator(self, deltas):
        R, fmod, d, q = self.ring, self.fmod, self.dim, self.q
        out = {m: np.zeros((self.size, self.size), dtype=self.dtype) for m in R.monomials}
        for delta in deltas:
            Sd = fmod.components(delta)[R.monomials[0]]
            dinv = inv2(delta)
            for i in range(self.ncos):
                for e, j, gam in self.manin.image_divisor(dinv, i):
                    for m, S in fmod.components(gam).items():
                        blk = out[m][i * d:(i + 1) * d, j * d:(j + 1) * d]
                        out[m][i * d:(i + 1) * d, j * d:(j + 1) * d] = (blk + e * modmatmul(Sd, S, q)) % q
        return out


@dataclass
class FamilySymbol:
    ops: _FamilySymbolOps
    parts: dict  # monomial -> stacked scaled moments (list of ints mod q)
    alpha: Tseries
    precision: int = 0
    alpha_res: dict = None  # residues mod p^K of the alpha coefficients

    def at(self, r, s):
        """Value on {r} - {s}: monomial -> scaled moment vector."""
        R = self.ops.ring
        fm = self.ops.fmod
        d, q = self.ops.dim, self.ops.q
        out = {m: np.zeros(d, dtype=object) for m in R.monomials}
        for e, i, gam in self.ops.manin.divisor(r, s):
            comps = fm.components(gam)
            for mf, S in comps.items():
                for mg, vec in self.parts.items():
                    m = R.add_mono(mf, mg)
                    if m is None:
                        continue
                    v = np.array(vec[i * d:(i + 1) * d], dtype=object)
                    out[m] = (out[m] + e * S.astype(object).dot(v)) % q
        return out

    def specialize_weight(self, weight, M=None):
        """sp_lambda: the single-weight symbol at an algebraic weight of the disc."""
        R = self.ops.ring
        pt = R.point(weight)
        q = self.ops.q
        acc = [0] * self.ops.size
        for m, vec in self.parts.items():
            t = Fraction(1)
            for x, e in zip(pt, m):
                t *= Fraction(x) ** e
            tm = frac_mod(t, q)
            acc = [(a + tm * int(v)) % q for a, v in zip(acc, vec)]
        module = DistributionModule(weight, self.ops.fmod.M, R.prec)
        space = DistributionSymbolSpace(self.ops.N, module)
        return DistributionSymbol(space, acc)


def family_eigensymbol(N, ring, M, Phi0, alpha0, sign=1):
    """Solve U Phi = alpha Phi over the truncated ring, order by order in T'.

    Phi0, alpha0: the base eigensymbol (scaled moments mod p^M) and eigenvalue.
    Normalisation: the moment-0 coordinate of Phi at a generator where Phi0
    is a unit is constant in T'. The symbol is kept in the sign-``sign``
    eigenspace of the involution; otherwise the plus and minus parts of one
    eigenform would make the family vector non-unique.
    """
    fmod = FamilyModule(ring, M)
    ops = _FamilySymbolOps(N, fmod)
    p, q, d = ring.p, ops.q, ops.dim
    K = ring.prec
    n = ops.size
    R = ring
    zero = R.monomials[0]
    v0 = [int(x) % q for x in Phi0.stacked()]
    a0 = int(alpha0) % q
    st0 = ops.star[zero].astype(object)
    half = pow(2, -1, q)
    v0 = [int(x) for x in (np.array(v0, dtype=object) + sign * st0.dot(np.array(v0, dtype=object))) * half % q]
    c0 = next((i * d for i in range(ops.ncos) if v0[i * d] % p), None)
    if c0 is None:
        raise FamilyError("base symbol has no unit moment-0 value")
    # unknown columns: Phi_e scaled by p^deg, then alpha_e
    deg = np.array([int(fmod.degrees[c % d]) for c in range(n)])
    colscale = np.array([p ** int(x) for x in deg] + [1], dtype=object)
    rel0 = ops.rel[zero].astype(object)
    up0 = ops.up[zero].astype(object)
    nr = rel0.shape[0]
    A = np.zeros((nr + 2 * n + 1, n + 1), dtype=object)
    A[:nr, :n] = rel0
    A[nr:nr + n, :n] = (up0 - a0 * np.eye(n, dtype=object)) % q
    A[nr:nr + n, n] = (-np.array(v0, dtype=object)) % q
    A[nr + n:nr + 2 * n, :n] = (st0 - sign * np.eye(n, dtype=object)) % q
    A[nr + 2 * n, c0] = 1
    A = (A * colscale[None, :]) % q
    Amat = PadicMatrix.from_array(A, p, K)
    parts = {zero: v0}
    alphas = {zero: a0}
    for e in R.monomials[1:]:
        rhs_rel = np.zeros(nr, dtype=object)
        rhs_up = np.zeros(n, dtype=object)
        rhs_st = np.zeros(n, dtype=object)
        for f in R.monomials[1:]:
            g = R.sub_mono(e, f)
            if g is None or g not in parts:
                continue
            vg = np.array(parts[g], dtype=object)
            rhs_rel = (rhs_rel - ops.rel[f].astype(object).dot(vg)) % q
            rhs_up = (rhs_up - ops.up[f].astype(object).dot(vg)) % q
            rhs_st = (rhs_st - ops.star[f].astype(object).dot(vg)) % q
            if f != e:
                rhs_up = (rhs_up + alphas[f] * vg) % q
        rhs = [int(x) for x in rhs_rel] + [int(x) for x in rhs_up] + [int(x) for x in rhs_st] + [0]
        try:
            x, _ = solve_mod_pN(Amat, rhs, reduce=False)
        except ValueError as exc:
            raise FamilyError(f"family eigen-equation has no solution at order {e}") from exc
        sol = [int(xi) * int(s) % q for xi, s in zip(x, colscale)]
        parts[e] = sol[:n]
        alphas[e] = sol[n]
    # the eigenvalue coefficients are stable to one digit less than the working precision
    prec = K - 1
    alpha = Tseries(R, {m: PadicNumber.from_residue(v, p, prec) for m, v in alphas.items()})
    return FamilySymbol(ops, parts, alpha, prec, alphas)


def family_defects(Phi):
    """Valuations of the relation and eigen defects of a family symbol (per monomial)."""
    ops, R = Phi.ops, Phi.ops.ring
    q, p = ops.q, R.p
    worst = INF
    for e in R.monomials:
        rel = np.zeros(ops.rel[e].shape[0], dtype=object)
        up = np.zeros(ops.size, dtype=object)
        for f in R.monomials:
            g = R.sub_mono(e, f)
            if g is None:
                continue
            vg = np.array(Phi.parts[g], dtype=object)
            rel = (rel + ops.rel[f].astype(object).dot(vg)) % q
            up = (up + ops.up[f].astype(object).dot(vg)) % q
            up = (up - Phi.alpha_res[f] * vg) % q
        for x in list(rel) + list(up):
            if int(x):
                worst = min(worst, _v(int(x), p))
    return worst


def _v(x, p):
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# evaluation maps in families


class FamilyGaloisDistribution:
    """Galois distribution with Tseries moments: comps[a][i] = int y^i over component a."""

    def __init__(self, group, ring, M, comps):
        self.group = group
        self.ring = ring
        self.M = M
        self.comps = comps

    def specialize(self, weight):
        pt = self.ring.point(weight)
        comps = {a: [x.sp(pt) for x in moms] for a, moms in self.comps.items()}
        return GaloisDistribution(self.group, self.M, comps)

    def constant_term(self):
        return GaloisDistribution(self.group, self.M,
                                  {a: [x.constant() for x in moms] for a, moms in self.comps.items()})

    def is_zero(self):
        return all(x.is_zero() for moms in self.comps.values() for x in moms)


def _weight_factor(ring, r, beta, i, M, P):
    """x-coefficients (mod p^P) of kappa_1(r) (-1)^lam1 (-x/r)^i w^lam1 w^T1, per T1'-power.

    w = 1 - p^beta x / r. Returns ({j: [c_0, c_1, ...]}, cap) where the lists
    run over x^0..x^(M-1) and cap bounds the dropped tail against the
    lattice estimate v(mu(x^k)) >= -k.
    """
    p = ring.p
    l1 = ring.base.lam[0][0]
    ext = M + 3 * P
    q = p ** (P + 2 * ext)
    ser = Series(1, ext, q)
    pb = Fraction(p**beta)
    w = ser.add(ser.const(1), ser.var(0, -pb / r))
    base = ser.scale(ser.mul(ser.power(w, l1), ser.power(ser.var(0, 1), i)),
                     Fraction(r) ** l1 * (-1) ** l1 * Fraction(-1, r) ** i)
    lam = ser.const(log_angle(r, p, P + 2 * ext).residue(P + 2 * ext))
    for m in range(1, ext + 1):
        lam = ser.add(lam, {(m,): frac_mod(-(pb / r) ** m / m, q)})
    out = {}
    cap = INF
    power = ser.const(1)
    for j in range(ring.D + 1):
        if j:
            power = ser.mul(power, lam)
        fac = ser.scale(power, Fraction(p ** (ring.s * j), factorial(j)))
        c = ser.mul(base, fac)
        out[j] = [c.get((k,), 0) % p**P for k in range(M)]
        for k in range(M, ext + 1):
            x = c.get((k,), 0)
            if x:
                cap = min(cap, _v(x, p) - k)
    return out, cap


def family_ev(Phi, beta, eta0=None, cycle=None):
    """Ev_beta of a family symbol, with Tseries moments about the component base points."""
    from .evalmaps import CycleData, _rebase
    ops, R = Phi.ops, Phi.ops.ring
    p, M, K = R.p, ops.fmod.M, R.prec
    l1, l2 = R.base.lam[0]
    cycle = cycle or CycleData.gl2(p, beta)
    grp = GaloisGroupData(p, beta)
    comps = {}
    P = K + 2
    for a in cycle.components:
        r = cycle.representative(a)
        if (l1 + l2) % 2:
            comps[a] = [R.zero() for _ in range(M)]
            continue
        val = Phi.at(*cycle.paths[a])
        moms = []
        for i in range(M):
            fac, cap = _weight_factor(R, r, beta, i, M, P)
            acc = {}
            for g, vec in val.items():
                for j, cs in fac.items():
                    m = R.add_mono(g, (j,) + (0,) * (R.nvars - 1))
                    if m is None:
                        continue
                    for k, c in enumerate(cs):
                        if not c or not int(vec[k]):
                            continue
                        top = min(P, K + _v(c, p))
                        x = PadicNumber.from_residue(c * int(vec[k]) % p**top, p, top - k, -k)
                        acc[m] = x if m not in acc else acc[m] + x
            if cap != INF:
                acc = {m: x.with_prec(min(cap, x.prec)) for m, x in acc.items()}
            moms.append(Tseries(R, acc))
        moms = _rebase(moms, r, a, p, beta)
        if eta0 is not None:
            moms = [x * eta0(1) for x in moms]
        comps[a] = [x * cycle.theta[a] for x in moms]
    return FamilyGaloisDistribution(grp, R, M, comps)


def square_defect(Phi, beta, weights):
    """Compare sp(Ev(Phi)) with Ev(sp(Phi)) at sample weights.

    Per weight: (defect, digits) where defect is the smallest valuation of a
    difference that is nonzero at its precision (INF when none is) and digits
    is the precision of the total mass.
    """
    from .evalmaps import ev_beta
    famev = family_ev(Phi, beta)
    M = Phi.ops.fmod.M
    out = {}
    for lam in weights:
        left = famev.specialize(lam)
        right = ev_beta(Phi.specialize_weight(lam), beta, nmom=M)
        out[lam.lam[0]] = (defect(left, right), min(min(x.prec, y.prec) for x, y in
                                                     ((left.comps[a][0], right.comps[a][0]) for a in left.comps)))
    return out


def defect(mu, nu):
    """Smallest valuation of a moment difference that is nonzero at its precision."""
    best = INF
    for a in mu.comps:
        for x, y in zip(mu.comps[a], nu.comps[a]):
            d = x - y
            if not d.is_zero():
                best = min(best, d.val)
    return best


def specialization_check(Phi, sign=1):
    """sp at the base weight on the family eigenline vs the base eigenspace.

    The family eigenline is free of rank one, so sp is an isomorphism mod the
    maximal ideal exactly when the base (U = alpha_0, sign) eigenspace is a
    line and sp(Phi) = Phi_0 generates it.
    """
    ops, R = Phi.ops, Phi.ops.ring
    p, q, n, d = R.p, ops.q, ops.size, ops.dim
    zero = R.monomials[0]
    a0 = Phi.alpha_res[zero]
    eye = np.eye(n, dtype=object)
    A = np.vstack([ops.rel[zero].astype(object), (ops.up[zero].astype(object) - a0 * eye) % q,
                   (ops.star[zero].astype(object) - sign * eye) % q])
    scale = np.array([p ** int(ops.fmod.degrees[c % d]) for c in range(n)], dtype=object)
    ker = kernel_mod_pN(PadicMatrix.from_array((A * scale[None, :]) % q, p, R.prec))
    v0 = Phi.parts[zero]
    # coordinates of Phi_0 in the kernel basis, read off at the free positions
    coords = [int(v0[f]) // int(scale[f]) for f in ker.free]
    surjective = len(ker) == 1 and coords[0] % p != 0
    return {"family_rank": 1, "base_eigenspace_dim": len(ker), "surjective": surjective, "certificate": ker.cert}


# ---------------------------------------------------------------------------
# local charts


def berkowitz(A, zero, one):
    """Characteristic polynomial det(x - A), coefficients low -> high, division free."""
    n = len(A)
    if n == 0:
        return [one]
    poly = [one, -A[0][0]]  # high -> low
    for r in range(1, n):
        a = A[r][r]
        Rrow = A[r][:r]
        col = [A[i][r] for i in range(r)]
        t = [one, -a]
        v = col
        for _ in range(r):
            t.append(-_dot(Rrow, v, zero))
            v = [_dot(A[i][:r], v, zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                if i - j < len(t) and j < len(poly):
                    acc = acc + t[i - j] * poly[j]
            new.append(acc)
        poly = new
    return list(reversed(poly))


def _dot(xs, ys, zero):
    acc = zero
    for x, y in zip(xs, ys):
        acc = acc + x * y
    return acc


class ChartError(ValueError):
    pass


def _pmul(a, b, zero):
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _psub(a, b, zero):
    n = max(len(a), len(b))
    a = a + [zero] * (n - len(a))
    b = b + [zero] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _solve_padic(A, b, p, prec):
    """Gaussian elimination with minimal-valuation pivots over PadicNumbers."""
    n = len(A)
    A = [row[:] + [b[i]] for i, row in enumerate(A)]
    for c in range(n):
        piv = min(range(c, n), key=lambda i: A[i][c].val)
        if A[piv][c].is_zero():
            raise ChartError("Sylvester system is singular to the working precision")
        A[c], A[piv] = A[piv], A[c]
        inv = A[c][c].inverse()
        for i in range(n):
            if i != c and not A[i][c].is_zero():
                f = A[i][c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [A[i][n] * A[i][i].inverse() for i in range(n)]


def _sylvester_solve(G, H, E, p, prec):
    """(dG, dH) with G dH + H dG = E, deg dG < deg G, deg dH < deg H."""
    r, s = len(G) - 1, len(H) - 1
    n = r + s
    zero = PadicNumber.zero(p, prec)
    A = [[zero] * n for _ in range(n)]
    # unknowns: dH_0..dH_{s-1}, dG_0..dG_{r-1}
    for j in range(s):
        for i, g in enumerate(G):
            if i + j < n:
                A[i + j][j] = g
    for j in range(r):
        for i, h in enumerate(H):
            if i + j < n:
                A[i + j][s + j] = h
    b = (E + [zero] * n)[:n]
    if n == 0:
        return [], []
    x = _solve_padic(A, b, p, prec)
    return x[s:], x[:s]


def _hensel_base(P0, s, p, prec):
    """Monic factors (G0 of slope <= h, H0 of slope > h) of P0, split at x-coordinate s."""
    n = len(P0) - 1
    zero = PadicNumber.zero(p, prec)
    cs = P0[s]
    H = [c / cs for c in P0[:s + 1]]
    G = list(P0[s:])
    for _ in range(2 * prec + 4):
        E = _psub(P0, _pmul(G, H, zero), zero)[:n]
        if all(e.is_zero() for e in E):
            break
        dG, dH = _sylvester_solve(G, H, E, p, prec)
        G = [g + d for g, d in zip(G, dG + [zero])]
        H = [h + d for h, d in zip(H, dH + [zero])]
    else:
        raise ChartError("Hensel iteration did not converge")
    return G, H


@dataclass
class Chart:
    slopes: list
    charpoly: list  # Tseries coefficients, low -> high
    factor: list  # slope <= h factor G, monic, Tseries coefficients
    complement: list
    h: Fraction

    @property
    def rank(self):
        return len(self.factor) - 1

    @property
    def free_rank_one(self):
        return self.rank == 1

    @property
    def multiplicity(self):
        return self.rank

    def presentation(self):
        if self.rank == 0:
            return "0"
        if self.rank == 1:
            return "O_Omega"
        return f"O_Omega[x]/(G(x)), deg G = {self.rank}"

    def to_json(self):
        return {
            "slopes": [str(s) for s in self.slopes],
            "free_rank_one": self.free_rank_one,
            "multiplicity": self.multiplicity,
            "presentation": self.presentation(),
            "charpoly_coeffs": [_tseries_json(c) for c in self.charpoly],
            "factor_coeffs": [_tseries_json(c) for c in self.factor],
        }


def _tseries_json(x):
    return {"".join(map(str, m)) if m else "": v.compact() for m, v in sorted(x.c.items()) if not v.is_zero()}


def local_chart(A, h):
    """Slope <= h chart of an operator given as a square matrix of Tseries."""
    h = Fraction(h)
    if not A or not A[0]:
        raise ChartError("empty operator")
    R = A[0][0].ring
    p, K = R.p, R.prec
    zero, one = R.zero(), R.one()
    P = berkowitz(A, zero, one)
    n = len(P) - 1
    base = [c.constant() for c in P]
    # roots that vanish to the working precision only have valuation >= K
    slopes = [K if x == INF else x for x in newton_polygon(base).slopes]
    if any(x == h for x in slopes):
        raise ChartError(f"the Newton polygon has a segment of slope {h}: no gap for a slope <= {h} factorization")
    if K <= h and any(x == K for x in slopes):
        raise ChartError("precision too low to separate the slopes at h")
    s = sum(1 for x in slopes if x > h)
    G0, H0 = _hensel_base(base, s, p, K)
    # T-adic lift, one monomial at a time
    G = {R.monomials[0]: G0}
    H = {R.monomials[0]: H0}
    pz = PadicNumber.zero(p, K)
    for e in R.monomials[1:]:
        E = [c.c.get(e, pz) for c in P]
        for f in R.monomials:
            g = R.sub_mono(e, f)
            if g is None or f == e or g == e or f not in G or g not in H:
                continue
            E = _psub(E, _pmul(G[f], H[g], pz), pz)
        dG, dH = _sylvester_solve(G0, H0, E[:n], p, K)
        G[e] = dG + [pz]
        H[e] = dH + [pz]
    Gser = [Tseries(R, {m: G[m][k] for m in G if k < len(G[m])}) for k in range(n - s + 1)]
    Hser = [Tseries(R, {m: H[m][k] for m in H if k < len(H[m])}) for k in range(s + 1)]
    return Chart(sorted(slopes), P, Gser, Hser, h)


def family_chart(Phi, h):
    """Chart of the family eigenline: the operator is the 1 x 1 matrix (alpha_Omega)."""
    return local_chart([[Phi.alpha]], h)
