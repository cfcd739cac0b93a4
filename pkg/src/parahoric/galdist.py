"""Distributions on Gal_p = Z_p^x (p odd), their norms and the Amice transform.

A distribution at level beta is stored per component a in (Z/p^beta)^x
(an integer representative 0 < a < p^beta) by the moments

    m_{a,i} = int_{a + p^beta Z_p} y^i dmu,    z = a (1 + p^beta y),

for 0 <= i < M, each a PadicNumber carrying its own precision.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd

import sympy

from .cyclo import Cyclo
from .padic import INF, PadicNumber, valuation


class GaloisError(ValueError):
    pass


def totient_pp(p, b):
    return 1 if b == 0 else (p - 1) * p ** (b - 1)


def units_mod(p, b):
    q = p**b
    return [a for a in range(1, q) if a % p] if b else [1]


class GaloisGroupData:
    """Cl(p^beta) = (Z/p^beta)^x and U_beta = 1 + p^beta Z_p.

    A fixture presentation of a more general group may be supplied as
    ``components`` (labels) together with ``unit_rank``; only the size
    consistency is checked for those.
    """

    def __init__(self, p, beta, components=None, unit_rank=1, relations=None):
        if p == 2:
            raise GaloisError("p = 2 is not supported")
        if beta < 1:
            raise GaloisError("beta must be at least 1")
        self.p = p
        self.beta = beta
        self.unit_rank = unit_rank
        self.relations = relations or []
        if components is None:
            self.components = units_mod(p, beta)
            self.cyclotomic = True
        else:
            self.components = list(components)
            self.cyclotomic = False
        self.order = len(self.components)
        if self.cyclotomic and self.order != totient_pp(p, beta):
            raise GaloisError("component count does not match Cl(p^beta)")

    def component(self, z):
        """Component label of a p-adic unit given as a rational number."""
        q = self.p**self.beta
        z = Fraction(z)
        if valuation(z, self.p) != 0:
            raise GaloisError("not a p-adic unit")
        return z.numerator * pow(z.denominator, -1, q) % q


# ---------------------------------------------------------------------------
# characters


class DirichletCharacter:
    """A character of (Z/p^b)^x with chi(a) = zeta_order^table[a]."""

    def __init__(self, p, b, order, table):
        self.p, self.b, self.order = p, b, order
        self.table = {int(a) % p**b if b else 1: int(k) % order for a, k in table.items()}

    @classmethod
    def trivial(cls, p, b=0):
        return cls(p, b, 1, {a: 0 for a in units_mod(p, b)})

    def __call__(self, a):
        """Exponent k with chi(a) = zeta_order^k."""
        if self.b == 0:
            return self.table[1]
        q = self.p**self.b
        if isinstance(a, int):
            return self.table[a % q]
        a = Fraction(a)
        r = a.numerator * pow(a.denominator, -1, q) % q
        return self.table[r]

    def value(self, a, m=None, one=Fraction(1)):
        m = m or self.order
        if m % self.order:
            raise GaloisError("target root of unity order is not a multiple")
        return Cyclo.zeta_power(m, self(a) * (m // self.order), one)

    def conductor_exponent(self):
        for c in range(self.b + 1):
            q = self.p**c
            if all(self(a) == 0 for a in units_mod(self.p, self.b) if a % q == 1 % q):
                return c
        return self.b

    def lift(self, b, order=None):
        """The same character viewed modulo p^b with values in mu_order."""
        order = order or self.order
        if order % self.order or b < self.b:
            raise GaloisError("cannot lift character")
        t = order // self.order
        return DirichletCharacter(self.p, b, order, {a: self(a) * t for a in units_mod(self.p, b)})

    def conj(self):
        return DirichletCharacter(self.p, self.b, self.order, {a: -k for a, k in self.table.items()})

    def is_trivial(self):
        return not any(self.table.values())

    def key(self):
        """Canonical form: primitive modulus, minimal order, table."""
        c = self.conductor_exponent()
        exps = {a: self(a) for a in units_mod(self.p, c)}
        g = self.order
        for k in exps.values():
            g = gcd(g, k)
        order = self.order // g if g else 1
        return (c, order, tuple(sorted((a, k * order // self.order) for a, k in exps.items())))

    def to_json(self):
        return {"order": self.order, "table": {str(a): k for a, k in sorted(self.table.items())}}

    @classmethod
    def from_json(cls, p, b, data):
        return cls(p, b, int(data["order"]), {int(a): int(k) for a, k in data["table"].items()})


def all_characters(p, b):
    """All characters modulo p^b, as powers of a generator (values in mu_phi)."""
    phi = totient_pp(p, b)
    if b == 0:
        return [DirichletCharacter.trivial(p)]
    q = p**b
    g = int(sympy.primitive_root(q))
    log = {}
    x = 1
    for e in range(phi):
        log[x] = e
        x = x * g % q
    return [DirichletCharacter(p, b, phi, {a: t * log[a] for a in log}) for t in range(phi)]


def primitive_characters(p, b):
    return [c for c in all_characters(p, b) if c.conductor_exponent() == b]


# ---------------------------------------------------------------------------
# distributions


def _pad(x, p, prec):
    if isinstance(x, PadicNumber):
        return x
    return PadicNumber.make(x, p, prec)


class GaloisDistribution:
    def __init__(self, group, M, comps):
        self.group = group
        self.p = group.p
        self.beta = group.beta
        self.M = M
        self.comps = {}
        for a in group.components:
            vals = comps.get(a)
            if vals is None:
                vals = [PadicNumber.zero(self.p, M)] * M
            if len(vals) < M:
                raise GaloisError(f"component {a} has {len(vals)} moments, need {M}")
            self.comps[a] = [_pad(v, self.p, M) for v in vals[:M]]

    # -- constructors
    @classmethod
    def zero(cls, p, beta, M, prec=None):
        grp = GaloisGroupData(p, beta)
        return cls(grp, M, {a: [PadicNumber.zero(p, prec or M)] * M for a in grp.components})

    @classmethod
    def from_point_masses(cls, p, beta, M, masses, prec=30):
        """sum c * (d/dz)^k delta_z over entries (c, z, k); exact moments."""
        grp = GaloisGroupData(p, beta)
        q = p**beta
        acc = {a: [Fraction(0)] * M for a in grp.components}
        for c, z, k in masses:
            a = grp.component(z)
            for i in range(M):
                acc[a][i] += c * _derivative_of_y_power(z, a, q, i, k)
        return cls(grp, M, {a: [PadicNumber.make(x, p, prec) for x in v] for a, v in acc.items()})

    # -- arithmetic
    def _check(self, other):
        if (self.p, self.beta) != (other.p, other.beta):
            raise GaloisError("distributions live at different levels")

    def __add__(self, other):
        self._check(other)
        M = min(self.M, other.M)
        return GaloisDistribution(self.group, M, {a: [x + y for x, y in zip(self.comps[a], other.comps[a])]
                                                  for a in self.comps})

    def __sub__(self, other):
        self._check(other)
        M = min(self.M, other.M)
        return GaloisDistribution(self.group, M, {a: [x - y for x, y in zip(self.comps[a], other.comps[a])]
                                                  for a in self.comps})

    def scale(self, c):
        return GaloisDistribution(self.group, self.M, {a: [x * c for x in v] for a, v in self.comps.items()})

    def is_zero(self):
        return all(x.is_zero() for v in self.comps.values() for x in v)

    def moment(self, a, i):
        return self.comps[a][i]

    def min_valuation(self):
        vals = [x.val for v in self.comps.values() for x in v if not x.is_zero()]
        return min(vals) if vals else INF

    def agrees(self, other, prec=None):
        """Moment-by-moment agreement at the common precision (capped at prec)."""
        if self.beta != other.beta:
            hi, lo = (self, other) if self.beta > other.beta else (other, self)
            hi = hi.coarsen(lo.beta)
            return hi.agrees(lo, prec)
        M = min(self.M, other.M)
        for a in self.comps:
            for i in range(M):
                d = self.comps[a][i] - other.comps[a][i]
                if prec is not None:
                    d = d.with_prec(prec)
                if not d.is_zero():
                    return False
        return True

    # -- change of level
    def coarsen(self, m):
        """Moments of the same distribution on the discs of level m <= beta."""
        if m > self.beta or m < 1:
            raise GaloisError(f"cannot coarsen from level {self.beta} to {m}")
        if m == self.beta:
            return self
        p = self.p
        q = p**m
        grp = GaloisGroupData(p, m)
        out = {a: [PadicNumber.zero(p, self.M + 10 * self.M)] * self.M for a in grp.components}
        shift = self.beta - m
        for b, mom in self.comps.items():
            a = b % q
            r = Fraction(b, a)
            e = (r - 1) / Fraction(p) ** m  # y = e + r p^shift y'
            for i in range(self.M):
                tot = out[a][i]
                for k in range(i + 1):
                    c = comb(i, k) * e ** (i - k) * r**k * Fraction(p) ** (shift * k)
                    if c:
                        tot = tot + mom[k] * c
                out[a][i] = tot
        return GaloisDistribution(grp, self.M, out)

    # -- serialization
    def to_json(self):
        return {
            "p": self.p, "beta": self.beta, "M": self.M,
            "components": {str(a): [x.compact() for x in v] for a, v in sorted(self.comps.items())},
            "precision": {str(a): [x.prec for x in v] for a, v in sorted(self.comps.items())},
        }

    @classmethod
    def from_json(cls, data):
        p, beta, M = data["p"], data["beta"], data["M"]
        grp = GaloisGroupData(p, beta)
        comps = {}
        for a, vals in data["components"].items():
            precs = data["precision"][a]
            comps[int(a)] = [PadicNumber.parse(v, p, pr) for v, pr in zip(vals, precs)]
        return cls(grp, M, comps)

    def __repr__(self):
        return json.dumps(self.to_json())


def _derivative_of_y_power(z, a, q, i, k):
    """(d/dz)^k y^i at z, y = (z/a - 1)/q."""
    if k > i:
        return Fraction(0)
    y = (Fraction(z) / a - 1) / q
    fall = 1
    for t in range(k):
        fall *= i - t
    return fall * y ** (i - k) / (Fraction(a) * q) ** k


# ---------------------------------------------------------------------------
# norms and admissibility


def norm_m(mu, m):
    """sup_i |mu(y_m^i)| over the level-m discs, as a Fraction (0 for zero)."""
    nu = mu.coarsen(m)
    vals = [x.val for v in nu.comps.values() for x in v if not x.is_zero()]
    if not vals:
        return Fraction(0)
    return Fraction(mu.p) ** (-min(vals))


def is_h_admissible(mu, h, m_max=None, C=1):
    """(ok, witness): witness = max_m ||mu||_m p^(-mh), ok iff witness <= C.

    Levels run over 1 <= m <= min(m_max, beta); finer discs need the data of
    a finer level.
    """
    top = mu.beta if m_max is None else min(m_max, mu.beta)
    p = mu.p
    witness = Fraction(0)
    for m in range(1, top + 1):
        witness = max(witness, norm_m(mu, m) * Fraction(p) ** (-m * h))
    return witness <= C, witness


def integral_normalization(mu):
    """p^-v mu with v the smallest valuation of a moment, and v."""
    v = mu.min_valuation()
    if v == INF:
        return mu, 0
    return mu.scale(Fraction(mu.p) ** (-v)), v


# ---------------------------------------------------------------------------
# Amice transform


def evaluate_character(mu, chi, j, order=None):
    """int chi(z) z^j dmu as an element of Q_p(zeta_order).

    For j < 0 or j >= M the binomial series is truncated at M terms; its
    tail is O(p^(beta M)).
    """
    if chi.b > mu.beta:
        raise GaloisError(f"conductor p^{chi.b} exceeds the level p^{mu.beta} of the distribution")
    p, beta = mu.p, mu.beta
    order = order or chi.order
    vmin = mu.min_valuation()
    vmin = 0 if vmin == INF else min(vmin, 0)
    finite = 0 <= j < mu.M
    nterms = j + 1 if finite else mu.M
    # tail of the binomial series: binom(j, i) is integral, p^(beta i) m_i
    cap = None if finite else beta * mu.M + vmin
    pb = Fraction(p) ** beta
    acc = [None] * order
    t = order // chi.order
    for a, mom in mu.comps.items():
        inner = mom[0] * 1
        for i in range(1, nterms):
            c = _gbinom(j, i) * pb**i
            if c:
                inner = inner + mom[i] * c
        if cap is not None:
            inner = inner.with_prec(cap)
        inner = inner * (Fraction(a) ** j)
        k = chi(a) * t % order
        acc[k] = inner if acc[k] is None else acc[k] + inner
    prec = min(x.prec for x in acc if x is not None)
    return Cyclo(order, [PadicNumber.zero(p, prec) if x is None else x for x in acc])


def _gbinom(j, i):
    out = Fraction(1)
    for t in range(i):
        out = out * (j - t) / (t + 1)
    return out


# ---------------------------------------------------------------------------
# Amice-Velu reconstruction


@dataclass
class InterpolationDatum:
    beta: int
    chi: DirichletCharacter
    j: int
    value: object  # Cyclo, Fraction, int or PadicNumber


@dataclass
class Reconstruction:
    distribution: GaloisDistribution
    precision: int
    certificate: dict = field(default_factory=dict)


def load_interpolation_data(path_or_list, p, prec=40):
    items = path_or_list
    if isinstance(path_or_list, str):
        with open(path_or_list) as fh:
            items = json.load(fh)
    out = []
    for d in items:
        b = int(d["beta"])
        chi = DirichletCharacter.from_json(p, b, d["chi"])
        v = d["value"]
        if isinstance(v, list):
            val = Cyclo(chi.order, [PadicNumber.parse(s, p, prec) for s in v])
        else:
            val = PadicNumber.parse(str(v), p, prec)
        out.append(InterpolationDatum(b, chi, int(d["j"]), val))
    return out


def amice_velu_reconstruct(data, h, crit, p, beta_out=1, M=None, C=1, work_prec=None):
    """The h-admissible distribution with the given critical values.

    ``data`` holds integrals of chi(z) z^j for every character modulo p^L
    (L = the largest level present) and every j in ``crit`` (consecutive).
    The first #crit moments on each level-L disc come from finite Fourier
    inversion and a triangular solve; higher Taylor terms are dropped, which
    costs at most C p^(L h - (L - beta_out) #crit).
    """
    crit = sorted(crit)
    c = len(crit)
    if crit != list(range(crit[0], crit[0] + c)):
        raise GaloisError("the critical set must be an interval of integers")
    if not h < c:
        raise GaloisError(f"uniqueness needs h < #Crit (h = {h}, #Crit = {c})")
    if not data:
        raise GaloisError("no interpolation data")
    L = max(d.beta for d in data)
    if beta_out > L:
        raise GaloisError("output level exceeds the data level")
    M = M or c
    j0 = crit[0]
    phi = totient_pp(p, L)
    order = phi
    bound = (L - beta_out) * c - L * h - valuation(Fraction(C), p)
    work_prec = work_prec or max(bound, 1) + L * c + 2 * L + 5

    # collect one value per (character modulo p^L, j), checking consistency
    table = {}
    for d in data:
        if d.j not in crit:
            raise GaloisError(f"j = {d.j} is not critical")
        chiL = d.chi.lift(L, order)
        key = (chiL.key(), d.j)
        val = _as_cyclo(d.value, d.chi.order, order, p, work_prec)
        if key in table:
            prev_beta, prev = table[key]
            diff = prev - val
            if not all(x.with_prec(min(work_prec, bound + L * c)).is_zero() for x in diff.c):
                raise GaloisError(f"interpolation data inconsistent between levels {prev_beta} and {d.beta}")
            continue
        table[key] = (d.beta, val)
    chars = all_characters(p, L)
    keys = [chi.key() for chi in chars]
    for chi, ck in zip(chars, keys):
        for j in crit:
            if (ck, j) not in table:
                raise GaloisError(f"missing value for a character of conductor p^{chi.conductor_exponent()} at j = {j}")

    # finite Fourier inversion: I[b][j] = int_{b + p^L Z_p} z^j dmu
    inv_phi = PadicNumber.make(Fraction(1, phi), p, work_prec)
    I = {}
    for b in units_mod(p, L):
        for j in crit:
            acc = [PadicNumber.zero(p, work_prec)] * order
            for chi, ck in zip(chars, keys):
                val = table[(ck, j)][1]
                s = (-chi(b) * (order // chi.order)) % order
                for t, x in enumerate(val.c):
                    if not x.is_zero():
                        acc[(t + s) % order] = acc[(t + s) % order] + x
            z = Cyclo(order, acc)
            if not all(x.is_zero() for x in z.c[1:]):
                raise GaloisError("inverted data is not Q_p-valued: inconsistent characters")
            I[(b, j)] = z.c[0] * inv_phi

    # local moments w_k(b) = int_{disc b} t^k z^j0 dmu, z = b + p^L t
    pL = Fraction(p) ** L
    w = {}
    for b in units_mod(p, L):
        ws = []
        for i in range(c):
            rhs = I[(b, j0 + i)]
            for k in range(i):
                rhs = rhs - ws[k] * (comb(i, k) * Fraction(b) ** (i - k) * pL**k)
            ws.append(rhs / (comb(i, i) * pL**i))
        w[b] = ws

    # assemble moments at level beta_out
    grp = GaloisGroupData(p, beta_out)
    qB = p**beta_out
    comps = {}
    for a in grp.components:
        moms = []
        for i in range(M):
            tot = PadicNumber.zero(p, work_prec)
            for b in units_mod(p, L):
                if b % qB != a:
                    continue
                g = _taylor_weight(a, b, qB, p**L, i, j0, c)
                for k in range(c):
                    if g[k]:
                        tot = tot + w[b][k] * g[k]
            moms.append(tot)
        comps[a] = moms
    achieved = min([bound] + [x.prec for v in comps.values() for x in v])
    comps = {a: [x.with_prec(achieved) for x in v] for a, v in comps.items()}
    mu = GaloisDistribution(grp, M, comps)
    bound = achieved
    cert = {"h": h, "crit_size": c, "injective": h < c, "data_level": L,
            "output_level": beta_out, "precision": bound,
            "reason": "an h-admissible distribution with h < #Crit is determined by its critical values"}
    return Reconstruction(mu, bound, cert)


def _as_cyclo(v, src_order, order, p, prec):
    if isinstance(v, Cyclo):
        t = order // v.m
        acc = [PadicNumber.zero(p, prec)] * order
        for k, x in enumerate(v.c):
            acc[(k * t) % order] = acc[(k * t) % order] + _pad(x, p, prec)
        return Cyclo(order, acc)
    return Cyclo(order, [_pad(v, p, prec)])


def _taylor_weight(a, b, qB, qL, i, j0, c):
    """Coefficients g_k (k < c) of y^i z^-j0 in t, z = b + qL t."""
    # y = e + f t with e = (b/a - 1)/qB, f = qL/(a qB)
    e = (Fraction(b, a) - 1) / qB
    f = Fraction(qL, a * qB)
    ypow = [comb(i, k) * e ** (i - k) * f**k if k <= i else Fraction(0) for k in range(c)]
    # z^-j0 = b^-j0 (1 + (qL/b) t)^-j0
    r = Fraction(qL, b)
    zpow = [Fraction(b) ** (-j0) * _gbinom(-j0, k) * r**k for k in range(c)]
    return [sum(ypow[s] * zpow[k - s] for s in range(k + 1)) for k in range(c)]


# ---------------------------------------------------------------------------
# branching interpolation kappa_beta


def kappa_beta(mu, beta):
    """Moments of f -> mu(f(-x) x^lam1 on x = -1 mod p^beta) on U_beta (n = 1).

    The indicator of the disc is dropped, so mu must already be supported
    there (e.g. mu = xi t_p^beta * nu). Precision follows mu's moments.
    """
    mod = mu.module
    if mod.n != 1:
        raise NotImplementedError("kappa_beta is implemented for n = 1")
    if beta < 1:
        raise GaloisError("beta must be at least 1")
    p = mod.p
    l1 = mod.weight.lam[0][0]
    M = mod.M
    nmom = M - l1
    if nmom < 1:
        raise GaloisError(f"M = {M} too small to expand the weight factor x^{l1}")
    pb = Fraction(p) ** beta
    moms = []
    for i in range(nmom):
        # ((-x - 1)/p^beta)^i x^l1
        tot = PadicNumber.zero(p, M)
        for k in range(i + 1):
            c = comb(i, k) * (-1) ** i / pb**i
            tot = tot + mu.moment((k + l1,)) * c
        moms.append(tot)
    grp = GaloisGroupData(p, beta)
    comps = {a: [PadicNumber.zero(p, M)] * nmom for a in grp.components}
    comps[grp.component(1)] = moms
    return GaloisDistribution(grp, nmom, comps)
