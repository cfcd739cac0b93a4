"""Evaluation maps from symbols to distributions on Gal_p (n = 1 over Q).

For a symbol Phi with values in D_lam and a component a of (Z/p^beta)^x,
the level-beta evaluation translates the value on the path {oo} - {-a/p^beta}
by g_a = xi t_p^beta diag(a^-1, 1) = (p^beta/a 1; 0 1) and restricts along
the branching map to U_beta. Unwinding the action gives, with z = a(1 + p^beta y),

    int_{a + p^beta Z_p} y^i dEv = Phi_a((-x/a)^i (p^beta x - a)^lam1),

which is how the moments are computed (no precision is lost this way).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from math import comb, lcm

import sympy

from .cyclo import Cyclo
from .galdist import GaloisDistribution, GaloisGroupData, kappa_beta, units_mod
from .modsym import INFINITY, ManinData, act_cusp, inv2
from .padic import INF, PadicNumber, valuation
from .pardist import act_delta, specialization_data, specialize
from .weights import WeightError, crit_range

XI = ((1, 1), (0, 1))


class EvaluationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# cycle data


@dataclass
class CycleData:
    """Components, their representatives and the translating elements.

    ``reps[c]`` is the matrix delta_c; ``translators[c]`` the element applied
    to the symbol value on ``paths[c]``; ``gamma_gens[c]`` generates the
    stabiliser group whose coinvariants receive the value; ``theta[c]`` is
    the orientation sign.
    """

    p: int
    beta: int
    components: list
    reps: dict
    translators: dict
    paths: dict
    gamma_gens: dict = field(default_factory=dict)
    theta: dict = field(default_factory=dict)

    @classmethod
    def gl2(cls, p, beta, representatives=None):
        """n = 1 over Q; ``representatives`` may replace a by another lift a + k p^beta."""
        if beta < 1:
            raise EvaluationError("beta must be at least 1")
        q = p**beta
        comps = units_mod(p, beta)
        reps, trans, paths = {}, {}, {}
        representatives = representatives or {}
        for a in comps:
            r = representatives.get(a, a)
            if r % q != a:
                raise EvaluationError(f"{r} does not represent the component {a}")
            reps[a] = ((Fraction(1, r), 0), (0, 1))
            trans[a] = ((Fraction(q, r), 1), (0, 1))
            paths[a] = (INFINITY, Fraction(-r, q))
        minus = ((-1, 0), (0, -1))
        return cls(p, beta, comps, reps, trans, paths,
                   {a: [minus] for a in comps}, {a: 1 for a in comps})

    def representative(self, a):
        return int(1 / self.reps[a][0][0])


# ---------------------------------------------------------------------------
# coinvariants


@dataclass
class Coinvariants:
    dim: int
    projection: sympy.Matrix  # rows: coordinates on the quotient

    @property
    def quotient_dim(self):
        return self.projection.rows

    def __call__(self, v):
        return self.projection * sympy.Matrix(v)


def coinvariants(generators, dim=None):
    """Quotient of Q^dim by the span of (g - 1) v over the generators."""
    mats = [sympy.Matrix(g) for g in generators]
    if dim is None:
        if not mats:
            raise EvaluationError("dimension needed when there are no generators")
        dim = mats[0].rows
    if mats:
        W = sympy.Matrix.hstack(*[g - sympy.eye(dim) for g in mats])
    else:
        W = sympy.zeros(dim, 0)
    # the projection is a basis of the annihilator of the column space of W
    ann = (W.T.nullspace() if W.cols else [sympy.eye(dim)[:, i] for i in range(dim)])
    if ann:
        proj = sympy.Matrix.hstack(*ann).T
    else:
        proj = sympy.zeros(0, dim)
    return Coinvariants(dim, proj)


# ---------------------------------------------------------------------------
# symbols as functions on divisors


class SpecializedSymbol:
    """phi = specialize o Phi, evaluated lazily."""

    def __init__(self, Phi):
        self.Phi = Phi
        self.module = Phi.space.module
        self.weight = self.module.weight
        self.p = self.module.p

    def at(self, r, s):
        return specialize(self.Phi.at(r, s))


class ClassicalValues:
    """A trivial-weight symbol given by values on the Manin generators of level N."""

    def __init__(self, N, values, p, prec):
        from .weights import Weight
        self.manin = ManinData(N)
        self.values = list(values)
        self.p = p
        self.prec = prec
        self.weight = Weight.simple((0, 0), p)

    def at(self, r, s):
        tot = 0
        for e, i, _g in self.manin.divisor(r, s):
            tot += e * self.values[i]
        return PadicNumber.make(tot, self.p, self.prec)


class AdditiveSymbol:
    """Phi({r} - {s}) = F(r) - F(s): additive by construction (used as a toy)."""

    def __init__(self, module, F):
        self.module = module
        self.F = F
        self.cache = {}

    def _f(self, r):
        if r not in self.cache:
            self.cache[r] = self.F(r)
        return self.cache[r]

    def at(self, r, s):
        return self._f(r) - self._f(s)


class HeckeImage:
    """Phi -> sum_delta delta * Phi(delta^-1 D), evaluated lazily."""

    def __init__(self, Phi, deltas, module):
        self.Phi = Phi
        self.deltas = deltas
        self.module = module

    def at(self, r, s):
        acc = self.module.zero()
        for d in self.deltas:
            di = inv2(d)
            v = self.Phi.at(act_cusp(di, r), act_cusp(di, s))
            acc = acc + act_delta(d, v)
        return acc


def up_image(Phi, module):
    p = module.p
    return HeckeImage(Phi, [((p, a), (0, 1)) for a in range(p)], module)


def _module_of(Phi):
    if hasattr(Phi, "space"):
        return Phi.space.module
    return Phi.module


# ---------------------------------------------------------------------------
# evaluation maps


def ev_beta_delta(Phi, cycle, a):
    """The translated value g_a * Phi(path_a) in D_lam (before restriction).

    For n = 1 the stabiliser is {+-1}, acting on D_lam by (-1)^(lam1 + lam2);
    odd weights therefore have zero coinvariants.
    """
    if a not in cycle.translators:
        raise EvaluationError(f"{a} is not a component at level {cycle.beta}")
    mod = _module_of(Phi)
    l1, l2 = mod.weight.lam[0]
    r, s = cycle.paths[a]
    val = Phi.at(r, s)
    if (l1 + l2) % 2:
        return mod.zero()
    return act_delta(cycle.translators[a], val)


def _component_moments(val, r, beta, l1, nmom):
    """int y^i over the component of r, from the path value val in D_lam.

    Moments are taken with respect to the base point r (z = r(1 + p^beta y)).
    Terms of (p^beta x - r)^l1 (-x/r)^i beyond the truncation x^(M-1) are
    dropped; the result is then capped by the lattice bound v(mu(x^k)) >= -k.
    """
    mod = val.module
    p, M = mod.p, mod.M
    pb = p**beta
    out = []
    for i in range(nmom):
        # (-x/r)^i (p^beta x - r)^l1
        tot = PadicNumber.zero(p, mod.N)
        cap = INF
        for k in range(l1 + 1):
            c = comb(l1, k) * pb**k * (-r) ** (l1 - k) * Fraction(-1, r) ** i
            if i + k < M:
                tot = tot + val.moment((i + k,)) * c
            elif c:
                cap = min(cap, valuation(c, p) - (i + k))
                if k * (beta - 1) > 3 * M + 60:
                    break
        out.append(tot if cap == INF else tot.with_prec(min(cap, tot.prec)))
    return out


def _rebase(moms, r_from, r_to, p, beta):
    """Moments about r_to from moments about r_from (same disc)."""
    if r_from == r_to:
        return moms
    ratio = Fraction(r_from, r_to)
    e = (ratio - 1) / Fraction(p) ** beta
    out = []
    for i in range(len(moms)):
        tot = None
        for k in range(i + 1):
            c = comb(i, k) * e ** (i - k) * ratio**k
            term = moms[k] * c
            tot = term if tot is None else tot + term
        out.append(tot)
    return out


def ev_beta(Phi, beta, eta0=None, cycle=None, nmom=None):
    """Ev_beta(Phi) as a distribution on Gal_p at level beta.

    ``eta0`` is a character of the second-block component; for n = 1 that
    component is trivial, so it only contributes eta0(1).
    """
    mod = _module_of(Phi)
    if mod.n != 1:
        raise NotImplementedError("evaluation maps are implemented for n = 1")
    p = mod.p
    cycle = cycle or CycleData.gl2(p, beta)
    if cycle.beta != beta:
        raise EvaluationError("cycle data is for another level")
    l1, l2 = mod.weight.lam[0]
    if nmom is None:
        nmom = mod.M - l1
    if nmom < 1:
        raise EvaluationError(f"M = {mod.M} too small for the weight factor of degree {l1}; pass nmom")
    grp = GaloisGroupData(p, beta)
    comps = {}
    for a in cycle.components:
        r = cycle.representative(a)
        if (l1 + l2) % 2:
            comps[a] = [PadicNumber.zero(p, mod.N)] * nmom
            continue
        rr, ss = cycle.paths[a]
        val = Phi.at(rr, ss)
        moms = _component_moments(val, r, beta, l1, nmom)
        moms = _rebase(moms, r, a, p, beta)
        if eta0 is not None:
            moms = [m * eta0(1) for m in moms]
        comps[a] = [m * cycle.theta[a] for m in moms]
    return GaloisDistribution(grp, nmom, comps)


def ev_beta_via_kappa(Phi, beta):
    """The same distribution through act_delta and kappa_beta (lossy lattice route)."""
    mod = _module_of(Phi)
    p = mod.p
    cycle = CycleData.gl2(p, beta)
    total = None
    grp = GaloisGroupData(p, beta)
    comps = {}
    for a in cycle.components:
        mu = ev_beta_delta(Phi, cycle, a)
        k = kappa_beta(mu, beta)
        comps[a] = k.comps[grp.component(1)]
        total = k.M
    return GaloisDistribution(grp, total, comps)


# ---------------------------------------------------------------------------
# classical evaluations


@lru_cache(maxsize=None)
def _monomial_dual(weight):
    """Matrix expressing the functionals x^k (k <= lam1 - lam2) in the dual basis."""
    l1, l2 = weight.lam[0]
    rep, rows = specialization_data(weight, l1 - l2 + 1)
    dim = len(rows)
    C = sympy.zeros(dim, dim)
    for f, entry in enumerate(rows):
        for (kX, _s), c in entry.items():
            C[f, kX[0]] = sympy.Rational(c)
    # v_f = sum_k C[f, k] mu(x^k), so mu(x^k) = sum_f Cinv[k, f] v_f
    return C.inv()


def _dual_moments(val, weight):
    """mu(x^k) for k = 0..lam1 - lam2 from a functional on V_lam."""
    if isinstance(val, PadicNumber):
        return [val]
    vals = val.values
    Cinv = _monomial_dual(weight)
    out = []
    for k in range(Cinv.rows):
        tot = None
        for f, v in enumerate(vals):
            c = Cinv[k, f]
            if c:
                term = v * Fraction(int(c.p), int(c.q))
                tot = term if tot is None else tot + term
        out.append(tot)
    return out


def classical_ev(phi, chi, j, beta=None, eta0=None):
    """sum_a chi(a) <phi(path_a), kappa_j> for a symbol with values in V_lam^dual.

    The pairing on component a is (-1)^lam1 phi_a((a - p^beta x)^(j + lam1)).
    """
    weight = phi.weight
    if j not in crit_range(weight):
        raise WeightError(f"j = {j} is not critical for {weight}")
    beta = beta or chi.b
    if beta < 1:
        raise EvaluationError("the level must be at least 1")
    if chi.b > beta:
        raise EvaluationError("the conductor exceeds the level")
    p = phi.p
    l1, _l2 = weight.lam[0]
    pb = p**beta
    e = j + l1
    cycle = CycleData.gl2(p, beta)
    acc = [None] * chi.order
    for a in cycle.components:
        mom = _dual_moments(phi.at(*cycle.paths[a]), weight)
        tot = None
        for k in range(e + 1):
            c = (-1) ** l1 * comb(e, k) * a ** (e - k) * (-pb) ** k
            term = mom[k] * c
            tot = term if tot is None else tot + term
        if eta0 is not None:
            tot = tot * eta0(1)
        idx = chi(a)
        acc[idx] = tot if acc[idx] is None else acc[idx] + tot
    prec = min(x.prec for x in acc if x is not None)
    return Cyclo(chi.order, [PadicNumber.zero(p, prec) if x is None else x for x in acc])


# ---------------------------------------------------------------------------
# p-adic L-functions


def padic_L(Phi, alpha, beta=1, eta0=None, check=True):
    """mu = Ev_beta(Phi) / alpha^beta, with the beta-independence checked.

    Returns (mu, report); the check compares with level beta - 1 (or beta + 1
    when beta = 1) after coarsening.
    """
    alpha = alpha if isinstance(alpha, PadicNumber) else PadicNumber.make(alpha, _module_of(Phi).p, _module_of(Phi).N)
    if alpha.is_zero():
        raise EvaluationError("alpha must be nonzero")
    mu = ev_beta(Phi, beta, eta0).scale(alpha ** (-beta))
    report = {"beta": beta, "alpha_valuation": alpha.val}
    if check:
        other = beta - 1 if beta > 1 else beta + 1
        nu = ev_beta(Phi, other, eta0).scale(alpha ** (-other))
        ok = mu.agrees(nu)
        report["compared_with"] = other
        report["beta_independent"] = ok
        if not ok:
            raise EvaluationError(f"Ev at levels {beta} and {other} disagree: Phi is not a U_p-eigensymbol")
    return mu, report


def gauss_sum(chi):
    """tau(chi) = sum_a chi(a) zeta_{p^b}^a, exactly, in Q(zeta_L)."""
    p, b = chi.p, chi.b
    if b < 1:
        raise EvaluationError("the Gauss sum needs a ramified character")
    q = p**b
    L = lcm(chi.order, q)
    acc = [Fraction(0)] * L
    for a in units_mod(p, b):
        k = (chi(a) * (L // chi.order) + a * (L // q)) % L
        acc[k] += 1
    return Cyclo(L, acc)


@dataclass
class InterpolationFactor:
    value: Cyclo
    placeholders: tuple = ("gamma_pm", "zeta_infinity", "Omega_epsilon")


def interpolation_factor(weight, chi, j, alpha, beta=None):
    """(p^(n(j+1)) / alpha)^beta tau(chi)^n for F = Q (N(d) = 1).

    The archimedean and period factors are returned as named placeholders.
    """
    n = weight.n
    if chi.b < 1 or chi.conductor_exponent() != chi.b:
        raise EvaluationError("interpolation factor needs a primitive character of conductor p^beta, beta >= 1")
    beta = beta or chi.b
    p = weight.p
    alpha = alpha if isinstance(alpha, PadicNumber) else PadicNumber.make(alpha, p, 30)
    tau = gauss_sum(chi)
    taun = tau
    for _ in range(n - 1):
        taun = taun * tau
    scal = (alpha.inverse() * Fraction(p) ** (n * (j + 1))) ** beta
    return InterpolationFactor(taun.map(lambda c: scal * c))


# ---------------------------------------------------------------------------
# the level-N pipeline


@dataclass
class PadicLResult:
    mu: GaloisDistribution
    alpha: PadicNumber
    Phi: object
    report: dict


def padic_L_pipeline(N, p, M=10, beta=2, sign=1):
    """Newform of level N -> p-stabilisation -> overconvergent lift -> mu."""
    from .modsym import hecke_classical, lift_noncritical, p_stabilise
    dec = hecke_classical(N, sign=sign)
    if not dec.rational:
        raise EvaluationError(f"no rational cuspidal eigensymbol at level {N}")
    sym = dec.rational[0]
    st = p_stabilise(sym, p, prec=M + 5)
    defects = []
    Phi = lift_noncritical(st, M, report=defects)
    alpha = PadicNumber.from_residue(st.alpha % p**M, p, M)
    mu, rep = padic_L(Phi, alpha, beta)
    rep["lift_defects"] = defects
    rep["eigenvalues"] = {str(k): int(v) for k, v in sym.eigenvalues.items()}
    return PadicLResult(mu, alpha, Phi, rep)
