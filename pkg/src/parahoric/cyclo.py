"""Elements of Q_p(zeta_m) as coefficient vectors in the power basis.

Coefficients are Fractions (exact) or PadicNumbers; multiplication reduces
modulo the m-th cyclotomic polynomial.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import sympy

from .padic import PadicNumber


@lru_cache(maxsize=None)
def cyclotomic_coeffs(m):
    x = sympy.Symbol("x")
    return tuple(int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(m, x), x).all_coeffs()))


def _zero_like(c):
    if isinstance(c, PadicNumber):
        return PadicNumber.zero(c.p, c.prec)
    return Fraction(0)


class Cyclo:
    def __init__(self, m, coeffs):
        self.m = m
        self.deg = len(cyclotomic_coeffs(m)) - 1
        coeffs = list(coeffs)
        if len(coeffs) > self.deg:
            coeffs = _reduce(coeffs, m)
        z = _zero_like(coeffs[0]) if coeffs else Fraction(0)
        self.c = coeffs + [z] * (self.deg - len(coeffs))

    @classmethod
    def scalar(cls, m, x):
        return cls(m, [x])

    @classmethod
    def zeta_power(cls, m, k, one=Fraction(1)):
        k %= m
        coeffs = [_zero_like(one)] * k + [one]
        return cls(m, coeffs)

    def __add__(self, other):
        other = self._coerce(other)
        return Cyclo(self.m, [a + b for a, b in zip(self.c, other.c)])

    def __sub__(self, other):
        other = self._coerce(other)
        return Cyclo(self.m, [a - b for a, b in zip(self.c, other.c)])

    def __neg__(self):
        return Cyclo(self.m, [-a for a in self.c])

    def __mul__(self, other):
        if not isinstance(other, Cyclo):
            return Cyclo(self.m, [a * other for a in self.c])
        out = [_zero_like(self.c[0])] * (2 * self.deg - 1)
        for i, a in enumerate(self.c):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.c):
                if not _is_zero(b):
                    out[i + j] = out[i + j] + a * b
        return Cyclo(self.m, _reduce(out, self.m))

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, Cyclo):
            if other.m != self.m:
                raise ValueError("cyclotomic orders differ")
            return other
        return Cyclo(self.m, [other])

    def is_zero(self):
        return all(_is_zero(a) for a in self.c)

    def in_base(self):
        return all(_is_zero(a) for a in self.c[1:])

    def to_base(self):
        if not self.in_base():
            raise ValueError("element does not lie in the base field")
        return self.c[0]

    def map(self, f):
        return Cyclo(self.m, [f(a) for a in self.c])

    def min_valuation(self, p):
        from .padic import valuation
        vals = []
        for a in self.c:
            if isinstance(a, PadicNumber):
                vals.append(a.val)
            else:
                vals.append(valuation(a, p))
        return min(vals)

    def __repr__(self):
        return "Cyclo(%d, [%s])" % (self.m, ", ".join(str(a) for a in self.c))


def _is_zero(a):
    if isinstance(a, PadicNumber):
        return a.is_zero()
    return a == 0


def _reduce(coeffs, m):
    phi = cyclotomic_coeffs(m)
    d = len(phi) - 1
    coeffs = list(coeffs)
    for k in range(len(coeffs) - 1, d - 1, -1):
        c = coeffs[k]
        if _is_zero(c):
            continue
        # x^k = x^(k-d) * x^d and x^d = -sum phi_i x^i
        for i in range(d):
            if phi[i]:
                coeffs[k - d + i] = coeffs[k - d + i] - c * phi[i]
        coeffs[k] = _zero_like(c)
    return coeffs[:d]
