"""Sparse multivariate polynomials as dicts {exponent tuple: coefficient}.

Coefficients are ints or Fractions. Only what the representation code needs
is here: ring operations, substitution of polynomials for variables,
derivations and small determinants.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations


def const(c, nvars):
    return {(0,) * nvars: c} if c else {}


def var(i, nvars, c=1):
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): c}


def add(a, b, c=1):
    """a + c*b"""
    out = dict(a)
    for m, x in b.items():
        y = out.get(m, 0) + c * x
        if y:
            out[m] = y
        else:
            out.pop(m, None)
    return out


def scale(a, c):
    if not c:
        return {}
    return {m: c * x for m, x in a.items()}


def mul(a, b):
    if len(a) > len(b):
        a, b = b, a
    out = {}
    for m1, x1 in a.items():
        for m2, x2 in b.items():
            m = tuple(i + j for i, j in zip(m1, m2))
            y = out.get(m, 0) + x1 * x2
            if y:
                out[m] = y
            else:
                del out[m]
    return out


def power(a, e, nvars):
    out = const(1, nvars)
    base = a
    while e:
        if e & 1:
            out = mul(out, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return out


def reduce_mod(a, q):
    out = {}
    for m, x in a.items():
        if isinstance(x, Fraction):
            x = x.numerator * pow(x.denominator, -1, q)
        x %= q
        if x:
            out[m] = x
    return out


def is_zero_mod(a, q):
    return not reduce_mod(a, q)


def substitute(a, images, nvars_out, modulus=None):
    """Replace variable i by the polynomial images[i] (None keeps nothing: must be unused)."""
    cache = {}

    def pw(i, e):
        key = (i, e)
        if key not in cache:
            if e == 1:
                cache[key] = images[i]
            elif e % 2 == 0:
                h = pw(i, e // 2)
                cache[key] = _mm(mul(h, h), modulus)
            else:
                cache[key] = _mm(mul(pw(i, e - 1), images[i]), modulus)
        return cache[key]

    out = {}
    for m, c in a.items():
        term = const(c, nvars_out)
        for i, e in enumerate(m):
            if e:
                term = _mm(mul(term, pw(i, e)), modulus)
                if not term:
                    break
        out = add(out, term)
    return _mm(out, modulus)


def _mm(a, modulus):
    return reduce_mod(a, modulus) if modulus else a


def evaluate(a, point, modulus=None):
    total = 0
    for m, c in a.items():
        t = c
        for x, e in zip(point, m):
            if e:
                t *= x**e
        total += t
    if modulus:
        if isinstance(total, Fraction):
            total = total.numerator * pow(total.denominator, -1, modulus)
        return total % modulus
    return total


def derivative(a, i):
    out = {}
    for m, c in a.items():
        e = m[i]
        if e:
            mm = list(m)
            mm[i] -= 1
            out[tuple(mm)] = out.get(tuple(mm), 0) + e * c
    return {m: c for m, c in out.items() if c}


def times_var(a, i):
    out = {}
    for m, c in a.items():
        mm = list(m)
        mm[i] += 1
        out[tuple(mm)] = c
    return out


def det(mat, nvars):
    """Determinant of a small square matrix of polynomials (Leibniz expansion)."""
    k = len(mat)
    out = {}
    for perm in permutations(range(k)):
        sign = 1
        for i in range(k):
            for j in range(i + 1, k):
                if perm[i] > perm[j]:
                    sign = -sign
        term = const(sign, nvars)
        for i in range(k):
            term = mul(term, mat[i][perm[i]])
            if not term:
                break
        out = add(out, term)
    return out


def total_degree(a):
    return max((sum(m) for m in a), default=0)
