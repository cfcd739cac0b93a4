"""Pure dominant weights for GL(2n) over a totally real field, seen combinatorially.

The field only enters through d embeddings, the map from embeddings to
primes above p and the ramification indices.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .padic import PadicNumber


class WeightError(ValueError):
    pass


@dataclass(frozen=True)
class Weight:
    p: int
    n: int
    lam: tuple  # one 2n-tuple per embedding
    sigma_to_prime: tuple = ("p",)
    e: dict = field(default_factory=lambda: {"p": 1})
    pure: bool = True

    def __post_init__(self):
        lam = tuple(tuple(int(x) for x in row) for row in self.lam)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "sigma_to_prime", tuple(self.sigma_to_prime))
        if len(lam) != len(self.sigma_to_prime):
            raise WeightError("need one weight vector per embedding")
        for row in lam:
            if len(row) != 2 * self.n:
                raise WeightError(f"weight {row} does not have length 2n = {2 * self.n}")
            if any(a < b for a, b in zip(row, row[1:])):
                raise WeightError(f"weight {row} is not dominant")
        for pr in self.sigma_to_prime:
            if pr not in self.e:
                raise WeightError(f"no ramification index for prime {pr!r}")
        if self.pure and self.purity_weight() is None:
            raise WeightError(f"weight {lam} declared pure but is not")

    def __hash__(self):
        return hash((self.p, self.n, self.lam, self.sigma_to_prime, tuple(sorted(self.e.items())), self.pure))

    @classmethod
    def simple(cls, lam, p=3):
        """d = 1 weight over Q from a single 2n-tuple."""
        lam = tuple(lam)
        return cls(p=p, n=len(lam) // 2, lam=(lam,))

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        try:
            lam = data["lambda"]
            d = data.get("d", len(lam))
            if len(lam) != d:
                raise WeightError("length of 'lambda' does not match 'd'")
            return cls(p=int(data["p"]), n=int(data["n"]), lam=tuple(tuple(r) for r in lam),
                       sigma_to_prime=tuple(data.get("sigma_to_prime", ["p"] * d)),
                       e={str(k): int(v) for k, v in data.get("e", {"p": 1}).items()},
                       pure=bool(data.get("pure", True)))
        except KeyError as exc:
            raise WeightError(f"weight fixture missing key {exc}") from None

    def to_json(self):
        return {"p": self.p, "n": self.n, "d": self.d, "sigma_to_prime": list(self.sigma_to_prime),
                "e": dict(self.e), "lambda": [list(r) for r in self.lam], "pure": self.pure}

    @property
    def d(self):
        return len(self.lam)

    @property
    def primes(self):
        return sorted(set(self.sigma_to_prime))

    def embeddings_above(self, prime):
        return [s for s, pr in enumerate(self.sigma_to_prime) if pr == prime]

    def purity_weight(self):
        """The integer w with lam_i + lam_{2n+1-i} = w everywhere, or None."""
        ws = {row[i] + row[2 * self.n - 1 - i] for row in self.lam for i in range(self.n)}
        return ws.pop() if len(ws) == 1 else None

    @property
    def w(self):
        w = self.purity_weight()
        if w is None:
            raise WeightError("weight is not pure")
        return w

    def first_half(self, s=0):
        return self.lam[s][: self.n]

    def second_half(self, s=0):
        return self.lam[s][self.n:]

    def __str__(self):
        if self.d == 1:
            return "(" + ",".join(map(str, self.lam[0])) + ")"
        return "[" + "; ".join("(" + ",".join(map(str, r)) + ")" for r in self.lam) + "]"


def crit_range(lam):
    """Critical integers j: -lam_{s,n} <= j <= -lam_{s,n+1} for every embedding s."""
    if not lam.pure or lam.purity_weight() is None:
        raise WeightError("critical range needs a pure weight")
    n = lam.n
    lo = max(-row[n - 1] for row in lam.lam)
    hi = min(-row[n] for row in lam.lam)
    return list(range(lo, hi + 1))


def contragredient(lam):
    rows = tuple(tuple(-x for x in reversed(row)) for row in lam.lam)
    return Weight(p=lam.p, n=lam.n, lam=rows, sigma_to_prime=lam.sigma_to_prime, e=dict(lam.e),
                  pure=lam.pure)


def normalizer_exponent(lam, prime="p"):
    """Exponent of the uniformiser in the integral normalisation at ``prime``."""
    n = lam.n
    return -sum(sum(lam.lam[s][n:]) for s in lam.embeddings_above(prime))


def integral_normalizer(lam, prime="p", prec=20):
    """The scalar turning U_p into the integral operator U_p°.

    Only unramified primes are representable, where the uniformiser is p.
    """
    if lam.e[prime] != 1:
        raise NotImplementedError("ramified uniformisers are not elements of Q_p")
    return PadicNumber.make(Fraction(lam.p) ** normalizer_exponent(lam, prime), lam.p, prec)


@dataclass(frozen=True)
class RefinementData:
    """U_p-eigenvalues per prime above p together with their normalised versions."""

    weight: Weight
    alpha: dict

    def alpha_circ(self, prime):
        a = self.alpha[prime]
        exp = normalizer_exponent(self.weight, prime)
        out = a * PadicNumber.make(Fraction(self.weight.p) ** exp, a.p, a.prec + max(0, -exp))
        if out.val < 0:
            raise WeightError(f"normalised eigenvalue at {prime} is not integral")
        return out

    @classmethod
    def from_circ(cls, weight, alpha_circ):
        """Build from already-normalised eigenvalues."""
        alpha = {}
        for pr, ac in alpha_circ.items():
            exp = normalizer_exponent(weight, pr)
            alpha[pr] = ac * PadicNumber.make(Fraction(weight.p) ** (-exp), ac.p, ac.prec + max(0, exp))
        return cls(weight, alpha)


def slope_bound(lam, prime="p"):
    n = lam.n
    return min(1 + lam.lam[s][n - 1] - lam.lam[s][n] for s in lam.embeddings_above(prime))


def non_q_critical_slope_check(lam, slopes):
    """Per prime: (e * v(alpha°) < bound, bound).

    ``slopes`` maps each prime to v_p(alpha°) (a number) or is a
    RefinementData.
    """
    if isinstance(slopes, RefinementData):
        slopes = {pr: slopes.alpha_circ(pr).val for pr in lam.primes}
    out = {}
    for pr in lam.primes:
        bound = slope_bound(lam, pr)
        h = Fraction(slopes[pr])
        out[pr] = (lam.e[pr] * h < bound, bound)
    return out


def regularity_flags(lam):
    n = lam.n
    regular = all(a > b for row in lam.lam for a, b in zip(row, row[1:]))
    h_regular = all(a > b for row in lam.lam for half in (row[:n], row[n:]) for a, b in zip(half, half[1:]))
    return {"regular": regular, "H-regular": h_regular}
