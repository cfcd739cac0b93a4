"""Capped-precision p-adic numbers, matrices over Z/p^N and Newton polygons.

Everything here is exact integer arithmetic. A p-adic number is stored as
p^val * unit with an absolute precision cap; matrices are integral and live
mod p^N, and the heavy elimination routines run on numpy arrays (int64 when
the modulus is small enough, Python objects otherwise).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

INF = math.inf


class PrecisionError(ArithmeticError):
    """Raised when an operation would lose every significant digit."""


def valuation(x, p):
    """p-adic valuation of an int or Fraction (INF for zero)."""
    if x == 0:
        return INF
    if isinstance(x, Fraction):
        return valuation(x.numerator, p) - valuation(x.denominator, p)
    x = abs(int(x))
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def val_mod(x, p, N):
    """Valuation of an integer known mod p^N; N if it vanishes there."""
    x %= p**N
    if x == 0:
        return N
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def balanced(x, modulus):
    x %= modulus
    return x - modulus if x > modulus // 2 else x


def to_zp(x, p, N):
    """Reduce a p-integral rational (or int) to an integer mod p^N."""
    q = p**N
    if isinstance(x, Fraction):
        if x.denominator % p == 0:
            raise ValueError(f"{x} is not {p}-integral")
        return x.numerator * pow(x.denominator, -1, q) % q
    return int(x) % q


@dataclass(frozen=True)
class PadicNumber:
    """p^val * unit + O(p^prec).

    ``unit`` is kept reduced mod p^(prec - val); the zero element has
    val = INF and unit = 0.
    """

    p: int
    val: float | int
    unit: int
    prec: int

    @classmethod
    def make(cls, x, p, prec):
        """Build from an int or Fraction, capped at absolute precision prec."""
        x = Fraction(x)
        v = valuation(x, p)
        if v == INF or v >= prec:
            return cls(p, INF, 0, prec)
        u = x / Fraction(p) ** v
        return cls(p, v, to_zp(u, p, prec - v), prec)

    @classmethod
    def zero(cls, p, prec):
        return cls(p, INF, 0, prec)

    @classmethod
    def from_residue(cls, r, p, prec, shift=0):
        """Element p^shift * r where r is an integer known mod p^(prec - shift)."""
        rel = prec - shift
        if rel <= 0:
            return cls(p, INF, 0, prec)
        v = val_mod(r, p, rel)
        if v >= rel:
            return cls(p, INF, 0, prec)
        return cls(p, v + shift, (r % p**rel) // p**v, prec)

    @classmethod
    def parse(cls, text, p, prec):
        """Read the ``a*p^e`` form used in the JSON fixtures."""
        s = text.replace(" ", "")
        if s in ("0", "0*p^inf"):
            return cls.zero(p, prec)
        m = re.fullmatch(r"(-?\d+)(?:\*p\^(-?\d+))?", s)
        if not m:
            raise ValueError(f"cannot parse p-adic value {text!r}")
        a = int(m.group(1))
        e = int(m.group(2) or 0)
        return cls.make(Fraction(a) * Fraction(p) ** e, p, prec)

    # -- basic queries
    def is_zero(self):
        return self.val == INF

    @property
    def relprec(self):
        return 0 if self.val == INF else self.prec - self.val

    def lift(self):
        """Rational representative p^val * unit (balanced unit)."""
        if self.val == INF:
            return Fraction(0)
        u = balanced(self.unit, self.p**self.relprec)
        return Fraction(u) * Fraction(self.p) ** self.val

    def residue(self, N=None):
        """Integer representative mod p^N; requires val >= 0."""
        N = self.prec if N is None else N
        if self.val == INF:
            return 0
        if self.val < 0:
            raise ValueError("element is not integral")
        return self.unit * self.p**self.val % self.p**N

    def _coerce(self, other):
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        return PadicNumber.make(other, self.p, self.prec)

    # -- arithmetic
    def __neg__(self):
        if self.val == INF:
            return self
        return PadicNumber(self.p, self.val, (-self.unit) % self.p**self.relprec, self.prec)

    def __add__(self, other):
        o = self._coerce(other)
        prec = min(self.prec, o.prec)
        if self.val == INF:
            return o.with_prec(prec)
        if o.val == INF:
            return self.with_prec(prec)
        v = min(self.val, o.val)
        if v >= prec:
            return PadicNumber.zero(self.p, prec)
        rel = prec - v
        q = self.p**rel
        s = (self.unit * self.p ** (self.val - v) + o.unit * self.p ** (o.val - v)) % q
        return PadicNumber.from_residue(s, self.p, prec, v)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, PadicNumber):
            return self._mul_exact(Fraction(other))
        o = self._coerce(other)
        if self.val == INF or o.val == INF:
            a = self.prec + (0 if o.val == INF else o.val)
            b = o.prec + (0 if self.val == INF else self.val)
            return PadicNumber.zero(self.p, min(a, b))
        v = self.val + o.val
        prec = min(self.prec + o.val, o.prec + self.val)
        if v >= prec:
            return PadicNumber.zero(self.p, prec)
        rel = prec - v
        return PadicNumber(self.p, v, self.unit * o.unit % self.p**rel, prec)

    __rmul__ = __mul__

    def _mul_exact(self, x):
        """Product with an exact rational: the precision shifts by v(x)."""
        p = self.p
        if x == 0:
            return PadicNumber.zero(p, self.prec)
        v = valuation(x, p)
        prec = self.prec + v
        if self.val == INF:
            return PadicNumber.zero(p, prec)
        rel = prec - (self.val + v)
        u = x / Fraction(p) ** v
        return PadicNumber(p, self.val + v, self.unit * to_zp(u, p, rel) % p**rel, prec)

    def inverse(self):
        if self.val == INF:
            raise ZeroDivisionError("p-adic zero is not invertible")
        rel = self.relprec
        return PadicNumber(self.p, -self.val, pow(self.unit, -1, self.p**rel), rel - self.val)

    def __truediv__(self, other):
        if not isinstance(other, PadicNumber):
            return self._mul_exact(1 / Fraction(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        out = PadicNumber.make(1, self.p, self.prec)
        for _ in range(e):
            out = out * self
        return out

    def with_prec(self, prec):
        """Same element with the absolute precision capped at ``prec``."""
        if prec >= self.prec:
            return self
        if self.val == INF or self.val >= prec:
            return PadicNumber.zero(self.p, prec)
        rel = prec - self.val
        return PadicNumber(self.p, self.val, self.unit % self.p**rel, prec)

    def __eq__(self, other):
        if not isinstance(other, (PadicNumber, int, Fraction)):
            return NotImplemented
        return (self - self._coerce(other)).is_zero()

    def __hash__(self):
        return hash((self.p, self.prec))

    # -- printing
    def compact(self):
        """``unit*p^val`` with a balanced unit; ``0`` for zero."""
        if self.val == INF:
            return "0"
        u = balanced(self.unit, self.p**self.relprec)
        return f"{u}*p^{self.val}"

    def __str__(self):
        if self.val == INF:
            return f"0 + O({self.p}^{self.prec})"
        u = balanced(self.unit, self.p**self.relprec)
        return f"{u} * {self.p}^{self.val} + O({self.p}^{self.prec})"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# numpy helpers for Z/p^K arithmetic


def _dtype_for(modulus):
    return np.int64 if modulus < 2**31 else object


def as_modarray(rows, modulus):
    """Integer matrix mod ``modulus`` as a numpy array of a safe dtype."""
    dt = _dtype_for(modulus)
    a = np.array([[int(x) % modulus for x in r] for r in rows], dtype=object)
    if a.size == 0:
        a = a.reshape(len(rows), 0 if not rows else len(rows[0]))
    return a.astype(dt) if dt is np.int64 else a


def modmatmul(a, b, modulus):
    """Product of two integer arrays mod ``modulus`` without overflow."""
    if a.dtype != object and b.dtype != object and a.shape[1] > 0:
        # split b to keep partial sums below 2^63
        chunk = max(1, (2**62) // (modulus * modulus))
        if a.shape[1] <= chunk:
            return (a @ b) % modulus
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for s in range(0, a.shape[1], chunk):
            out = (out + (a[:, s:s + chunk] @ b[s:s + chunk]) % modulus) % modulus
        return out
    return np.asarray(np.dot(a.astype(object), b.astype(object)) % modulus)


def _min_val_position(sub, p, K):
    """Position (row-major first) of an entry of minimal valuation, and that valuation."""
    if sub.size == 0:
        return None, K
    pk = 1
    for v in range(K):
        mask = (sub % (pk * p)) != 0
        if mask.any():
            flat = int(np.argmax(mask.reshape(-1)))
            return divmod(flat, sub.shape[1]), v
        pk *= p
    return None, K


@dataclass(frozen=True)
class PadicMatrix:
    """Integral matrix mod p^prec.

    Entries are plain integers in [0, p^prec). Non-integral matrices are not
    represented; callers scale first.
    """

    p: int
    prec: int
    rows: tuple

    @classmethod
    def from_rows(cls, rows, p, prec):
        return cls(p, prec, tuple(tuple(to_zp(x, p, prec) for x in r) for r in rows))

    @classmethod
    def from_array(cls, arr, p, prec):
        q = p**prec
        return cls(p, prec, tuple(tuple(int(x) % q for x in r) for r in arr))

    @classmethod
    def identity(cls, n, p, prec):
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], p, prec)

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return PadicNumber.from_residue(self.rows[i][j], self.p, self.prec)

    def array(self):
        return as_modarray(self.rows, self.p**self.prec)

    def __matmul__(self, other):
        prec = min(self.prec, other.prec)
        q = self.p**prec
        return PadicMatrix.from_array(modmatmul(as_modarray(self.rows, q), as_modarray(other.rows, q), q), self.p, prec)

    def __add__(self, other):
        prec = min(self.prec, other.prec)
        q = self.p**prec
        return PadicMatrix(self.p, prec, tuple(tuple((a + b) % q for a, b in zip(r, s))
                                                for r, s in zip(self.rows, other.rows)))

    def scale(self, c):
        q = self.p**self.prec
        c = to_zp(c, self.p, self.prec)
        return PadicMatrix(self.p, self.prec, tuple(tuple(a * c % q for a in r) for r in self.rows))

    def is_zero(self):
        return all(a == 0 for r in self.rows for a in r)

    def apply(self, vec):
        """Matrix times a vector of integers mod p^prec."""
        q = self.p**self.prec
        return [sum(a * b for a, b in zip(r, vec)) % q for r in self.rows]

    def charpoly(self, min_prec=1):
        return charpoly(self, min_prec)

    def __str__(self):
        q = self.p**self.prec
        return "\n".join(" ".join(str(balanced(a, q)) for a in r) for r in self.rows)


# ---------------------------------------------------------------------------
# characteristic polynomial


@dataclass(frozen=True)
class PadicPolynomial:
    """Coefficients low degree first; ``loss`` is the number of digits lost."""

    coeffs: tuple
    loss: int = 0

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def p(self):
        return self.coeffs[0].p

    def __call__(self, x):
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def integer_coeffs(self):
        """Balanced integer representatives (only sensible for integral coefficients)."""
        return [int(c.lift()) for c in self.coeffs]

    def __str__(self):
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c.is_zero():
                continue
            terms.append(f"({c.compact()})*x^{i}")
        return " + ".join(terms) if terms else "0"


def _hessenberg_poly(H, p, K):
    """Characteristic polynomial of an upper Hessenberg integer matrix mod p^K."""
    n = len(H)
    q = p**K
    polys = [[1]]
    for m in range(1, n + 1):
        prev = polys[m - 1]
        hmm = H[m - 1][m - 1]
        cur = [0] * (m + 1)
        for d, c in enumerate(prev):
            cur[d + 1] = (cur[d + 1] + c) % q
            cur[d] = (cur[d] - hmm * c) % q
        t = 1
        for i in range(m - 1, 0, -1):
            t = t * H[i][i - 1] % q
            coef = t * H[i - 1][m - 1] % q
            if coef:
                for d, c in enumerate(polys[i - 1]):
                    cur[d] = (cur[d] - coef * c) % q
        polys.append(cur)
    return polys[n]


def charpoly(M, min_prec=1):
    """Monic characteristic polynomial of a square PadicMatrix.

    Reduction to Hessenberg form only ever divides by a pivot of minimal
    valuation in its column, so every multiplier is integral; each pivot of
    valuation v costs v digits of absolute precision, and the total is
    reported as ``loss``. The Hessenberg recurrence itself is division-free.
    """
    n = M.nrows
    if n != M.ncols:
        raise ValueError("charpoly needs a square matrix")
    p, K = M.p, M.prec
    q = p**K
    A = M.array()
    for j in range(n - 2):
        sub = A[j + 1:, j:j + 1]
        pos, v = _min_val_position(sub, p, K)
        if pos is None:
            continue
        r = j + 1 + pos[0]
        if r != j + 1:
            A[[r, j + 1], :] = A[[j + 1, r], :]
            A[:, [r, j + 1]] = A[:, [j + 1, r]]
        pk = p**v
        col = [int(x) for x in A[:, j]]
        if v:
            K -= v
            q = p**K
            A %= q
        uinv = pow(col[j + 1] // pk % q, -1, q)
        for i in range(j + 2, n):
            a = col[i]
            if a % (pk * q) == 0:
                A[i, j] = 0
                continue
            f = (a // pk) * uinv % q
            A[i, :] = (A[i, :] - f * A[j + 1, :]) % q
            A[:, j + 1] = (A[:, j + 1] + f * A[:, i]) % q
    if K < min_prec:
        raise PrecisionError(f"charpoly kept only {K} digits, {min_prec} requested")
    H = [[int(x) % q for x in row] for row in A]
    coeffs = _hessenberg_poly(H, p, K)
    return PadicPolynomial(tuple(PadicNumber.from_residue(c, p, K) for c in coeffs), M.prec - K)


# ---------------------------------------------------------------------------
# Newton polygons


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull data; ``slopes`` are eigenvalue valuations, nondecreasing.

    Roots that vanish to the working precision appear as ``INF`` at the end.
    """

    points: tuple
    slopes: tuple

    def count_below(self, h):
        return sum(1 for s in self.slopes if s <= h)

    def multiset(self):
        out = {}
        for s in self.slopes:
            out[s] = out.get(s, 0) + 1
        return out


def newton_polygon(f, p=None):
    """Newton polygon of a polynomial given by PadicPolynomial, PadicNumbers or ints."""
    coeffs = f.coeffs if isinstance(f, PadicPolynomial) else tuple(f)
    if p is None:
        p = coeffs[0].p
    vals = []
    for c in coeffs:
        if isinstance(c, PadicNumber):
            vals.append(c.val)
        else:
            vals.append(valuation(Fraction(c), p))
    if not vals or vals[-1] == INF:
        raise PrecisionError("leading coefficient vanishes to working precision")
    pts = [(i, Fraction(v)) for i, v in enumerate(vals) if v != INF]
    if len(pts) == 1 and pts[0][0] == 0:
        raise ValueError("constant polynomial has no Newton polygon")
    zero_roots = pts[0][0]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = -(y2 - y1) / (x2 - x1)
        slopes.extend([s] * (x2 - x1))
    slopes.sort()
    slopes.extend([INF] * zero_roots)
    points = tuple((i, (v if v == INF else Fraction(v))) for i, v in enumerate(vals))
    return NewtonPolygon(points, tuple(slopes))


# ---------------------------------------------------------------------------
# kernels and solving mod p^N


@dataclass(frozen=True)
class Kernel:
    """Saturated kernel basis.

    ``vectors`` satisfy M v = 0 mod p^cert; ``free`` lists the coordinate
    where each basis vector has entry 1 (all other free coordinates are 0).
    """

    vectors: tuple
    cert: int
    rank: int
    free: tuple

    def __len__(self):
        return len(self.vectors)


def _echelon(A, p, K, aug=None):
    """Full-pivoting row reduction of A mod p^K in place.

    Returns (pivots, colperm, aug) where pivots is a list of (valuation) and
    the first len(pivots) rows of A (with columns permuted by colperm) are
    upper triangular. ``aug`` columns are carried along by row operations but
    never chosen as pivots.
    """
    q = p**K
    m, n = A.shape
    colperm = list(range(n))
    pivots = []
    t = 0
    while t < min(m, n):
        pos, v = _min_val_position(A[t:, t:], p, K)
        if pos is None:
            break
        i, j = pos[0] + t, pos[1] + t
        if i != t:
            A[[i, t], :] = A[[t, i], :]
            if aug is not None:
                aug[[i, t], :] = aug[[t, i], :]
        if j != t:
            A[:, [j, t]] = A[:, [t, j]]
            colperm[j], colperm[t] = colperm[t], colperm[j]
        pk = p**v
        uinv = pow(int(A[t, t]) // pk, -1, q)
        col = A[t + 1:, t]
        nz = np.nonzero(col)[0]
        if len(nz):
            rows = nz + t + 1
            f = ((A[rows, t] // pk) * uinv) % q
            A[rows, t:] = (A[rows, t:] - f[:, None] * A[t, t:][None, :]) % q
            if aug is not None:
                aug[rows, :] = (aug[rows, :] - f[:, None] * aug[t, :][None, :]) % q
        pivots.append(v)
        t += 1
    return pivots, colperm, aug


def _back_substitute(A, pivots, p, K, rhs):
    """Solve the triangular system given by the first rows of A for x (pivot block)."""
    q = p**K
    r = len(pivots)
    x = [0] * r
    for t in range(r - 1, -1, -1):
        s = rhs[t]
        for k in range(t + 1, r):
            if x[k]:
                s -= int(A[t, k]) * x[k]
        s %= q
        v = pivots[t]
        pk = p**v
        if s % pk:
            return None
        u = int(A[t, t]) // pk
        x[t] = (s // pk) * pow(u, -1, q) % q
    return x


def kernel_mod_pN(M):
    """Basis of the saturated kernel of an integral matrix mod p^N.

    Pivots are chosen with minimal valuation over the whole remaining block
    (lowest row, then lowest column). A pivot of valuation v costs v digits on
    the kernel vectors; the certificate is N minus the largest such v.
    """
    p, K = M.p, M.prec
    q = p**K
    n = M.ncols
    if M.nrows == 0:
        vecs = tuple(tuple(int(i == j) for i in range(n)) for j in range(n))
        return Kernel(vecs, K, 0, tuple(range(n)))
    A = M.array().copy()
    pivots, colperm, _ = _echelon(A, p, K)
    r = len(pivots)
    cert = K - (max(pivots) if pivots else 0)
    qc = p**cert
    vecs = []
    free = []
    for f in range(r, n):
        rhs = [(-int(A[t, f])) % q for t in range(r)]
        x = _back_substitute(A, pivots, p, K, rhs)
        vec = [0] * n
        for t in range(r):
            vec[colperm[t]] = x[t] % qc
        vec[colperm[f]] = 1
        vecs.append(tuple(vec))
        free.append(colperm[f])
    return Kernel(tuple(vecs), cert, r, tuple(free))


def solve_mod_pN(M, b, reduce=True):
    """One solution of M x = b mod p^N (free coordinates set to zero).

    Returns (x, cert): the solution is unique mod p^cert. With reduce=False
    the unreduced representatives are returned, and these satisfy M x = b
    exactly mod p^N. Raises ValueError when the system has no p-integral
    solution.
    """
    p, K = M.p, M.prec
    q = p**K
    A = M.array().copy()
    aug = as_modarray([[x] for x in b], q)
    pivots, colperm, aug = _echelon(A, p, K, aug)
    r = len(pivots)
    for i in range(r, M.nrows):
        if int(aug[i, 0]) % q:
            raise ValueError("inconsistent linear system")
    x = _back_substitute(A, pivots, p, K, [int(aug[t, 0]) for t in range(r)])
    if x is None:
        raise ValueError("no p-integral solution")
    cert = K - (max(pivots) if pivots else 0)
    out = [0] * M.ncols
    for t in range(r):
        out[colperm[t]] = x[t] % (p**cert if reduce else q)
    return out, cert


def rank_mod_p(rows, p):
    """Rank of an integer matrix over F_p."""
    if not rows:
        return 0
    A = as_modarray(rows, p)
    pivots, _, _ = _echelon(A, p, 1)
    return len(pivots)
