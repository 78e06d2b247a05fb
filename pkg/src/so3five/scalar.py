"""Exact arithmetic in the field Q(sqrt 3), a float fallback, and field-generic
linear algebra.

Every number flowing through the public JSON formats is a :class:`Scalar`:
either an exact element ``a + b*sqrt(3)`` with arbitrary-precision rational
``a``, ``b``, or a plain float.  Exact and float scalars mix freely; any
operation that touches a float yields a float.  Equality between exact scalars
is bit-exact, equality involving a float is within the global tolerance.

The wire format is a tiny grammar::

    scalar   := rational | rational "*sqrt3" | rational ("+"|"-") rational "*sqrt3" | decimal
    rational := ["+"|"-"] digits ["/" digits]

"3/2*sqrt3" parses to (0, 3/2), "-1/2" to (-1/2, 0), "0.25" to a float.

The linear algebra here (rref, nullspace, solve, det, spectral projectors) is
generic over the element type: it works for Scalar and for the complex pairs
in :class:`CScalar`, choosing pivots by float magnitude and testing zeroness
exactly on exact entries, against ``tol * max-row-norm`` on float entries.
"""

from __future__ import annotations

import math
import os
import re
from fractions import Fraction
from functools import total_ordering

_DEFAULT_TOL = 1e-9
_tol = float(os.environ.get("SO3FIVE_TOL", _DEFAULT_TOL))

_SQRT3_FLOAT = math.sqrt(3.0)


def get_tol() -> float:
    """Current global tolerance for float comparisons and rank decisions."""
    return _tol


def set_tol(t: float) -> None:
    global _tol
    _tol = float(t)


_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")
_TRAILING_RATIONAL_RE = re.compile(r"([+-]?\d+(?:/\d+)?)$")


def _rat_str(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@total_ordering
class Scalar:
    """One number: exact ``a + b*sqrt3`` or a float."""

    __slots__ = ("_a", "_b", "_f")

    def __init__(self, a=0, b=0, _float=None):
        if _float is not None:
            self._a = None
            self._b = None
            self._f = float(_float)
        else:
            self._a = a if type(a) is Fraction else Fraction(a)
            self._b = b if type(b) is Fraction else Fraction(b)
            self._f = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def exact(cls, a, b=0) -> "Scalar":
        return cls(a, b)

    @classmethod
    def from_float(cls, f: float) -> "Scalar":
        return cls(_float=f)

    @classmethod
    def from_string(cls, s: str) -> "Scalar":
        s = s.strip().replace(" ", "")
        if not s:
            raise ValueError("empty scalar string")
        if s.endswith("*sqrt3"):
            head = s[: -len("*sqrt3")]
            m = _TRAILING_RATIONAL_RE.search(head)
            if not m:
                raise ValueError(f"bad scalar string {s!r}")
            b = Fraction(m.group(1))
            rest = head[: m.start(1)]
            if rest == "":
                return cls(0, b)
            # rest is the rational part followed by an explicit sign that the
            # trailing regex may or may not have swallowed
            if rest.endswith("+"):
                a_str = rest[:-1]
            elif rest.endswith("-"):
                a_str = rest[:-1]
                b = -b  # the sign char was not captured by the tail match
            else:
                a_str = rest  # sign was captured into b already
            if not _RATIONAL_RE.match(a_str):
                raise ValueError(f"bad scalar string {s!r}")
            return cls(Fraction(a_str), b)
        if _RATIONAL_RE.match(s):
            return cls(Fraction(s))
        try:
            return cls(_float=float(s))
        except ValueError:
            raise ValueError(f"bad scalar string {s!r}") from None

    # -- kind and components ----------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self._f is None

    @property
    def a(self) -> Fraction:
        if self._f is not None:
            raise TypeError("float scalar has no rational part")
        return self._a

    @property
    def b(self) -> Fraction:
        if self._f is not None:
            raise TypeError("float scalar has no sqrt3 part")
        return self._b

    # -- conversions -------------------------------------------------------

    def __float__(self) -> float:
        if self._f is not None:
            return self._f
        return float(self._a) + float(self._b) * _SQRT3_FLOAT

    def to_string(self) -> str:
        if self._f is not None:
            return repr(self._f)
        a, b = self._a, self._b
        if b == 0:
            return _rat_str(a)
        if a == 0:
            return _rat_str(b) + "*sqrt3"
        sign = "+" if b > 0 else "-"
        return _rat_str(a) + sign + _rat_str(abs(b)) + "*sqrt3"

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"Scalar({self.to_string()!r})"

    # -- predicates --------------------------------------------------------

    def is_zero(self, tol: float | None = None) -> bool:
        if self._f is None:
            return self._a == 0 and self._b == 0
        t = _tol if tol is None else tol
        return abs(self._f) <= t

    def sign(self) -> int:
        """Exact sign for exact scalars, float sign otherwise."""
        if self._f is not None:
            return (self._f > 0) - (self._f < 0)
        a, b = self._a, self._b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with 3 b^2 (equality impossible: sqrt3
        # is irrational, so a + b*sqrt3 = 0 forces a = b = 0)
        if a > 0:  # b < 0
            return 1 if a * a > 3 * b * b else -1
        return 1 if 3 * b * b > a * a else -1

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, Scalar):
            return x
        if isinstance(x, bool):
            return NotImplemented
        if isinstance(x, (int, Fraction)):
            return Scalar(x)
        if isinstance(x, float):
            return Scalar(_float=x)
        return NotImplemented

    def __add__(self, other):
        o = Scalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._f is None and o._f is None:
            return Scalar(self._a + o._a, self._b + o._b)
        return Scalar(_float=float(self) + float(o))

    __radd__ = __add__

    def __neg__(self):
        if self._f is None:
            return Scalar(-self._a, -self._b)
        return Scalar(_float=-self._f)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = Scalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = Scalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = Scalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._f is None and o._f is None:
            a1, b1, a2, b2 = self._a, self._b, o._a, o._b
            if not b1:
                if not b2:
                    return Scalar(a1 * a2)
                return Scalar(a1 * a2, a1 * b2)
            if not b2:
                return Scalar(a1 * a2, b1 * a2)
            return Scalar(a1 * a2 + 3 * b1 * b2, a1 * b2 + b1 * a2)
        return Scalar(_float=float(self) * float(o))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self._f is not None:
            return Scalar(_float=1.0 / self._f)
        a, b = self._a, self._b
        if a == 0 and b == 0:
            raise ZeroDivisionError("scalar division by zero")
        n = a * a - 3 * b * b  # nonzero: sqrt3 irrational
        return Scalar(a / n, -b / n)

    def __truediv__(self, other):
        o = Scalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o._f is not None and o._f == 0.0:
            raise ZeroDivisionError("scalar division by zero")
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = Scalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = Scalar(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __abs__(self):
        if self._f is not None:
            return Scalar(_float=abs(self._f))
        return self if self.sign() >= 0 else -self

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        o = Scalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._f is None and o._f is None:
            return self._a == o._a and self._b == o._b
        return abs(float(self) - float(o)) <= _tol

    def __lt__(self, other):
        o = Scalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._f is None and o._f is None:
            return (self - o).sign() < 0
        return float(self) < float(o)

    __hash__ = None  # mutable-tolerance equality: keep unhashable


def sqrt3() -> Scalar:
    return Scalar(0, 1)


def scalar(x) -> Scalar:
    """Coerce ints, Fractions, floats, strings and Scalars to Scalar."""
    if isinstance(x, Scalar):
        return x
    if isinstance(x, str):
        return Scalar.from_string(x)
    s = Scalar._coerce(x)
    if s is NotImplemented:
        raise TypeError(f"cannot make a Scalar from {type(x).__name__}")
    return s


ZERO = Scalar(0)
ONE = Scalar(1)


class CScalar:
    """Complex number with Scalar real and imaginary parts.

    Only what the spinor and twistor computations need: ring operations,
    conjugation, division, magnitude.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = scalar(re)
        self.im = scalar(im)

    @property
    def is_exact(self) -> bool:
        return self.re.is_exact and self.im.is_exact

    def conjugate(self) -> "CScalar":
        return CScalar(self.re, -self.im)

    def is_zero(self, tol: float | None = None) -> bool:
        return self.re.is_zero(tol) and self.im.is_zero(tol)

    def mag(self) -> float:
        return math.hypot(float(self.re), float(self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    @staticmethod
    def _coerce(x):
        if isinstance(x, CScalar):
            return x
        if isinstance(x, complex):
            return CScalar(Scalar(_float=x.real), Scalar(_float=x.imag))
        s = Scalar._coerce(x)
        if s is NotImplemented:
            return NotImplemented
        return CScalar(s, ZERO)

    def __add__(self, other):
        o = CScalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return CScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return CScalar(-self.re, -self.im)

    def __sub__(self, other):
        o = CScalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = CScalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = CScalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        si, oi = self.im, o.im
        if si._f is None and not si._a and not si._b:
            if oi._f is None and not oi._a and not oi._b:
                return CScalar(self.re * o.re, ZERO)
            return CScalar(self.re * o.re, self.re * oi)
        if oi._f is None and not oi._a and not oi._b:
            return CScalar(self.re * o.re, si * o.re)
        return CScalar(self.re * o.re - si * oi,
                       self.re * oi + si * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "CScalar":
        n = self.re * self.re + self.im * self.im
        return CScalar(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = CScalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = CScalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other):
        o = CScalar._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    __hash__ = None

    def __repr__(self) -> str:
        return f"CScalar({self.re.to_string()!r}, {self.im.to_string()!r})"


I = CScalar(0, 1)


def cscalar(x) -> CScalar:
    o = CScalar._coerce(x)
    if o is NotImplemented:
        raise TypeError(f"cannot make a CScalar from {type(x).__name__}")
    return o


# ---------------------------------------------------------------------------
# field-generic linear algebra
# ---------------------------------------------------------------------------


def _mag(x) -> float:
    if isinstance(x, CScalar):
        return x.mag()
    return abs(float(x))


def _elem_is_exact(x) -> bool:
    return x.is_exact


def _zero_like(x):
    return CScalar(0, 0) if isinstance(x, CScalar) else Scalar(0)


def _one_like(x):
    return CScalar(1, 0) if isinstance(x, CScalar) else Scalar(1)


def _matrix_scale(rows) -> float:
    best = 0.0
    for row in rows:
        s = math.sqrt(sum(_mag(x) ** 2 for x in row))
        best = max(best, s)
    return best if best > 0 else 1.0


def _negligible(x, scale: float, tol: float) -> bool:
    if _elem_is_exact(x):
        return x.is_zero()
    return _mag(x) <= tol * scale


def rref(rows, tol: float | None = None):
    """Reduced row echelon form.  Returns (new_rows, pivot_columns).

    Pivots are chosen by float magnitude; a float entry counts as zero when
    its magnitude is at most tol * (max row norm of the input).
    """
    t = _tol if tol is None else tol
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return rows, []
    scale = _matrix_scale(rows)
    m, n = len(rows), len(rows[0])
    pivots = []
    r = 0
    for col in range(n):
        if r >= m:
            break
        best_i, best_m = -1, 0.0
        for i in range(r, m):
            x = rows[i][col]
            if _negligible(x, scale, t):
                continue
            mg = _mag(x)
            if mg > best_m:
                best_i, best_m = i, mg
        if best_i < 0:
            continue
        rows[r], rows[best_i] = rows[best_i], rows[r]
        piv = rows[r][col]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(m):
            if i == r:
                continue
            f = rows[i][col]
            if _negligible(f, scale, t):
                continue
            rows[i] = [xi - f * xr for xi, xr in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    return rows, pivots


def rank(rows, tol: float | None = None) -> int:
    return len(rref(rows, tol)[1])


def nullspace(rows, tol: float | None = None):
    """Basis of the kernel, one vector per non-pivot column."""
    if not rows or not rows[0]:
        return []
    red, pivots = rref(rows, tol)
    n = len(rows[0])
    sample = rows[0][0]
    zero, one = _zero_like(sample), _one_like(sample)
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = [zero] * n
        v[free] = one
        for j, pc in enumerate(pivots):
            v[pc] = -red[j][free]
        basis.append(v)
    return basis


def solve(rows, rhs, tol: float | None = None):
    """One solution of A x = b (free variables set to zero).

    Raises ValueError when the system is inconsistent.
    """
    t = _tol if tol is None else tol
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    scale = _matrix_scale(aug)
    red, pivots = rref(aug, tol)
    n = len(rows[0])
    if n in pivots:
        raise ValueError("inconsistent linear system")
    for row in red:
        if all(_negligible(x, scale, t) for x in row[:n]) and \
                not _negligible(row[n], scale, t):
            raise ValueError("inconsistent linear system")
    sample = rows[0][0]
    x = [_zero_like(sample)] * n
    for j, pc in enumerate(pivots):
        x[pc] = red[j][n]
    return x


def det(rows, tol: float | None = None):
    """Determinant by elimination, exact on exact input."""
    t = _tol if tol is None else tol
    rows = [list(r) for r in rows]
    n = len(rows)
    scale = _matrix_scale(rows)
    sample = rows[0][0]
    out = _one_like(sample)
    sign_flip = False
    for col in range(n):
        best_i, best_m = -1, 0.0
        for i in range(col, n):
            x = rows[i][col]
            if _negligible(x, scale, t):
                continue
            mg = _mag(x)
            if mg > best_m:
                best_i, best_m = i, mg
        if best_i < 0:
            return _zero_like(sample)
        if best_i != col:
            rows[col], rows[best_i] = rows[best_i], rows[col]
            sign_flip = not sign_flip
        piv = rows[col][col]
        out = out * piv
        for i in range(col + 1, n):
            f = rows[i][col] / piv
            if f.is_zero():
                continue
            rows[i] = [xi - f * xc for xi, xc in zip(rows[i], rows[col])]
    return -out if sign_flip else out


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for l in range(1, k):
                acc = acc + A[i][l] * B[l][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(A, v):
    out = []
    for row in A:
        acc = row[0] * v[0]
        for x, y in zip(row[1:], v[1:]):
            acc = acc + x * y
        out.append(acc)
    return out


def mat_add(A, B):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[c * x for x in row] for row in A]


def transpose(A):
    return [list(col) for col in zip(*A)]


def identity(n, like=None):
    one = _one_like(like) if like is not None else Scalar(1)
    zero = _zero_like(like) if like is not None else Scalar(0)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def dot(u, v):
    acc = None
    for x, y in zip(u, v):
        if isinstance(x, Scalar) and x._f is None and not x._a and not x._b:
            continue
        acc = x * y if acc is None else acc + x * y
    return acc if acc is not None else u[0] * v[0]


def spectral_projector(L, eigenvalues, lam):
    """Projector onto the lam-eigenspace of L, as a polynomial in L.

    L must be diagonalizable with spectrum contained in `eigenvalues`; the
    projector is the Lagrange product over the other eigenvalues, so it is
    exact when L and the eigenvalues are exact.
    """
    n = len(L)
    lam = scalar(lam)
    P = identity(n, like=L[0][0])
    for mu in eigenvalues:
        mu = scalar(mu)
        if mu == lam:
            continue
        M = [[L[i][j] - (mu if i == j else ZERO) for j in range(n)] for i in range(n)]
        P = mat_mul(P, M)
        P = mat_scale((lam - mu).inverse(), P)
    return P


def to_float_matrix(rows):
    import numpy as np

    if rows and rows[0] and isinstance(rows[0][0], CScalar):
        return np.array([[complex(x) for x in row] for row in rows], dtype=complex)
    return np.array([[float(x) for x in row] for row in rows], dtype=float)
