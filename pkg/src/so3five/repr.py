"""Tensor decompositions induced by the canonical ternary form.

The structure group acts irreducibly on R^5; this module carries the
operators built from the ternary form (hat, grave, bar, check, prime),
the splitting of two-tensors into the five irreducible summands, the
splitting of metric-connection tensors into a group-valued part plus a
skew torsion, and the six-component decomposition of curvature tensors.
Everything works over exact Scalars and degrades to floats transparently.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations

from .exterior import Form, hodge_star
from .scalar import Scalar, dot, rref, scalar
from .upsilon import E_matrices, standard_upsilon

N = 5
PAIRS = list(combinations(range(N), 2))
TRIPLES = list(combinations(range(N), 3))
QUADS = list(combinations(range(N), 4))
SYM4_KEYS = list(combinations_with_replacement(range(N), 4))

HAT_EIGENVALUES = {"c1": 14, "c3": 7, "c7": -8, "c5": -3, "c9": 4}
COMPONENT_DIMS = {"c1": 1, "c3": 3, "c7": 7, "c5": 5, "c9": 9}


def _perm_sign(seq):
    sign = 1
    items = list(seq)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=1)
def _dense_upsilon():
    return standard_upsilon().dense()

@lru_cache(maxsize=1)
def _upsilon_by_last():
    """For each m, the nonzero entries (i, j, value) of Y_ijm."""
    d = _dense_upsilon()
    out = [[] for _ in range(N)]
    for i in range(N):
        for j in range(N):
            for m in range(N):
                v = d[i][j][m]
                if not v.is_zero():
                    out[m].append((i, j, v))
    return out

@lru_cache(maxsize=1)
def _upsilon_third():
    """For each pair (c, d), the nonzero entries (m, value) of Y_cdm."""
    d = _dense_upsilon()
    out = [[[] for _ in range(N)] for _ in range(N)]
    for c in range(N):
        for dd in range(N):
            for m in range(N):
                v = d[c][dd][m]
                if not v.is_zero():
                    out[c][dd].append((m, v))
    return out


class Tensor2:
    """Dense element of the 25-dimensional space of two-tensors on R^5."""

    __slots__ = ("m",)

    def __init__(self, rows):
        if len(rows) != N or any(len(r) != N for r in rows):
            raise ValueError("Tensor2 needs a 5x5 array")
        self.m = [[scalar(x) for x in row] for row in rows]

    @classmethod
    def zero(cls):
        return cls([[0] * N for _ in range(N)])

    @classmethod
    def metric(cls):
        return cls([[1 if i == j else 0 for j in range(N)] for i in range(N)])

    @classmethod
    def basis(cls, i, j):
        rows = [[0] * N for _ in range(N)]
        rows[i][j] = 1
        return cls(rows)

    @classmethod
    def from_form(cls, f: Form):
        if f.degree != 2:
            raise ValueError("need a 2-form")
        if f.has_fiber_legs():
            raise ValueError("need a base 2-form")
        rows = [[Scalar(0) for _ in range(N)] for _ in range(N)]
        for (a, b), v in f.terms.items():
            rows[a - 1][b - 1] = v
            rows[b - 1][a - 1] = -v
        return cls(rows)

    def to_form(self, model):
        for i in range(N):
            for j in range(N):
                if not (self.m[i][j] + self.m[j][i]).is_zero():
                    raise ValueError("matrix is not antisymmetric")
        terms = [((i + 1, j + 1), self.m[i][j]) for i, j in PAIRS]
        return Form(model, 2, terms)

    def __add__(self, other):
        return Tensor2([[a + b for a, b in zip(r1, r2)]
                        for r1, r2 in zip(self.m, other.m)])

    def __sub__(self, other):
        return Tensor2([[a - b for a, b in zip(r1, r2)]
                        for r1, r2 in zip(self.m, other.m)])

    def __neg__(self):
        return Tensor2([[-a for a in row] for row in self.m])

    def scale(self, c):
        c = scalar(c)
        return Tensor2([[c * a for a in row] for row in self.m])

    def __eq__(self, other):
        if not isinstance(other, Tensor2):
            return NotImplemented
        return all(a == b for r1, r2 in zip(self.m, other.m)
                   for a, b in zip(r1, r2))

    __hash__ = None

    def sym(self):
        half = scalar(Fraction(1, 2))
        return Tensor2([[half * (self.m[i][j] + self.m[j][i])
                         for j in range(N)] for i in range(N)])

    def alt(self):
        half = scalar(Fraction(1, 2))
        return Tensor2([[half * (self.m[i][j] - self.m[j][i])
                         for j in range(N)] for i in range(N)])

    def transpose(self):
        return Tensor2([[self.m[j][i] for j in range(N)] for i in range(N)])

    def trace(self):
        acc = Scalar(0)
        for i in range(N):
            acc = acc + self.m[i][i]
        return acc

    def inner(self, other):
        acc = Scalar(0)
        for i in range(N):
            for j in range(N):
                acc = acc + self.m[i][j] * other.m[i][j]
        return acc

    def norm_sq(self):
        return self.inner(self)

    @property
    def is_exact(self):
        return all(e.is_exact for row in self.m for e in row)

    def is_zero(self, tol=None):
        return all(e.is_zero(tol) for row in self.m for e in row)

    def max_mag(self):
        return max(abs(float(e)) for row in self.m for e in row)

    def __repr__(self):
        return "Tensor2(%r)" % (self.m,)


class ConnTensor:
    """Element of Lambda^2 R^5 (x) R^5: xi_ijk with xi_ijk = -xi_jik."""

    __slots__ = ("x",)

    def __init__(self, entries):
        x = [[[scalar(entries[i][j][k]) for k in range(N)]
              for j in range(N)] for i in range(N)]
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    if not (x[i][j][k] + x[j][i][k]).is_zero():
                        raise ValueError(
                            "connection tensor must be antisymmetric in the "
                            "first index pair")
        self.x = x

    @classmethod
    def zero(cls):
        return cls([[[0] * N for _ in range(N)] for _ in range(N)])

    @classmethod
    def from_pairs(cls, data):
        """Build from {(i, j, k): value} with i < j; antisymmetry is filled in."""
        x = [[[Scalar(0) for _ in range(N)] for _ in range(N)] for _ in range(N)]
        for (i, j, k), v in data.items():
            if not 0 <= i < j < N or not 0 <= k < N:
                raise ValueError("need 0 <= i < j < 5 and 0 <= k < 5")
            v = scalar(v)
            x[i][j][k] = x[i][j][k] + v
            x[j][i][k] = x[j][i][k] - v
        obj = cls.__new__(cls)
        obj.x = x
        return obj

    @classmethod
    def from_so3(cls, E, w):
        """E an antisymmetric 5x5 matrix, w a covector: xi_ijk = E_ij w_k."""
        w = [scalar(c) for c in w]
        x = [[[scalar(E[i][j]) * w[k] for k in range(N)]
              for j in range(N)] for i in range(N)]
        obj = cls.__new__(cls)
        obj.x = x
        return obj

    @classmethod
    def from_three_form(cls, f: Form):
        if f.degree != 3 or f.has_fiber_legs():
            raise ValueError("need a base 3-form")
        x = [[[Scalar(0) for _ in range(N)] for _ in range(N)] for _ in range(N)]
        for idx, v in f.terms.items():
            a, b, c = (t - 1 for t in idx)
            for p in permutations((a, b, c)):
                x[p[0]][p[1]][p[2]] = v * _perm_sign_of(p, (a, b, c))
        obj = cls.__new__(cls)
        obj.x = x
        return obj

    @classmethod
    def from_vector(cls, vec):
        if len(vec) != 50:
            raise ValueError("need 50 components")
        x = [[[Scalar(0) for _ in range(N)] for _ in range(N)] for _ in range(N)]
        pos = 0
        for a, b in PAIRS:
            for k in range(N):
                v = scalar(vec[pos])
                pos += 1
                x[a][b][k] = v
                x[b][a][k] = -v
        obj = cls.__new__(cls)
        obj.x = x
        return obj

    def to_vector(self):
        return [self.x[a][b][k] for a, b in PAIRS for k in range(N)]

    def slot_matrix(self, k):
        return Tensor2([[self.x[i][j][k] for j in range(N)] for i in range(N)])

    def __add__(self, other):
        obj = ConnTensor.__new__(ConnTensor)
        obj.x = [[[self.x[i][j][k] + other.x[i][j][k] for k in range(N)]
                  for j in range(N)] for i in range(N)]
        return obj

    def __sub__(self, other):
        obj = ConnTensor.__new__(ConnTensor)
        obj.x = [[[self.x[i][j][k] - other.x[i][j][k] for k in range(N)]
                  for j in range(N)] for i in range(N)]
        return obj

    def scale(self, c):
        c = scalar(c)
        obj = ConnTensor.__new__(ConnTensor)
        obj.x = [[[c * self.x[i][j][k] for k in range(N)]
                  for j in range(N)] for i in range(N)]
        return obj

    def norm_sq(self):
        acc = Scalar(0)
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    acc = acc + self.x[i][j][k] * self.x[i][j][k]
        return acc

    def is_zero(self, tol=None):
        return all(self.x[i][j][k].is_zero(tol)
                   for i in range(N) for j in range(N) for k in range(N))

    @property
    def is_exact(self):
        return all(self.x[i][j][k].is_exact
                   for i in range(N) for j in range(N) for k in range(N))

    def max_mag(self):
        return max(abs(float(self.x[i][j][k]))
                   for i in range(N) for j in range(N) for k in range(N))

    def skew_violation(self):
        """How far the tensor is from being totally antisymmetric."""
        worst = 0.0
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    worst = max(worst, abs(float(
                        self.x[i][j][k] + self.x[i][k][j])))
        return worst

    def three_form(self, model, tol=None):
        """Interpret a totally antisymmetric tensor as a 3-form."""
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    if not (self.x[i][j][k] + self.x[i][k][j]).is_zero(tol):
                        raise ValueError("tensor is not totally antisymmetric")
        terms = [((a + 1, b + 1, c + 1), self.x[a][b][c])
                 for a, b, c in TRIPLES]
        return Form(model, 3, terms)


def _perm_sign_of(p, base):
    """Sign of the permutation taking base to p (both tuples of distinct items)."""
    order = [base.index(t) for t in p]
    return _perm_sign(order)


class CurvTensor:
    """Curvature tensor K_ijkl, antisymmetric in (ij) and in (kl)."""

    __slots__ = ("x",)

    def __init__(self, entries):
        x = [[[[scalar(entries[i][j][k][l]) for l in range(N)]
               for k in range(N)] for j in range(N)] for i in range(N)]
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    for l in range(N):
                        if not (x[i][j][k][l] + x[j][i][k][l]).is_zero():
                            raise ValueError("not antisymmetric in (ij)")
                        if not (x[i][j][k][l] + x[i][j][l][k]).is_zero():
                            raise ValueError("not antisymmetric in (kl)")
        self.x = x

    @classmethod
    def zero(cls):
        obj = cls.__new__(cls)
        obj.x = [[[[Scalar(0)] * N for _ in range(N)]
                  for _ in range(N)] for _ in range(N)]
        return obj

    @classmethod
    def from_forms(cls, r_forms):
        """K_ijkl = sum_I (E_I)_ij (r^I)_kl with plain 2-form coefficients."""
        if len(r_forms) != 3:
            raise ValueError("need three curvature 2-forms")
        E = E_matrices()
        R = [Tensor2.from_form(f) for f in r_forms]
        obj = cls.__new__(cls)
        obj.x = [[[[sum((E[t][i][j] * R[t].m[k][l] for t in range(3)),
                        Scalar(0))
                    for l in range(N)] for k in range(N)]
                  for j in range(N)] for i in range(N)]
        return obj

    def ricci(self):
        """k_jl = K_ijil."""
        return Tensor2([[sum((self.x[i][j][i][l] for i in range(N)), Scalar(0))
                         for l in range(N)] for j in range(N)])

    def so3_coefficients(self):
        """Project the (ij) slot onto the so(3) basis: three 2-form matrices."""
        E = E_matrices()
        out = []
        for t in range(3):
            rows = [[Scalar(0) for _ in range(N)] for _ in range(N)]
            for k in range(N):
                for l in range(N):
                    acc = Scalar(0)
                    for i in range(N):
                        for j in range(N):
                            acc = acc + E[t][i][j] * self.x[i][j][k][l]
                    rows[k][l] = acc * scalar(Fraction(1, 10))
            out.append(Tensor2(rows))
        return out

    def so3_violation(self):
        """Residual of the (ij) slot outside Span(E_1, E_2, E_3)."""
        E = E_matrices()
        worst = 0.0
        for k in range(N):
            for l in range(N):
                M = Tensor2([[self.x[i][j][k][l] for j in range(N)]
                             for i in range(N)])
                inside = Tensor2.zero()
                for t in range(3):
                    coef = M.inner(Tensor2(E[t])) * scalar(Fraction(1, 10))
                    inside = inside + Tensor2(E[t]).scale(coef)
                worst = max(worst, (M - inside).max_mag())
        return worst

    def total_antisym_dual(self):
        """The totally antisymmetric part, star-dualized to a covector."""
        out = [Scalar(0)] * N
        for q in QUADS:
            acc = Scalar(0)
            for p in permutations(range(4)):
                idx = tuple(q[t] for t in p)
                acc = acc + scalar(_perm_sign(p)) * \
                    self.x[idx[0]][idx[1]][idx[2]][idx[3]]
            a = acc * scalar(Fraction(1, 24))
            m = next(t for t in range(N) if t not in q)
            out[m] = scalar(_perm_sign(q + (m,))) * a
        return out

    def norm_sq(self):
        acc = Scalar(0)
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    for l in range(N):
                        acc = acc + self.x[i][j][k][l] * self.x[i][j][k][l]
        return acc

    @property
    def is_exact(self):
        return all(self.x[i][j][k][l].is_exact
                   for i in range(N) for j in range(N)
                   for k in range(N) for l in range(N))

    def is_zero(self, tol=None):
        return all(self.x[i][j][k][l].is_zero(tol)
                   for i in range(N) for j in range(N)
                   for k in range(N) for l in range(N))

    def max_mag(self):
        return max(abs(float(self.x[i][j][k][l]))
                   for i in range(N) for j in range(N)
                   for k in range(N) for l in range(N))


# -- the hat operator and the five-fold splitting of two-tensors -----------


def upsilon_hat(W: Tensor2) -> Tensor2:
    """W_ik -> 4 Y_ijm Y_klm W_jl."""
    by_m = _upsilon_by_last()
    rows = [[Scalar(0) for _ in range(N)] for _ in range(N)]
    four = scalar(4)
    for m in range(N):
        entries = by_m[m]
        for i, j, v1 in entries:
            for k, l, v2 in entries:
                w = W.m[j][l]
                if not w.is_zero():
                    rows[i][k] = rows[i][k] + four * v1 * v2 * w
    return Tensor2(rows)


def upsilon_grave(S: Tensor2):
    """Contraction v_i = Y_ijk S_jk for symmetric S."""
    for i in range(N):
        for j in range(i + 1, N):
            if not (S.m[i][j] - S.m[j][i]).is_zero():
                raise ValueError("grave operator needs a symmetric input")
    d = _dense_upsilon()
    out = [Scalar(0)] * N
    for i in range(N):
        acc = Scalar(0)
        for j in range(N):
            for k in range(N):
                v = d[i][j][k]
                if not v.is_zero():
                    acc = acc + v * S.m[j][k]
        out[i] = acc
    return out


def upsilon_bar(v) -> Tensor2:
    """The symmetric matrix of contraction against a vector."""
    return Tensor2(standard_upsilon().matrix_of([scalar(c) for c in v]))


def upsilon_check(S: Tensor2) -> Tensor2:
    """4 * bar(grave(S)); vanishes except on the 5-dim symmetric summand."""
    return upsilon_bar(upsilon_grave(S)).scale(4)


def decompose_t2(W: Tensor2):
    """Split a two-tensor into the five irreducible summands.

    Returns {"c1", "c3", "c7", "c5", "c9"}; the parts sum to W and are
    eigenvectors of the hat operator with eigenvalues 14, 7, -8, -3, 4.
    """
    E = E_matrices()
    A = W.alt()
    S = W.sym()
    tenth = scalar(Fraction(1, 10))
    c3 = Tensor2.zero()
    for t in range(3):
        Emat = Tensor2(E[t])
        c3 = c3 + Emat.scale(A.inner(Emat) * tenth)
    c7 = A - c3
    fifth = scalar(Fraction(1, 5))
    c1 = Tensor2.metric().scale(S.trace() * fifth)
    S0 = S - c1
    c5 = upsilon_check(S0).scale(Fraction(1, 14))
    c9 = S0 - c5
    return {"c1": c1, "c3": c3, "c7": c7, "c5": c5, "c9": c9}


@lru_cache(maxsize=1)
def projector_matrices():
    """The five projectors as exact 25x25 matrices (row-major on (i,k))."""
    cols = {name: [[Scalar(0) for _ in range(25)] for _ in range(25)]
            for name in COMPONENT_DIMS}
    for j in range(N):
        for l in range(N):
            parts = decompose_t2(Tensor2.basis(j, l))
            col = 5 * j + l
            for name, part in parts.items():
                for i in range(N):
                    for k in range(N):
                        cols[name][5 * i + k][col] = part.m[i][k]
    return cols


# -- the prime operator on connection tensors ------------------------------


def upsilon_prime(xi: ConnTensor):
    """Totally symmetric 4-tensor built from a connection tensor.

    For each sorted key (i <= j <= k <= l) the value is the sum over the
    twelve ordered position pairs (a, b) of xi_mab Y_cdm, where (c, d) are
    the remaining two indices; keys map to Scalar values (all 70 present).
    """
    third = _upsilon_third()
    out = {}
    for key in SYM4_KEYS:
        acc = Scalar(0)
        for p in range(4):
            for q in range(4):
                if p == q:
                    continue
                a, b = key[p], key[q]
                rest = [key[r] for r in range(4) if r != p and r != q]
                c, d = rest
                for m, v in third[c][d]:
                    xv = xi.x[m][a][b]
                    if not xv.is_zero():
                        acc = acc + xv * v
        out[key] = acc
    return out


def sym4_max_mag(d):
    return max(abs(float(v)) for v in d.values())


def sym4_is_zero(d, tol=None):
    return all(v.is_zero(tol) for v in d.values())


@lru_cache(maxsize=1)
def upsilon_prime_matrix():
    """The prime operator as an exact 70x50 matrix."""
    rows = [[Scalar(0) for _ in range(50)] for _ in range(70)]
    for col in range(50):
        unit = [Scalar(0)] * 50
        unit[col] = Scalar(1)
        img = upsilon_prime(ConnTensor.from_vector(unit))
        for r, key in enumerate(SYM4_KEYS):
            rows[r][col] = img[key]
    return rows


@lru_cache(maxsize=1)
def kernel_basis():
    """25 connection tensors: E_I (x) e_k (15) then unit 3-forms (10)."""
    out = []
    E = E_matrices()
    for t in range(3):
        for k in range(N):
            w = [Scalar(1 if c == k else 0) for c in range(N)]
            out.append(ConnTensor.from_so3(E[t], w))
    for a, b, c in TRIPLES:
        x = [[[Scalar(0) for _ in range(N)] for _ in range(N)]
             for _ in range(N)]
        for p in permutations((a, b, c)):
            x[p[0]][p[1]][p[2]] = scalar(_perm_sign_of(p, (a, b, c)))
        t3 = ConnTensor.__new__(ConnTensor)
        t3.x = x
        out.append(t3)
    return out


@lru_cache(maxsize=1)
def _split_setup():
    basis = kernel_basis()
    vecs = [b.to_vector() for b in basis]
    gram = [[dot(vi, vj) for vj in vecs] for vi in vecs]
    k = len(gram)
    zero, one = scalar(0), scalar(1)
    aug = [row[:] + [one if i == j else zero for j in range(k)]
           for i, row in enumerate(gram)]
    red, pivots = rref(aug)
    if pivots != list(range(k)):
        raise RuntimeError("projection Gram matrix is singular")
    inv = [row[k:] for row in red]
    return basis, vecs, inv


def split_connection(xi: ConnTensor):
    """Split xi into group-valued part + skew torsion + remainder.

    gamma_ijk = c^I_k (E_I)_ij and torsion is totally antisymmetric; the
    remainder is the Euclidean-orthogonal complement of the projection onto
    the 25-dimensional kernel of the prime operator, so it vanishes exactly
    when xi lies in that kernel.
    """
    basis, vecs, inv = _split_setup()
    v = xi.to_vector()
    rhs = [dot(b, v) for b in vecs]
    coeffs = [dot(row, rhs) for row in inv]
    gamma = ConnTensor.zero()
    for t in range(15):
        if not coeffs[t].is_zero():
            gamma = gamma + basis[t].scale(coeffs[t])
    torsion = ConnTensor.zero()
    for t in range(10):
        if not coeffs[15 + t].is_zero():
            torsion = torsion + basis[15 + t].scale(coeffs[15 + t])
    remainder = xi - gamma - torsion
    gamma_coeffs = [[coeffs[5 * t + k] for k in range(N)] for t in range(3)]
    torsion_coeffs = {TRIPLES[t]: coeffs[15 + t] for t in range(10)}
    return {
        "gamma": gamma,
        "torsion": torsion,
        "remainder": remainder,
        "gamma_coeffs": gamma_coeffs,
        "torsion_coeffs": torsion_coeffs,
    }


# -- torsion and curvature classification ----------------------------------


def torsion_type(T: Form):
    """Split a base 3-form, via its star dual, into the two skew classes."""
    if T.degree != 3 or T.has_fiber_legs():
        raise ValueError("need a base 3-form")
    W = Tensor2.from_form(hodge_star(T))
    parts = decompose_t2(W)
    model = T.model
    return {
        "t3": parts["c3"].to_form(model),
        "t7": parts["c7"].to_form(model),
    }


def decompose_curvature(K: CurvTensor, tol=None):
    """Six-component splitting of a curvature tensor.

    c1 is the Ricci trace, c3/c7 the antisymmetric Ricci parts, c5/c9 the
    traceless symmetric Ricci parts, c15 the star-dual of the totally
    antisymmetric part. A component is present when its norm exceeds
    tol * |K| (exact inputs use exact zero tests).
    """
    from .scalar import get_tol
    if tol is None:
        tol = get_tol()
    k = K.ricci()
    c1 = k.trace()
    parts = decompose_t2(k)
    c15 = K.total_antisym_dual()
    comps = {
        "c1": c1,
        "c3": parts["c3"],
        "c7": parts["c7"],
        "c5": parts["c5"],
        "c9": parts["c9"],
        "c15": c15,
    }
    norms_sq = {
        "c1": c1 * c1,
        "c3": parts["c3"].norm_sq(),
        "c7": parts["c7"].norm_sq(),
        "c5": parts["c5"].norm_sq(),
        "c9": parts["c9"].norm_sq(),
        "c15": sum((v * v for v in c15), Scalar(0)),
    }
    total = float(K.norm_sq()) ** 0.5
    present = {}
    norms = {}
    for name, nsq in norms_sq.items():
        norms[name] = float(nsq) ** 0.5
        if K.is_exact:
            present[name] = not nsq.is_zero()
        else:
            present[name] = norms[name] > tol * max(total, 1.0)
    comps["present"] = present
    comps["norms"] = norms
    return comps


# -- invariant 2-forms and pairings ----------------------------------------


def kappa_forms(model):
    """The three invariant 2-forms matching the so(3) basis matrices."""
    out = []
    for E in E_matrices():
        terms = [((i + 1, j + 1), E[i][j]) for i, j in PAIRS]
        out.append(Form(model, 2, terms))
    return out


def product_37(F: Tensor2, G: Tensor2):
    """The indefinite pairing on 2-forms: half the inner of hat(F) with G."""
    return upsilon_hat(F).inner(G) * scalar(Fraction(1, 2))


def killing_product(F: Tensor2, G: Tensor2):
    """Negative-definite pairing matching the Lie-algebra trace form."""
    return F.inner(G) * scalar(-3)
