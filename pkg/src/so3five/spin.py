"""Spinor side of the structure group.

The even Clifford algebra of a 5-dimensional Euclidean space acts on C^4.
This module carries the five generator matrices, the lifted so(3) basis
acting on spinors, the double-cover map from antisymmetric 5x5 matrices,
and the integrability obstruction for covariantly constant spinors.  All
entries live in Q(sqrt 3) + i Q(sqrt 3), so every identity here is exact.
"""

from __future__ import annotations

from functools import lru_cache

from .connection import characteristic_connection, curvature
from .exterior import CoframeModel
from .scalar import CScalar, Scalar, cscalar, scalar, sqrt3

HALF = Scalar(1) / 2
PAIRS = [(i, j) for i in range(5) for j in range(i + 1, 5)]


# -- small dense 4x4 complex matrices ---------------------------------------


def zero4():
    return [[CScalar(0) for _ in range(4)] for _ in range(4)]


def identity4():
    return [[CScalar(1 if i == j else 0) for j in range(4)] for i in range(4)]


def mat_add(A, B):
    return [[A[i][j] + B[i][j] for j in range(4)] for i in range(4)]


def mat_sub(A, B):
    return [[A[i][j] - B[i][j] for j in range(4)] for i in range(4)]


def mat_scale(A, s):
    s = cscalar(s)
    return [[A[i][j] * s for j in range(4)] for i in range(4)]


def mat_mul(A, B):
    out = zero4()
    for i in range(4):
        for k in range(4):
            a = A[i][k]
            if a.is_zero():
                continue
            for j in range(4):
                out[i][j] = out[i][j] + a * B[k][j]
    return out


def commutator4(A, B):
    return mat_sub(mat_mul(A, B), mat_mul(B, A))


def mat_is_zero(A, tol: float | None = None) -> bool:
    return all(A[i][j].is_zero(tol) for i in range(4) for j in range(4))


def mat_max_mag(A) -> float:
    return max(A[i][j].mag() for i in range(4) for j in range(4))


def det4(A) -> CScalar:
    """Cofactor expansion along the first row."""

    def det3(M):
        return (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
                - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
                + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))

    total = CScalar(0)
    sign = 1
    for col in range(4):
        minor = [[A[i][j] for j in range(4) if j != col] for i in range(1, 4)]
        total = total + scalar(sign) * A[0][col] * det3(minor)
        sign = -sign
    return total


# -- the Clifford generators and the spinor so(3) basis ---------------------


class CliffordRep:
    """Five mutually anticommuting square roots of the identity on C^4."""

    __slots__ = ("e",)

    def __init__(self, matrices):
        self.e = tuple(matrices)

    def matrix(self, i: int):
        """1-based generator access."""
        return self.e[i - 1]

    def product(self, i: int, j: int):
        return mat_mul(self.matrix(i), self.matrix(j))


class SpinBasis:
    """The so(3) basis acting on spinors, lifted from the 5-dim one."""

    __slots__ = ("E",)

    def __init__(self, matrices):
        self.E = tuple(matrices)

    def matrix(self, i: int):
        return self.E[i - 1]


@lru_cache(maxsize=1)
def clifford_basis() -> CliffordRep:
    def C(rows):
        return [[cscalar(x) for x in row] for row in rows]

    i = CScalar(0, 1)
    e1 = C([[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]])
    e2 = C([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    e3 = C([[0, 0, -i, 0], [0, 0, 0, i], [i, 0, 0, 0], [0, -i, 0, 0]])
    e4 = C([[0, -i, 0, 0], [i, 0, 0, 0], [0, 0, 0, -i], [0, 0, i, 0]])
    e5 = C([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]])
    return CliffordRep((e1, e2, e3, e4, e5))


@lru_cache(maxsize=1)
def spin_basis() -> SpinBasis:
    cl = clifford_basis()
    s3 = sqrt3()
    E1 = mat_scale(mat_add(mat_scale(cl.product(1, 5), s3),
                           mat_add(cl.product(2, 3), cl.product(4, 5))),
                   HALF)
    E2 = mat_scale(mat_add(mat_scale(cl.product(1, 3), s3),
                           mat_add(cl.product(2, 5), cl.product(3, 4))),
                   HALF)
    E3 = mat_scale(mat_add(mat_scale(cl.product(2, 4), Scalar(2)),
                           cl.product(3, 5)),
                   HALF)
    return SpinBasis((E1, E2, E3))


def spin_lift(A):
    """Image of an antisymmetric 5x5 matrix under the double-cover map.

    The unit antisymmetric matrix with +1 in slot (i,j), i<j, goes to
    half the Clifford product e_i e_j; the map extends linearly and is a
    Lie algebra isomorphism onto its image.
    """
    cl = clifford_basis()
    out = zero4()
    for i, j in PAIRS:
        c = A[i][j]
        if isinstance(c, CScalar):
            if c.is_zero():
                continue
        elif c.is_zero():
            continue
        out = mat_add(out, mat_scale(cl.product(i + 1, j + 1), c * HALF))
    return out


def vector_bracket(A, B):
    """Commutator of two 5x5 matrices over Scalar entries."""
    n = len(A)
    prod1 = [[sum((A[i][k] * B[k][j] for k in range(n)), scalar(0))
              for j in range(n)] for i in range(n)]
    prod2 = [[sum((B[i][k] * A[k][j] for k in range(n)), scalar(0))
              for j in range(n)] for i in range(n)]
    return [[prod1[i][j] - prod2[i][j] for j in range(n)] for i in range(n)]


def f_matrix(i: int, j: int):
    """Antisymmetric unit matrix, 1-based indices, +1 in slot (i,j)."""
    out = [[scalar(0) for _ in range(5)] for _ in range(5)]
    out[i - 1][j - 1] = scalar(1)
    out[j - 1][i - 1] = scalar(-1)
    return out


# -- obstruction to covariantly constant spinors ----------------------------


def spinor_obstruction(model: CoframeModel, tol: float | None = None):
    """Integrability data for the constant-spinor equation.

    A spinor field annihilated by d + gamma^I bold-E_I exists only when
    every coefficient matrix W_ij = r^I_ij bold-E_I kills it; the
    determinant of each W_ij equals (9/16) (sum_I (r^I_ij)^2)^2, so any
    nonzero curvature coefficient rules the solution out.  The flat case
    leaves the full 4-dimensional space of constant spinors.
    """
    gamma, _T = characteristic_connection(model, tol)
    r_forms, _K = curvature(model, gamma)
    basis = spin_basis()
    nine_sixteen = scalar(9) / 16
    entries = []
    flat = True
    max_residual = 0.0
    for i, j in PAIRS:
        coeffs = [r.coeff((i + 1, j + 1)) for r in r_forms]
        if not all(c.is_zero(tol) for c in coeffs):
            flat = False
        W = zero4()
        for c, E in zip(coeffs, basis.E):
            if not c.is_zero():
                W = mat_add(W, mat_scale(E, c))
        d = det4(W)
        square_sum = sum((c * c for c in coeffs), scalar(0))
        predicted = nine_sixteen * square_sum * square_sum
        residual = (d - cscalar(predicted)).mag()
        max_residual = max(max_residual, residual)
        entries.append({
            "pair": (i + 1, j + 1),
            "coefficients": coeffs,
            "matrix": W,
            "det": d,
            "det_predicted": predicted,
        })
    return {
        "W": entries,
        "flat": flat,
        "solution_dim": 4 if flat else 0,
        "det_residual": max_residual,
    }
