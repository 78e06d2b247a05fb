#!/usr/bin/env python3
"""Tour of the canonical ternary form.

Walks through the defining identities, the cubic-as-determinant link,
the three-dimensional stabilizer, and frame adaptation: a random
rotation of the canonical tensor is carried back to the standard
matrix table.
"""

import random
from fractions import Fraction

import numpy as np

from so3five.scalar import Scalar, scalar, sqrt3
from so3five.upsilon import (
    E_matrices,
    adapt_frame,
    sigma_embed,
    stabilizer,
    standard_upsilon,
    verify_so3_structure,
)

y = standard_upsilon()
rep = verify_so3_structure(y)
print("canonical tensor:")
print("  symmetric        %s" % rep["symmetric"])
print("  traceless        %s" % rep["traceless"])
print("  cubic identity   %s" % rep["cubic_identity"])
print("  max residual     %g  (exact arithmetic, so exactly zero)" %
      rep["max_residual"])

# the cubic form evaluates as a determinant of the traceless symmetric
# 3x3 embedding, up to the fixed factor 3*sqrt(3)/2
rng = random.Random(5)
a = [Scalar.exact(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
     for _ in range(5)]
S = sigma_embed(a)
det = (S[0][0] * (S[1][1] * S[2][2] - S[1][2] * S[2][1])
       - S[0][1] * (S[1][0] * S[2][2] - S[1][2] * S[2][0])
       + S[0][2] * (S[1][0] * S[2][1] - S[1][1] * S[2][0]))
factor = scalar(3) * sqrt3() * scalar(Fraction(1, 2))
print("\ncubic vs determinant at a random rational point:")
print("  cubic(a)             = %s" % y.cubic(a).to_string())
print("  (3 sqrt3 / 2) det S  = %s" % (factor * det).to_string())

stab = stabilizer(y)
E1, E2, E3 = E_matrices()
print("\nstabilizer: %d independent antisymmetric matrices" % len(stab))
print("  commutators of the canonical basis: [E1,E2]=E3, [E2,E3]=E1, "
      "[E3,E1]=E2")

# rotate the tensor by a random special-orthogonal matrix and adapt
gen = np.random.default_rng(17)
A = gen.normal(size=(5, 5))
Q, R = np.linalg.qr(A)
Q = Q @ np.diag(np.sign(np.diag(R)))
if np.linalg.det(Q) < 0:
    Q[:, 0] = -Q[:, 0]
rotated = y.transform([list(map(float, Q[i])) for i in range(5)])
out = adapt_frame(rotated, seed=0)
print("\nframe adaptation after a random rotation:")
print("  residual against the canonical table: %.3e" % out["max_residual"])
print("  recovered (4,5,5) coefficient: %.12f  (target sqrt3/2 = %.12f)"
      % (float(out["transformed"].coeff(4, 5, 5)), float(sqrt3()) / 2))
print("  attempts used: %d" % out["attempts"])
