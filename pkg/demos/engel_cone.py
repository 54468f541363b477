# Engel cone C = {a x2^3 + 2 x4 <= 0} with a = 1/2: exact fields, the vertical derivative
# Z = Ad_exp(X1) X2, and how |Z 1_C| compares with the perimeter on small boxes.
from fractions import Fraction

import numpy as np

from carnot import preset
from carnot.algebra import adjoint_exp
from carnot.fields import apply_field, cone, realize_left_invariant
from carnot.measure import PERIMETER, density_scan

a = preset("engel")
C = cone(a)
print("P =", C.P)

for j in range(4):
    print(f"X{j + 1} =", realize_left_invariant(a, a.basis(j)))

Z = adjoint_exp(a, a.basis(0), a.basis(1))
print("Z =", Z)
print("ZP =", apply_field(realize_left_invariant(a, Z), C.P))

# at the identity ZP = 1 > 0 while the horizontal gradient vanishes, so the
# Z-variation dominates the perimeter as the box shrinks
radii = [2.0**-k for k in range(7)]
scan = density_scan(C, {"Z": Z, "D": PERIMETER}, radii)
Zr = np.array([row.estimate for row in scan["reports"]["Z"].rows])
Dr = np.array([row.estimate for row in scan["reports"]["D"].rows])
r = np.array(radii)

print("\n    r        |Z1_C|/r^4     |D1_C|/r^6     ratio")
for ri, z, d in zip(r, Zr, Dr):
    print(f"{ri:9.6f}  {z / ri**4:13.6f}  {d / ri**6:13.6f}  {z / d:12.4e}")
print("ratio log2 slopes:", [round(s, 4) for s in scan["ratios"]["Z/D"]["slopes"] if s is not None])
print("expected perimeter constant:", Fraction(10, 3))
