# Vertical halfspaces in Engel: classification from invariant directions,
# and blow-ups of the cone at the identity and at a smooth boundary point.
from fractions import Fraction

from carnot import preset
from carnot.blowup import tangent_limit
from carnot.fields import cone, halfspace, pab
from carnot.group import identity, point
from carnot.span import classify_vertical_halfspace

a = preset("engel")

for label, E in [("3 x1 - 2 x2 <= 1/2", halfspace(a, Fraction(1, 2), [3, -2])), ("pab:1,0", pab(a, 1, 0))]:
    res = classify_vertical_halfspace(a, E)
    print(f"{label:20s} -> {res.diagnosis}")
    if res.halfspace is not None:
        print("    direction", res.halfspace.direction, "offset", res.halfspace.offset)

C = cone(a)
for x in (identity(a), point(a, [0, 1, 0, Fraction(-1, 4)])):
    t = tangent_limit(C, x)
    print(f"\ntangent of C at {x}: order {t.order}, {t.classification}")
    print("    leading term:", t.leading)
    if t.halfspace is not None:
        print("    horizontal normal:", t.halfspace.nu_exact)
