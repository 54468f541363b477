# First Heisenberg group: fields, the rloca set and Haar scaling.
from carnot import preset
from carnot.fields import apply_field, realize_left_invariant, rloca
from carnot.group import bch_product, dilate_group, group_inverse, point
from carnot.measure import haar_scaling_check

h = preset("heisenberg1")
for j in range(3):
    print(f"X{j + 1} =", realize_left_invariant(h, h.basis(j)))

x = point(h, [1, 2, 3])
y = point(h, [-1, 0, 5])
print("x*y =", bch_product(h, x, y))
print("x^-1 =", group_inverse(x))
print("delta_2 x =", dilate_group(2, x))

E = rloca(h)
print("\nP =", E.P)
for j in range(2):
    print(f"X{j + 1}P =", apply_field(realize_left_invariant(h, h.basis(j)), E.P))

chk = haar_scaling_check(h, 3, samples=200_000, seed=1)
print(f"\nvol(delta_3 B)/vol(B): MC {chk.mc_ratio:.2f} +- {chk.mc_stderr:.2f}, exact {chk.closed_form}")
