"""B(n): the tallest divisor of x^n - 1 can be far taller than any Phi_d."""
from cyclo import height_A, height_B
from cyclo.bounds import chain_bound
from cyclo.numtheory import tau
from cyclo.polynomial import poly_height
from cyclo.search import height_B_naive

# x^6 - 1 has 16 monic divisors; (x + 1)(x^2 + x + 1) = x^3 + 2x^2 + 2x + 1 is the tallest.
r = height_B(6)
print("B(6) =", r.b_value, "witness", r.witness, "->", r.witness_product)

# The Gray walk and the from-scratch oracle agree, witness included.
for n in (30, 60, 105):
    fast, slow = height_B(n), height_B_naive(n)
    print(f"B({n}) = {fast.b_value} via {fast.witness}; oracle {slow.b_value} via {slow.witness}")

print()
print(f"{'n':>5} {'tau':>4} {'A(n)':>5} {'B(n)':>7}  bound n^tau prod A(d)")
for n in (12, 24, 48, 60, 120, 180, 210, 240):
    b = height_B(n)
    first, _ = chain_bound(n)
    print(f"{n:>5} {tau(n):>4} "
          f"{height_A(n):>5} {b.b_value:>7}  {first:.3e}")

# Branch and bound skips subsets whose product cannot beat the running best.
p = height_B(60, prune=True)
print(f"\nB(60) with pruning: {p.b_value}, subsets examined {p.subsets_examined}, pruned {p.pruned}")
print("height of the witness product:", poly_height(p.witness_product))
