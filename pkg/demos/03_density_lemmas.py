"""Finite-range evidence for the density lemmas, and where it runs out."""
import math

from cyclo.bounds import maier_constants
from cyclo.experiments import (
    estimate_maier_C,
    lemma31_density,
    lemma32_profile,
    lemma33_count,
    mertens_sum_check,
)

gamma = 2.5

# The set with many prime factors has density zero, but only eventually:
# log log x is still below 3 at x = 10^6, so the threshold barely moves.
print("omega(n) >= log log n / log gamma")
for e in range(3, 7):
    r = lemma31_density(10**e, gamma)
    print(f"  x = 10^{e}: count {r.count:>7}, density {r.density:.4f}")

# Constants for the large p_k counts: (b, eps) from the constrained grid search,
# C2 fitted so the exact counts at 10^6 sit on or below the bound.
params = maier_constants(gamma, empirical_x=10**6)
print(f"\nb = {params.b}, eps = {params.epsilon:.6f}, c0 = {params.c0:.6f}, C2 = {params.C2:.6f}")
for row in lemma32_profile(10**6, gamma, params):
    print(f"  k = {row.k}: {row.count} n with log p_k > gamma^-k log x, bound {row.bound:.0f}, ratio {row.ratio:.3f}")

r = lemma33_count(10**6, params)
print(f"k0 = {r.k0:.1f}: far past log log x / log gamma = {math.log(math.log(10**6)) / math.log(gamma):.2f},"
      f" so the tail count is {r.count} <= 2 eps x = {r.bound:.0f}")

# Two forms of the prime-power sum: the closed form of the left side is
# sum (2p - 1) log p / (p (p - 1)^2), which is not the right side.
m = mertens_sum_check(10**6)
print(f"\n2 sum log p / (p(p-1)) to 10^6: {m.right:.6f} (< 4: {m.below_four})")
print(f"sum_p sum_(nu>=2) nu log p / p^nu:  {m.left:.6f}, closed form {m.left_closed:.6f}")

c = estimate_maier_C(3000)
print(f"\nlog A(n) / sum 2^k log p_k peaks at n = {c.argmax} with {c.C:.5f} for n <= 3000")
