"""Heights of cyclotomic polynomials: where coefficients first leave {-1, 0, 1}."""
from cyclo import cyclotomic, height_A, height_A0
from cyclo.numtheory import rad

# Phi_6 = x^2 - x + 1; every Phi_n below 105 has all coefficients in {-1, 0, 1}.
print("Phi_6   =", cyclotomic(6))
print("Phi_12  =", cyclotomic(12))
first = next(n for n in range(1, 1000) if height_A(n) > 1)
print("first n with A(n) > 1:", first)

f = cyclotomic(105)
print("Phi_105 has degree", f.degree, "and the coefficient 2 sits at x^%d" % f.coeffs.index(-2 if -2 in f.coeffs else 2))

# A(n) only depends on the squarefree kernel of n.
for n in (210, 420, 11025, 2 * 3 * 5 * 7 * 11):
    print(f"A({n}) = {height_A(n)}   A(rad {n} = {rad(n)}) = {height_A(rad(n))}")

# Record heights over squarefree products of odd primes.
records, best = [], 1
for n in range(1, 20001, 2):
    if rad(n) == n and height_A(n) > best:
        best = height_A(n)
        records.append((n, best))
print("height records among odd squarefree n <= 20000:")
for n, h in records:
    print(f"  A({n}) = {h}")

# A0(n) is the largest A(d) over d | n, with the smallest divisor attaining it.
print("A0(2310) =", height_A0(2310))
print("A(255255) =", height_A(255255))
