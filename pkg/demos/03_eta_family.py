# The eta-family of Dirac operators interpolates between two modular
# weightings.  Its Hill equation has a zeroth-order term proportional to
# n (ln d_n)'; dropping the factor n breaks agreement on levels |n| >= 2.

from dirac_torus import GOLDEN, CircleLift, hill_compare, make_diffeo

f = make_diffeo(CircleLift.sine(0.3), GOLDEN)

print("eta  n   corrected gap   without factor n")
for eta in (0.0, 0.5, 1.0):
    for n in (1, 2, 3):
        good = max(r.rel_gap for r in hill_compare(f, n, eta, 64, count=10))
        bad = max(r.rel_gap for r in hill_compare(f, n, eta, 64, count=10, printed_coefficient=True))
        print(f"{eta:<4} {n}   {good:.2e}        {bad:.2e}")
print("\nAt n = 1 the two forms coincide; at eta = 0 the term vanishes altogether.")
