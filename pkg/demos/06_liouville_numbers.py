"""Finite diagnostics separating golden-type from Liouville-type rotation numbers."""

from dirac_torus.liouville import ContinuedFraction, irrationality_exponent_estimate, liouville_report

golden = ContinuedFraction.golden(30)
tower = ContinuedFraction.liouville_type(6)
print("tower partial quotients:", tower.partial_quotients[:5], "...")

for name, cf in (("golden", golden), ("tower", tower)):
    print(f"\n{name}: exponent estimates", [round(x, 3) for x in irrationality_exponent_estimate(cf)[:6]])
    for row in liouville_report(cf, [2, 3, 4])[:12]:
        print(f"  k={row.k:<2} q={row.q:<22} N={row.N}  |a - p/q| < q^-N: {row.satisfies_L}")
