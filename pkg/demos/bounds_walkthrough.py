"""Walk through the rate-region bounds on a two-subchannel channel.

Subchannel 1 erases each destination's copy independently with probability
1/2; subchannel 2 delivers to both or neither with erasure 9/10. The outer
bound intersects the degraded-channel regions over all per-subchannel
destination orderings; the inner bound adds the per-subchannel capacity
regions. Their sum-rate gap is what cross-subchannel coding closes.
"""

from fractions import Fraction as F

from pecbounds import (outer_bound_systems, outer_max_weighted, outer_membership,
                       sum_rate_gap, timesharing_functional, timesharing_lp_value,
                       two_subchannel_channel)

channel = two_subchannel_channel(F(1, 2), F(9, 10))

print("== constraint systems (one per distinct ordering tuple) ==")
for idx, system in enumerate(outer_bound_systems(channel)):
    print(f"system {idx}:")
    for row in system.rows:
        terms = " + ".join(f"({c})*{v}" for v, c in sorted(row.coeffs.items()))
        print(f"  {terms} {row.rel} {row.rhs}")

print("\n== sum-rate bounds ==")
gap = sum_rate_gap(channel)
print(f"outer sum: {gap.outer}  (witness {gap.outer_rates})")
print(f"inner sum: {gap.inner}")
print(f"gap:       {gap.gap}")

print("\n== weighted objectives ==")
for mu in ([1, 0], [0, 1], [2, 1], [-1, 1]):
    result = outer_max_weighted(channel, mu)
    print(f"mu={mu}: outer optimum {result.value} at {result.rates}")

print("\n== membership along the symmetric ray ==")
for t in (F(1, 2), F(9, 10), 1, F(101, 100)):
    point = [t * F(9, 25), t * F(9, 25)]
    print(f"t={t}: R={point} member={outer_membership(channel, point)}")

print("\n== time sharing never beats the outer bound ==")
for mu in ([1, 1], [3, 1]):
    ts = timesharing_functional(channel, mu)
    assert ts == timesharing_lp_value(channel, mu)
    outer = outer_max_weighted(channel, mu).value
    print(f"mu={mu}: time-sharing {ts} vs outer {outer}")
