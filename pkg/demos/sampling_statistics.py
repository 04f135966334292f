"""Check reception sampling against exact joint non-reception probabilities.

Each erasure model kind (independent, identical, joint table, nested chain)
is sampled for 100000 slots; empirical miss frequencies for every
destination subset are compared with the exact values.
"""

import math
from fractions import Fraction as F

from pecbounds import ErasureModel, MultiInputPEC, trial_rng

channel = MultiInputPEC(3, [
    ErasureModel.independent([F(1, 5), F(1, 2), F(7, 10)]),
    ErasureModel.identical(F(2, 5), 3),
    ErasureModel.joint({"": F(1, 5), "1": F(3, 10), "2,3": F(1, 10),
                        "1,2,3": F(2, 5)}, 3),
    ErasureModel.nested([F(1, 10), F(2, 5), F(4, 5)]),
])

N = 100_000
block = channel.sample_slots(trial_rng(2718), N)

print(f"{'subchannel':>10} {'subset':>8} {'exact':>10} {'empirical':>10} {'sigmas':>7}")
for i in range(1, channel.m + 1):
    for mask in range(1, 1 << channel.k):
        subset = [j + 1 for j in range(channel.k) if mask >> j & 1]
        exact = channel.joint_non_reception(i, subset)
        p = float(exact)
        freq = (~block[:, i - 1, [j - 1 for j in subset]]).all(axis=1).mean()
        se = math.sqrt(p * (1 - p) / N)
        sigmas = abs(freq - p) / se if se else 0.0
        print(f"{i:>10} {str(subset):>8} {p:>10.5f} {freq:>10.5f} {sigmas:>7.2f}")

print("\nsame seed, same draw:",
      (channel.sample_slots(trial_rng(2718), 100)
       == channel.sample_slots(trial_rng(2718), 100)).all())
