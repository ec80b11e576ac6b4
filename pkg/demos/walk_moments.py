"""One-step-memory walks: exact moments against simulation.

The walk repeats its previous step with probability p and flips otherwise,
with deterministic step lengths a_k.  Everything below is exact arithmetic
on one side and a seeded simulation on the other.
"""
import numpy as np

from fractalwalk import (
    WalkParams,
    WeightSequence,
    exact_second_moment,
    second_moment_profile,
    simulate,
    variance_ratio_bound,
)

CONST = WeightSequence.constant()

# exact E[S_n^2] vs the average over 4000 seeded paths
params = WalkParams(p=0.75, weights=CONST, horizon=200)
paths = np.array([simulate(params, seed=0, stream_id=i).sums[-1] for i in range(4000)])
exact = exact_second_moment(0.75, CONST, 0, 200)
print(f"E[S_200^2] exact {exact:.3f}, empirical {np.mean(paths**2):.3f}"
      f" (se {np.std(paths**2, ddof=1)/np.sqrt(4000):.3f})")

# the variance sandwich: A_n/K <= s_n^2 <= K A_n with K = max(p,1-p)/min(p,1-p)
for p in (0.6, 0.75, 0.9):
    k = variance_ratio_bound(p)
    prof = second_moment_profile(p, CONST, 1000)
    a_n = np.arange(1, 1001, dtype=float)
    assert np.all(prof >= a_n / k - 1e-9) and np.all(prof <= k * a_n + 1e-9)
    print(f"p={p}: K={k:.2f}, s_n^2/A_n ranges"
          f" [{(prof/a_n).min():.3f}, {(prof/a_n).max():.3f}]")

# sparse steps (1,0,1,0,...): variance per active step approaches 5/3 at p=0.75
odd = WeightSequence.odd_indicator()
prof = second_moment_profile(0.75, odd, 10_000)
for n in (10, 100, 1000, 10_000):
    m = (n + 1) // 2
    print(f"n={n:>6}: s_n^2/ceil(n/2) = {prof[n-1]/m:.6f}   (limit 5/3 = {5/3:.6f})")
