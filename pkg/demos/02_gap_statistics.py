"""
Small gaps between zeros, small distances to the line
=====================================================

Compute all zeros of zeta and zeta' with 1000 < t <= 2000 and compare the
empirical counting functions m(eps) and m'(eps) with their predicted power laws.
Takes about ten seconds.
"""

import math

import numpy as np

from zetagaps import statistics as st
from zetagaps.zeros import find_zeta_zeros, mean_gap, ordinates
from zetagaps.zprime import find_zprime_zeros

T = 1000.0
guard = 110 * mean_gap(T)
g = ordinates(find_zeta_zeros(T - guard, 2 * T + guard))
zp = find_zprime_zeros(T, 2 * T)
print(f"{np.sum(st.window_mask(g, T))} zeros of zeta and {len(zp)} of zeta' in (T, 2T]")

grid = st.epsilon_grid(0.05, 32, 40)
m = st.empirical_m(g, T, grid)
mp = st.empirical_m_prime(zp, T, grid, population=m.population)

print("\n   eps      m(eps)    m'(eps)")
for e, a, b in zip(grid[::4], m.values[::4], mp.values[::4]):
    print(f"{e:7.3f}   {a:8.4f}   {b:8.4f}")

# the predictions are power laws, eps^3 for m and eps^1.5 for m'; at this
# height only the exponents are meaningful, fitted over the first decade with data
for name, c, target in (("m", m, 3.0), ("m'", mp, 1.5)):
    lo, hi = st.default_fit_range(c)
    k, r2 = st.scaling_fit(c, (lo, hi))
    print(f"{name:2s} exponent {k:.2f} (predicted {target}) on [{lo:.2f}, {hi:.2f}], r^2 {r2:.3f}")

# pair correlation: the zeros repel, as GUE eigenvalues do. Differences are in
# units of 2 pi / log T, so far from zero the observed density levels off near
# log(T / 2 pi) / log T rather than 1.
print(f"\nlevel for large u: {math.log(T / (2 * math.pi)) / math.log(T):.3f}")
h = st.pair_correlation(g, T, 2.0, 8)
print("  u range      observed  GUE")
for a, b, d, x in zip(h.bin_edges[:-1], h.bin_edges[1:], h.density, h.expected_density):
    print(f"[{a:.2f}, {b:.2f})   {d:7.3f}  {x:6.3f}")
