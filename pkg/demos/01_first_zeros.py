"""
The first zeros of zeta and zeta'
=================================

Walk up the critical line, find the sign changes of Hardy's Z, then look to the
right of the line for the zeros of zeta' and pair each with its nearest
critical-line zero.
"""

import numpy as np

from zetagaps.zeros import count_zeros, find_zeta_zeros, ordinates
from zetagaps.zeta_eval import hardy_Z_many, zeta
from zetagaps.zprime import find_zprime_zeros, pair_all

# Z(t) is real on the line and changes sign at every simple zero
t = np.linspace(10, 40, 13)
for a, b in zip(t, hardy_Z_many(t)):
    print(f"Z({a:5.1f}) = {b:+.6f}")

zeros = find_zeta_zeros(10.0, 100.0)
g = ordinates(zeros)
print(f"\n{len(g)} zeros on (10, 100], N(100) = {count_zeros(100.0)}")
print("first five:", ", ".join(f"{x:.9f}" for x in g[:5]))

# the value at a computed zero is tiny, and the error bound says how tiny it must be
r = zeta(complex(0.5, g[0]))
print(f"|zeta(1/2 + i g1)| = {abs(r.value):.2e} (bound {r.abs_error_bound:.1e})")

# zeta' has no zeros below height 20; the first one sits far to the right
zp = find_zprime_zeros(10.0, 60.0)
for z in zp:
    print(f"zeta' zero  {z.beta_prime:.6f} + {z.gamma_prime:.6f} i   residual {z.newton_residual:.1e}")

# each one has a nearest zero of zeta on the line
for p in pair_all(zp, zeros):
    print(f"  gamma' {p.zprime.gamma_prime:8.4f} -> gamma_c {p.rho_c_gamma:8.4f}, distance {p.dist:.4f}")
