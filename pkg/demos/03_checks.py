"""
Checking inequalities on real data
==================================

Each check returns a report with the number of cases examined, the number of
violations and the worst margin. A corrupted input shows what a failure looks like.
"""

import dataclasses
import math

import numpy as np

from zetagaps import verify as vf
from zetagaps.dirichlet import FejerParams, explicit_formula_sides
from zetagaps.zeros import find_zeta_zeros, mean_gap, ordinates
from zetagaps.zprime import find_zprime_zeros, pair_all

T = 1000.0
guard = 110 * mean_gap(T)
zeros = find_zeta_zeros(T - guard, 2 * T + guard)
g = ordinates(zeros)
zp = find_zprime_zeros(T, 2 * T)
pairs = pair_all(zp, zeros, T)

reports = [
    vf.verify_lemma7(zp, g, T),
    vf.verify_lemma10(g, zp, T, 1.0),
    vf.verify_lemma11(pairs),
    vf.check_prop2_envelope(pairs, 1.0),
    vf.verify_lemma6(zp, g, doubling=True),
]
for r in reports:
    print(f"{r.lemma_id.value:4s} checked {r.checked:5d}  violations {r.violations}  worst margin {r.worst_margin:+.4f}")

# push one zero of zeta' too far from the line and watch the check catch it
p = pairs[0]
moved = dataclasses.replace(p.zprime, beta_prime=0.5 + 10 * p.dist**2 * math.log(p.zprime.gamma_prime))
bad = vf.verify_lemma11(pairs[1:] + [dataclasses.replace(p, zprime=moved)])
print(f"\ncorrupted input: {bad.violations} violation at gamma' = {bad.witness['gamma_prime']:.4f}")

# the explicit formula: a sum over zeros against a sum over prime powers
for t in (1234.5, 1777.0):
    s = explicit_formula_sides(t, FejerParams(2.0), g)
    print(f"t = {t}: zeros {s.zero_side:.6f}, primes + gamma {s.arithmetic_side:.6f}, "
          f"allowed {s.truncation_bound:.1e}")

ts = np.random.default_rng(1).uniform(T, 2 * T, 20)
r = vf.explicit_formula_report(g, ts)
print(f"{r.checked} evaluations, largest residual {r.details['max_weil_residual']:.1e}")
