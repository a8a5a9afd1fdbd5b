import dataclasses
import math

import numpy as np
import pytest

from zetagaps.dirichlet import lorentz_sum
from zetagaps.errors import CoverageError
from zetagaps.verify import (
    P2_LOWER,
    THEOREM_BACKED,
    LemmaId,
    check_prop2_envelope,
    corollary3_report,
    explicit_formula_report,
    lemma6_residuals,
    prop2_ratios,
    verify_lemma6,
    verify_lemma7,
    verify_lemma10,
    verify_lemma11,
)
from zetagaps.zprime import PairingRecord, ZPrimeZero


def record(beta, gamma, gamma_c, log_T=None):
    zp = ZPrimeZero(beta, gamma, 0.0, 0)
    dist = math.hypot(beta - 0.5, gamma - gamma_c)
    return PairingRecord(zp, gamma_c, dist, 1.0, 1.0, 1.0, math.log(gamma) if log_T is None else log_T)


def test_theorem_backed_ids():
    assert set(THEOREM_BACKED) == {LemmaId.L7, LemmaId.L10, LemmaId.L11, LemmaId.P2}


# ---------------------------------------------------------------- Lemma 11


def test_lemma11_real(data_1e3):
    r = verify_lemma11(data_1e3.pairings)
    assert r.checked == len(data_1e3.pairings) and r.violations == 0 and r.worst_margin >= -1e-12


def test_lemma11_on_line():
    r = verify_lemma11([record(0.5, 1000.3, 1000.0)])
    assert r.worst_margin == pytest.approx(0.09)


def test_lemma11_corrupted(data_1e3):
    p = data_1e3.pairings[0]
    zp = dataclasses.replace(p.zprime, beta_prime=0.5 + 10 * p.dist**2 * math.log(p.zprime.gamma_prime))
    bad = dataclasses.replace(p, zprime=zp)
    r = verify_lemma11(data_1e3.pairings[1:] + [bad])
    assert r.violations == 1
    assert r.worst_margin < 0
    assert r.witness["gamma_prime"] == zp.gamma_prime


# ---------------------------------------------------------------- Lemma 7


def test_lemma7_real(data_1e3):
    r = verify_lemma7(data_1e3.zprimes, data_1e3.g, 1000.0)
    assert r.violations == 0 and r.checked > 800


def test_lemma7_duplicate_injection(data_1e3):
    limit = 0.5 + 1 / math.log(1000.0)
    z = next(z for z in data_1e3.zprimes if z.beta_prime < limit)
    twin = dataclasses.replace(z, gamma_prime=z.gamma_prime + 1e-7)
    r = verify_lemma7(data_1e3.zprimes + [twin], data_1e3.g, 1000.0)
    assert r.violations == 1
    assert r.witness["count"] == 2


def test_lemma7_empty(data_1e3):
    r = verify_lemma7([], data_1e3.g, 1000.0)
    assert r.violations == 0 and r.passed


def test_lemma7_brute(data_1e3):
    g, T = data_1e3.g, 1000.0
    limit = 0.5 + 1 / math.log(T)
    low = [z.gamma_prime for z in data_1e3.zprimes if z.beta_prime < limit]
    worst = 0
    for i in range(len(g) - 1):
        if T < g[i] <= 2 * T:
            worst = max(worst, sum(1 for y in low if g[i] < y <= g[i + 1]))
    assert 1 - worst == verify_lemma7(data_1e3.zprimes, g, T).worst_margin


# ---------------------------------------------------------------- Lemma 10


def test_lemma10_real(data_1e3):
    r = verify_lemma10(data_1e3.g, data_1e3.zprimes, 1000.0, 1.0)
    assert r.violations == 0


def test_lemma10_removal(data_1e4):
    r = verify_lemma10(data_1e4.g, data_1e4.zprimes, 1e4, 1.0)
    assert r.checked > 0 and r.violations == 0
    w = r.witness
    rho = complex(0.5, w["gamma"])
    kept = [z for z in data_1e4.zprimes if abs(z.point - rho) > w["radius"]]
    r2 = verify_lemma10(data_1e4.g, kept, 1e4, 1.0)
    assert r2.violations >= 1


def test_lemma10_vacuous():
    g = np.arange(900.0, 2200.0, 1.0)
    r = verify_lemma10(g, [], 1000.0, 1.0)
    assert r.checked == 0 and r.passed


# ---------------------------------------------------------------- Proposition 2


def test_prop2_real(data_1e3):
    for eps in (0.5, 1.0, 2.0):
        r = check_prop2_envelope(data_1e3.pairings, eps)
        assert r.violations == 0 and r.checked > 0
        assert 0 <= r.details["fraction_above_upper"] <= 1
        R, sel = prop2_ratios(data_1e3.pairings, eps)
        assert np.all(R >= P2_LOWER)
        assert all((p.zprime.beta_prime - 0.5) * p.log_T <= eps for p in sel)


def test_prop2_empty():
    r = check_prop2_envelope([record(0.9, 1000.3, 1000.0)], 0.01)
    assert r.checked == 0 and r.passed


def test_prop2_violation():
    r = check_prop2_envelope([record(0.5001, 1000.0, 1000.0)], 1.0)
    assert r.violations == 1


# ---------------------------------------------------------------- Lemma 6


def test_lemma6_single_zero():
    g = np.array([1000.0])
    zp = ZPrimeZero(0.6, 1000.2, 0.0, 0)
    r = lemma6_residuals([zp], g, window=(990.0, 1010.0))
    _, tail = lorentz_sum(zp.point, g, window=(990.0, 1010.0))
    term = 0.1 / (0.01 + 0.04)
    assert r[0] == pytest.approx(0.5 * math.log(1000.2) - term - tail, abs=1e-12)


def test_lemma6_real_subset(data_1e3):
    zps = [z for z in data_1e3.zprimes if 1000 < z.gamma_prime <= 1100]
    r = verify_lemma6(zps, data_1e3.g, doubling=True)
    assert r.details["max_abs_residual"] <= 5
    assert r.details["max_doubling_change"] < 0.1
    assert r.worst_margin == pytest.approx(5 - r.details["max_abs_residual"])


def test_lemma6_coverage(data_1e3):
    z = ZPrimeZero(0.7, 880.0, 0.0, 0)
    with pytest.raises(CoverageError):
        verify_lemma6([z], data_1e3.g)


# ---------------------------------------------------------------- reported suites


def test_corollary3(data_1e3):
    r = corollary3_report(data_1e3.g, 1000.0)
    assert r.violations == 0
    assert r.details["tail_fraction"]["8"] < 0.01


def test_explicit_formula_report(data_1e3):
    r = explicit_formula_report(data_1e3.g, [1100.0, 1500.0, 1900.0])
    assert r.checked == 6 and r.violations == 0
    assert r.details["max_weil_residual"] < 1e-3
    assert set(r.as_dict()) == {"lemma_id", "checked", "violations", "worst_margin", "witness", "details"}
