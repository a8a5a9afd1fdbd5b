import math

import numpy as np
import pytest

from oracles import zprime_root, zprime_winding
from zetagaps.errors import CoverageError, DomainError
from zetagaps.zeros import count_zeros, find_zeta_zeros, ordinates
from zetagaps.zprime import (
    PairingRecord,
    ZPrimeZero,
    _circle_windings,
    find_zprime_zeros,
    pair_all,
    pair_with_closest,
)
from zetagaps.zeta_eval import zeta_deriv


@pytest.fixture(scope="module")
def low_zeros():
    return find_zeta_zeros(10.0, 200.0)


def test_single_zero_20_30():
    zp = find_zprime_zeros(20.0, 30.0, 5.0)
    assert len(zp) == 1
    assert zprime_winding(0.5, 5.0, 20.0, 30.0) == 1
    ref = zprime_root(complex(zp[0].beta_prime, zp[0].gamma_prime))
    assert abs(zp[0].beta_prime - ref.real) < 1e-6
    assert abs(zp[0].gamma_prime - ref.imag) < 1e-6
    assert zp[0].beta_prime == pytest.approx(2.4632, abs=1e-4)
    assert zp[0].gamma_prime == pytest.approx(23.2983, abs=1e-4)


def test_none_below_13():
    assert find_zprime_zeros(10.0, 13.0, 5.0) == []
    assert zprime_winding(0.5, 5.0, 10.0, 13.0) == 0


def test_count_matches_argument_principle():
    zp = find_zprime_zeros(100.0, 120.0, 6.0)
    assert len(zp) == zprime_winding(0.5, 6.0, 100.0, 120.0)


def test_roots_against_mpmath():
    zp = find_zprime_zeros(300.0, 340.0)
    assert zp
    for z in zp:
        ref = zprime_root(z.point)
        assert abs(z.point - ref) < 1e-9
        assert z.newton_residual <= 1e-9
        assert abs(zeta_deriv(z.point).value) < 1e-9


def test_speiser_and_certification():
    zp = find_zprime_zeros(500.0, 600.0)
    assert all(z.beta_prime >= 0.5 - 1e-8 for z in zp)
    pts = np.array([z.point for z in zp])
    assert np.all(_circle_windings(pts) == 1)
    g = [z.gamma_prime for z in zp]
    assert g == sorted(g)


def test_threads_and_shards_invariant():
    a = find_zprime_zeros(400.0, 480.0, threads=1, shard_length=20.0)
    b = find_zprime_zeros(400.0, 480.0, threads=3, shard_length=20.0)
    assert a == b
    c = find_zprime_zeros(400.0, 480.0, shard_length=80.0)
    assert len(c) == len(a)
    assert max(abs(x.point - y.point) for x, y in zip(a, c)) < 1e-9


def test_domain():
    with pytest.raises(DomainError):
        find_zprime_zeros(20.0, 30.0, 7.0)
    with pytest.raises(DomainError):
        find_zprime_zeros(20.0, 30.0, 0.5)
    assert find_zprime_zeros(30.0, 30.0) == []


def test_pairing_example(low_zeros):
    zp = find_zprime_zeros(20.0, 30.0, 5.0)[0]
    p = pair_with_closest(zp, low_zeros)
    g = ordinates(low_zeros)
    brute = min(g, key=lambda x: (abs(complex(zp.beta_prime - 0.5, zp.gamma_prime - x)), x))
    assert p.rho_c_gamma == brute
    assert p.rho_c_gamma == pytest.approx(25.0109, abs=1e-4)
    assert p.dist == pytest.approx(2.605, abs=1e-3)
    assert p.dist < 3.0
    assert p.gap_up == pytest.approx(g[3] - g[2])
    assert p.gap_down == pytest.approx(g[2] - g[1])
    assert p.gap_nearest == min(p.gap_up, p.gap_down)


def test_pairing_brute_force(low_zeros):
    g = ordinates(low_zeros)
    for zp in find_zprime_zeros(100.0, 150.0):
        p = pair_with_closest(zp, low_zeros, T=100.0)
        d = [abs(complex(zp.beta_prime - 0.5, zp.gamma_prime - x)) for x in g]
        assert p.rho_c_gamma == g[int(np.argmin(d))]
        assert p.dist == pytest.approx(min(d), rel=1e-14)
        assert p.log_T == math.log(100.0)


def test_tie_goes_to_smaller_ordinate():
    g = np.arange(50.0, 150.0, 1.0)
    p = pair_with_closest(ZPrimeZero(0.6, 100.5, 0.0, 0), g)
    assert p.rho_c_gamma == 100.0


def test_unique_minimizer():
    g = np.array([50.0 + 1.7 * k for k in range(60)])
    p = pair_with_closest(ZPrimeZero(0.55, g[30] + 0.2, 0.0, 0), g)
    assert p.rho_c_gamma == g[30]


def test_pairing_coverage():
    g = np.arange(50.0, 110.0, 1.0)
    with pytest.raises(CoverageError):
        pair_with_closest(ZPrimeZero(0.6, 105.0, 0.0, 0), g)
    with pytest.raises(CoverageError):
        pair_with_closest(ZPrimeZero(0.6, 60.0, 0.0, 0), g)
    with pytest.raises(CoverageError):
        pair_with_closest(ZPrimeZero(0.6, 60.0, 0.0, 0), [])


def test_pair_all_skips_coincident():
    g = np.arange(50.0, 150.0, 1.0)
    zps = [ZPrimeZero(0.6, 100.3, 0.0, 0), ZPrimeZero(0.5, 101.0, 0.0, 1, True)]
    assert len(pair_all(zps, g)) == 1
    assert len(pair_all(zps, g, include_coincident=True)) == 2
    assert isinstance(pair_all(zps, g)[0], PairingRecord)


def test_count_against_shifted_density(data_1e3):
    # zeta' has N(2T) - N(T) - T log 2 / 2 pi zeros in the window, not N(2T) - N(T)
    T = data_1e3.T
    n = sum(1 for z in data_1e3.zprimes if T < z.gamma_prime <= 2 * T)
    expected = count_zeros(2 * T) - count_zeros(T) - T * math.log(2) / (2 * math.pi)
    assert abs(n - expected) < 0.02 * expected
