"""Numba kernels for Euler-Maclaurin evaluation of zeta(s) and zeta'(s).

Powers n^{-s} are built multiplicatively from the smallest-prime-factor
table, so only primes pay for exp/cos/sin.  Prime phases t*log(p) are reduced
mod 2*pi in double-double arithmetic, which keeps the rounding error
independent of t.

All kernels are pure functions of their arguments and release the GIL.
"""

import math

import numba as nb
import numpy as np
from scipy.special import zeta as _hurwitz_zeta

TWO_PI_HI = 6.283185307179586
TWO_PI_LO = 2.4492935982947064e-16
EPS = 2.220446049250313e-16
M_MAX = 80
N_MIN = 8
BLOCK = 32


def bernoulli_ratios(m_max: int = M_MAX) -> np.ndarray:
    """c[k] = B_{2k}/(2k)! for 0 <= k <= m_max + 1 (c[0] = 1)."""
    k = np.arange(1, m_max + 2, dtype=np.float64)
    c = 2.0 * (-1.0) ** (k + 1) * _hurwitz_zeta(2.0 * k, 1.0) / (2.0 * np.pi) ** (2.0 * k)
    return np.concatenate(([1.0], c))


def log_tables(n: int, spf: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Double-double log(k) for 0 <= k <= n; the low part is filled only at primes."""
    hi = np.zeros(n + 1)
    hi[1:] = np.log(np.arange(1, n + 1, dtype=np.float64))
    lo = np.zeros(n + 1)
    primes = np.flatnonzero(spf[: n + 1] == np.arange(n + 1))
    primes = primes[primes >= 2]
    ld = np.log(primes.astype(np.longdouble))
    lo[primes] = (ld - hi[primes].astype(np.longdouble)).astype(np.float64)
    return hi, lo


@nb.njit(nogil=True, cache=True)
def _split(a):
    c = 134217729.0 * a
    h = c - (c - a)
    return h, a - h


@nb.njit(nogil=True, cache=True)
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


@nb.njit(nogil=True, cache=True)
def reduced_phase(t, lhi, llo):
    """t*(lhi + llo) reduced to about [-pi, pi]."""
    p, e = _two_prod(t, lhi)
    e += t * llo
    k = math.floor(p / TWO_PI_HI + 0.5)
    q, qe = _two_prod(k, TWO_PI_HI)
    return ((p - q) - qe) - k * TWO_PI_LO + e


@nb.njit(nogil=True, cache=True)
def _power(sr, si, lhi, llo):
    a = math.exp(-sr * lhi)
    ph = reduced_phase(si, lhi, llo)
    return complex(a * math.cos(ph), -a * math.sin(ph))


@nb.njit(nogil=True, cache=True)
def _fill_powers(sr, si, N, lhi, llo, spf, buf):
    buf[1] = 1.0
    for n in range(2, N):
        p = spf[n]
        if p == n:
            buf[n] = _power(sr, si, lhi[n], llo[n])
        else:
            buf[n] = buf[p] * buf[n // p]


@nb.njit(nogil=True, cache=True)
def _truncation(sr, si, N, m, c):
    """Backlund bounds for zeta and zeta' after m correction terms at cutoff N."""
    s = complex(sr, si)
    lnN = math.log(N)
    amp = math.exp(-sr * lnN)
    A = c[1] * s / N
    B = c[1] / N
    for k in range(1, m + 1):
        q = (s + 2 * k - 1) * (s + 2 * k)
        r = c[k + 1] / c[k] / (N * N)
        A, B = A * q * r, (B * q + A * (2 * s + 4 * k - 1)) * r
    f = abs(s + 2 * m + 1) / (sr + 2 * m + 1)
    return abs(A) * amp * f, (abs(B - lnN * A) + abs(A)) * amp * f


@nb.njit(nogil=True, cache=True)
def choose_params(sr, si, target, nmax, c, mmax):
    """Smallest cutoff N (and correction order m) whose truncation bound is below target/2.

    Returns (-1, 0) when no N < nmax works.
    """
    s = complex(sr, si)
    N = max(N_MIN, int(abs(s) / TWO_PI_HI) + 2)
    goal = 0.5 * target
    while N < nmax:
        lnN = math.log(N)
        amp = math.exp(-sr * lnN)
        A = c[1] * s / N
        B = c[1] / N
        prev = np.inf
        for k in range(1, mmax + 1):
            # (A, B) hold the k-th term; it bounds the remainder of m = k - 1 terms
            m = k - 1
            if m >= 1:
                f = abs(s + 2 * m + 1) / (sr + 2 * m + 1)
                b0 = abs(A) * amp * f
                b1 = (abs(B - lnN * A) + abs(A)) * amp * f
                worst = max(b0, b1)
                if worst <= goal:
                    return N, m
                if worst > prev and k > 4:
                    break
                prev = worst
            q = (s + 2 * k - 1) * (s + 2 * k)
            r = c[k + 1] / c[k] / (N * N)
            A, B = A * q * r, (B * q + A * (2 * s + 4 * k - 1)) * r
        N = int(N * 1.25) + 1
    return -1, 0


@nb.njit(nogil=True, cache=True)
def _tail(sr, si, N, m, lhi, llo, c):
    """Euler-Maclaurin tail (zeta, zeta', abs-sum of tail terms)."""
    s = complex(sr, si)
    lnN = lhi[N]
    Ns = _power(sr, si, lhi[N], llo[N])
    inv = 1.0 / (s - 1.0)
    z = N * Ns * inv + 0.5 * Ns
    dz = N * Ns * (-lnN * inv - inv * inv) - 0.5 * lnN * Ns
    A = c[1] * s / N
    B = c[1] / N
    mag = abs(z)
    for k in range(1, m + 1):
        z += A * Ns
        dz += (B - lnN * A) * Ns
        mag += abs(A * Ns)
        q = (s + 2 * k - 1) * (s + 2 * k)
        r = c[k + 1] / c[k] / (N * N)
        A, B = A * q * r, (B * q + A * (2 * s + 4 * k - 1)) * r
    return z, dz, mag


@nb.njit(nogil=True, cache=True)
def _power_sums(sr, N):
    """Upper bounds for sum_{n<N} n^-sigma and sum_{n<N} log(n) n^-sigma."""
    lnN = math.log(N)
    if sr < 0.0:
        m = N * math.exp(-sr * lnN)
    elif abs(sr - 1.0) < 1e-12:
        m = 1.0 + lnN
    else:
        m = 1.0 + (math.exp((1.0 - sr) * lnN) - 1.0) / (1.0 - sr)
    return m, lnN * m


@nb.njit(nogil=True, cache=True)
def em_points(s, target, lhi, llo, spf, c, mmax, want_d):
    """Evaluate zeta (and zeta' if ``want_d``) at arbitrary points.

    Returns (z, dz, bound_z, bound_dz, terms); terms = -1 where the
    target was out of reach (values are then nan).  Without ``want_d``
    the derivative outputs are zero.
    """
    n = s.shape[0]
    nmax = lhi.shape[0] - 1
    z = np.empty(n, dtype=np.complex128)
    dz = np.zeros(n, dtype=np.complex128)
    bz = np.empty(n)
    bdz = np.zeros(n)
    terms = np.empty(n, dtype=np.int64)
    buf = np.empty(nmax + 1, dtype=np.complex128)
    for i in range(n):
        sr = s[i].real
        si = s[i].imag
        N, m = choose_params(sr, si, target, nmax, c, mmax)
        if N < 0:
            z[i] = np.nan
            dz[i] = np.nan
            bz[i] = np.inf
            bdz[i] = np.inf
            terms[i] = -1
            continue
        _fill_powers(sr, si, N, lhi, llo, spf, buf)
        acc = 0j
        if want_d:
            dacc = 0j
            for k in range(1, N):
                v = buf[k]
                acc += v
                dacc -= lhi[k] * v
        else:
            for k in range(1, N):
                acc += buf[k]
        mag, dmag = _power_sums(sr, N)
        tz, tdz, tmag = _tail(sr, si, N, m, lhi, llo, c)
        t0, t1 = _truncation(sr, si, N, m, c)
        rfac = EPS * (2.0 * math.log2(N) + 8.0)
        z[i] = acc + tz
        bz[i] = t0 + rfac * (mag + tmag)
        if want_d:
            dz[i] = dacc + tdz
            bdz[i] = t1 + rfac * (dmag + tmag * (1.0 + lhi[N]))
        terms[i] = N + m
    return z, dz, bz, bdz, terms


@nb.njit(nogil=True, cache=True)
def em_line(s0, d, K, target, lhi, llo, spf, c, mmax):
    """Evaluate zeta and zeta' at s0 + j*d, j = 0..K-1, sharing one cutoff.

    The main sum steps n^{-(s0 + j d)} by repeated multiplication with
    n^{-d}, re-anchored every BLOCK points.
    """
    nmax = lhi.shape[0] - 1
    z = np.empty(K, dtype=np.complex128)
    dz = np.empty(K, dtype=np.complex128)
    bz = np.empty(K)
    bdz = np.empty(K)
    terms = np.empty(K, dtype=np.int64)
    s1 = s0 + (K - 1) * d
    Na, ma = choose_params(s0.real, s0.imag, target, nmax, c, mmax)
    Nb, mb = choose_params(s1.real, s1.imag, target, nmax, c, mmax)
    # interior points of a segment never need more than the endpoints, but
    # sigma varies on horizontal lines, so take both maxima
    if Na < 0 or Nb < 0:
        for j in range(K):
            z[j] = np.nan
            dz[j] = np.nan
            bz[j] = np.inf
            bdz[j] = np.inf
            terms[j] = -1
        return z, dz, bz, bdz, terms
    N = max(Na, Nb)
    m = max(ma, mb)
    buf = np.empty(N + 1, dtype=np.complex128)
    step = np.empty(N + 1, dtype=np.complex128)
    _fill_powers(d.real, d.imag, N, lhi, llo, spf, step)
    acc = np.zeros(BLOCK, dtype=np.complex128)
    dacc = np.zeros(BLOCK, dtype=np.complex128)
    rfac = EPS * (2.0 * math.log2(N) + 8.0 + BLOCK)
    for j0 in range(0, K, BLOCK):
        nb_ = min(BLOCK, K - j0)
        sb = s0 + j0 * d
        _fill_powers(sb.real, sb.imag, N, lhi, llo, spf, buf)
        for j in range(nb_):
            acc[j] = 0j
            dacc[j] = 0j
        for k in range(1, N):
            v = buf[k]
            w = step[k]
            lk = lhi[k]
            for j in range(nb_):
                acc[j] += v
                dacc[j] -= lk * v
                v *= w
        for j in range(nb_):
            sj = s0 + (j0 + j) * d
            tz, tdz, tmag = _tail(sj.real, sj.imag, N, m, lhi, llo, c)
            t0, t1 = _truncation(sj.real, sj.imag, N, m, c)
            mag, dmag = _power_sums(sj.real, N)
            z[j0 + j] = acc[j] + tz
            dz[j0 + j] = dacc[j] + tdz
            bz[j0 + j] = t0 + rfac * (mag + tmag)
            bdz[j0 + j] = t1 + rfac * (dmag + tmag * (1.0 + lhi[N]))
            terms[j0 + j] = N + m
    return z, dz, bz, bdz, terms
