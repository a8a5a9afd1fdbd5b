"""Evaluation of zeta, zeta', zeta'/zeta, theta and Hardy's Z.

Everything goes through Euler-Maclaurin summation (see ``_em``), which is
uniform in sigma and therefore also serves the zeros of zeta' off the
critical line.  Scalar entry points return an :class:`EvalResult`; the
``*_many`` and ``*_line`` variants work on arrays and are what the zero
finders use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _em
from .errors import AccuracyUnreachable, ConsistencyError, DomainError, PoleError, ProximityError
from .sieve import smallest_prime_factors

T_MAX = 1.0e5
DEFAULT_ACCURACY = 1e-10
SIGMA_MIN = -1.0
MAX_TERMS = 1 << 16

_SPF = smallest_prime_factors(MAX_TERMS + 1)
_LHI, _LLO = _em.log_tables(MAX_TERMS, _SPF)
_C = _em.bernoulli_ratios(_em.M_MAX)
for _a in (_LHI, _LLO, _C):
    _a.setflags(write=False)

ComplexPoint = complex


@dataclass(frozen=True)
class EvalResult:
    value: complex
    abs_error_bound: float
    terms_used: int


def _check_point(s: complex, t_max: float) -> complex:
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise DomainError(f"non-finite point {s}")
    if abs(s.imag) > t_max:
        raise DomainError(f"|t| = {abs(s.imag)} exceeds T_max = {t_max}")
    if s.real < SIGMA_MIN:
        raise DomainError(f"sigma = {s.real} below {SIGMA_MIN}")
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    return s


def eval_many(s, target_accuracy: float = DEFAULT_ACCURACY, deriv: bool = True):
    """zeta and zeta' at an array of points.

    Returns ``(z, dz, bound_z, bound_dz)``; with ``deriv=False`` the
    derivative outputs are zeros and the call is about twice as fast.
    Raises AccuracyUnreachable if any point cannot be evaluated to
    ``target_accuracy``.
    """
    s = np.ascontiguousarray(np.asarray(s, dtype=np.complex128).ravel())
    if s.size == 0:
        e = np.empty(0)
        return e.astype(complex), e.astype(complex), e, e
    z, dz, bz, bdz, terms = _em.em_points(s, target_accuracy, _LHI, _LLO, _SPF, _C, _em.M_MAX, deriv)
    if np.any(terms < 0):
        bad = s[np.flatnonzero(terms < 0)[0]]
        raise AccuracyUnreachable(f"cannot reach {target_accuracy:g} at s = {bad} with N < {MAX_TERMS}")
    return z, dz, bz, bdz


def eval_line(s0: complex, step: complex, count: int, target_accuracy: float = DEFAULT_ACCURACY):
    """zeta and zeta' at ``s0 + j*step`` for ``j < count``; same return shape as :func:`eval_many`."""
    if count <= 0:
        e = np.empty(0)
        return e.astype(complex), e.astype(complex), e, e
    z, dz, bz, bdz, terms = _em.em_line(
        complex(s0), complex(step), int(count), target_accuracy, _LHI, _LLO, _SPF, _C, _em.M_MAX
    )
    if np.any(terms < 0):
        raise AccuracyUnreachable(f"cannot reach {target_accuracy:g} on line from {s0}")
    return z, dz, bz, bdz


def _scalar(s, target_accuracy, t_max, deriv):
    if not target_accuracy > 0:
        raise DomainError("target_accuracy must be positive")
    s = _check_point(s, t_max)
    arr = np.array([s])
    z, dz, bz, bdz, terms = _em.em_points(arr, target_accuracy, _LHI, _LLO, _SPF, _C, _em.M_MAX, deriv)
    value, bound = (dz[0], bdz[0]) if deriv else (z[0], bz[0])
    if terms[0] < 0 or not bound <= target_accuracy:
        raise AccuracyUnreachable(f"cannot reach {target_accuracy:g} at s = {s} (bound {bound:.3g})")
    return EvalResult(complex(value), float(bound), int(terms[0]))


def zeta(s: ComplexPoint, target_accuracy: float = DEFAULT_ACCURACY, *, t_max: float = T_MAX) -> EvalResult:
    """Riemann zeta at ``s`` with ``|error| <= abs_error_bound <= target_accuracy``."""
    return _scalar(s, target_accuracy, t_max, deriv=False)


def zeta_deriv(s: ComplexPoint, target_accuracy: float = DEFAULT_ACCURACY, *, t_max: float = T_MAX) -> EvalResult:
    """zeta'(s) from the term-wise differentiated Euler-Maclaurin formula."""
    return _scalar(s, target_accuracy, t_max, deriv=True)


# theta(t) = t/2 log(t/2pi) - t/2 - pi/8 + sum_k a_k / t^(2k-1)
_THETA_COEFFS = (
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430080.0,
    511.0 / 1216512.0,
)
THETA_T_MIN = 10.0


def riemann_siegel_theta(t):
    """Riemann-Siegel theta for t >= 10 (scalar or array) by its asymptotic series.

    The first omitted term is below 1e-14 at t = 10.
    """
    arr = np.asarray(t, dtype=np.float64)
    if np.any(~(arr >= THETA_T_MIN)):
        raise DomainError("riemann_siegel_theta needs t >= 10; use log-gamma directly below that")
    inv = 1.0 / arr
    inv2 = inv * inv
    corr = np.zeros_like(arr)
    for a in reversed(_THETA_COEFFS):
        corr = corr * inv2 + a
    out = 0.5 * arr * np.log(arr / (2.0 * math.pi)) - 0.5 * arr - math.pi / 8.0 + corr * inv
    return float(out) if out.ndim == 0 else out


def theta_deriv(t):
    """theta'(t) = 1/2 log(t/2pi) - 1/(48 t^2) - ... (leading terms; t >= 10)."""
    arr = np.asarray(t, dtype=np.float64)
    out = 0.5 * np.log(arr / (2.0 * math.pi)) - 1.0 / (48.0 * arr**2) - 7.0 / (1920.0 * arr**4)
    return float(out) if out.ndim == 0 else out


IMAG_TOL = 1e-8


def _z_from_zeta(t, zvals):
    prod = np.exp(1j * riemann_siegel_theta(t)) * zvals
    im = np.abs(prod.imag)
    if np.any(im > IMAG_TOL):
        k = int(np.argmax(im))
        raise ConsistencyError(f"Im(e^(i theta) zeta) = {im[k]:.3g} at t = {np.atleast_1d(t)[k]}")
    return prod.real


def hardy_Z(t: float, target_accuracy: float = DEFAULT_ACCURACY) -> float:
    """Hardy's Z(t) = exp(i theta(t)) zeta(1/2 + it), t >= 10."""
    if not t >= THETA_T_MIN:
        raise DomainError("hardy_Z needs t >= 10")
    r = zeta(complex(0.5, t), target_accuracy)
    return float(_z_from_zeta(np.array([t]), np.array([r.value]))[0])


def hardy_Z_many(t, target_accuracy: float = DEFAULT_ACCURACY) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if t.size and np.any(~(t >= THETA_T_MIN)):
        raise DomainError("hardy_Z needs t >= 10")
    z, _, _, _ = eval_many(0.5 + 1j * t.ravel(), target_accuracy, deriv=False)
    return _z_from_zeta(t.ravel(), z).reshape(t.shape)


def hardy_Z_line(t0: float, h: float, count: int, target_accuracy: float = DEFAULT_ACCURACY) -> np.ndarray:
    """Z at ``t0 + j*h`` for ``j < count`` (fast path for dense scans)."""
    if t0 < THETA_T_MIN:
        raise DomainError("hardy_Z needs t >= 10")
    z, _, _, _ = eval_line(complex(0.5, t0), complex(0.0, h), count, target_accuracy)
    t = t0 + h * np.arange(count)
    return _z_from_zeta(t, z)


def _zero_ordinates_near(t: float, radius: float) -> np.ndarray:
    """Critical-line zeros with |gamma - t| < radius, found by a fine local Z scan."""
    lo = max(t - radius, THETA_T_MIN)
    hi = t + radius
    if hi <= lo:
        return np.empty(0)
    gap = 2.0 * math.pi / max(math.log(hi / (2.0 * math.pi)), 1.0)
    count = max(int(math.ceil((hi - lo) / (gap / 16.0))), 8) + 1
    h = (hi - lo) / (count - 1)
    zs = hardy_Z_line(lo, h, count)
    idx = np.flatnonzero(np.sign(zs[:-1]) != np.sign(zs[1:]))
    return lo + h * (idx + 0.5)


def log_deriv(
    s: ComplexPoint,
    exclusion_radius: float,
    known_zeros=None,
    target_accuracy: float = DEFAULT_ACCURACY,
) -> EvalResult:
    """zeta'/zeta(s), refusing points within ``exclusion_radius`` of a zero or the pole.

    ``known_zeros`` is an optional array of ordinates; without it, zeros near
    ``s`` are located by a local scan of Z (RH assumed, as throughout).
    """
    if not exclusion_radius > 0:
        raise DomainError("exclusion_radius must be positive")
    s = _check_point(s, T_MAX)
    if abs(s - 1) < exclusion_radius:
        raise ProximityError(f"s = {s} within {exclusion_radius} of the pole")
    sp = s if s.imag >= 0 else s.conjugate()
    if abs(sp.real - 0.5) < exclusion_radius:
        if known_zeros is None:
            gammas = _zero_ordinates_near(sp.imag, exclusion_radius + 1e-3)
        else:
            gammas = np.abs(np.asarray(known_zeros, dtype=float))
        if gammas.size:
            d = np.abs(sp - (0.5 + 1j * gammas))
            if d.min() < exclusion_radius:
                g = gammas[int(np.argmin(d))]
                raise ProximityError(f"s = {s} lies within {exclusion_radius} of the zero 1/2 + {g}i")
    z, dz, bz, bdz, terms = _em.em_points(np.array([s]), target_accuracy, _LHI, _LLO, _SPF, _C, _em.M_MAX, True)
    if terms[0] < 0:
        raise AccuracyUnreachable(f"cannot reach {target_accuracy:g} at s = {s}")
    zv, dv = complex(z[0]), complex(dz[0])
    if abs(zv) <= bz[0]:
        raise ProximityError(f"|zeta(s)| = {abs(zv):.3g} not resolved from 0 at s = {s}")
    value = dv / zv
    # |a/b - a'/b'| <= (|a - a'| + |a/b| |b - b'|) / (|b| - |b - b'|)
    bound = (bdz[0] + abs(value) * bz[0]) / (abs(zv) - bz[0])
    return EvalResult(value, float(bound), int(terms[0]))
