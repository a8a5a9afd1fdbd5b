"""Short Dirichlet polynomials over prime powers and the Fejer explicit formula.

A_N, B_N and D_N share one evaluator; they differ only in the weight of
Lambda(n)/n^s.  The explicit formula is evaluated on two disjoint paths:
a sum of F_Delta(gamma - t) over stored ordinates, and an archimedean
integral minus a finite prime sum.  Both infinite tails (zeros outside the
stored list, the Gamma integrand beyond the quadrature core) use the smooth
density, integrated against F_Delta with QAWF.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import ConstraintError, CoverageError, DomainError
from .sieve import N_MAX_DEFAULT, von_mangoldt_table
from .zeros import covers, mean_gap, ordinates
from .zeta_eval import log_deriv

EF_CONSTANT = 10.0
S_BOUND = 2.0  # |N(u) - theta(u)/pi - 1| at desk heights
W_MIN = 30.0
_GL_LO = np.polynomial.legendre.leggauss(16)
_GL_HI = np.polynomial.legendre.leggauss(24)


class PolyKind(enum.Enum):
    A = "A"
    B = "B"
    D = "D"


@dataclass(frozen=True)
class PolySpec:
    kind: PolyKind
    N: int
    sigma_offset: float = 0.0

    def __post_init__(self):
        if not isinstance(self.kind, PolyKind):
            object.__setattr__(self, "kind", PolyKind(self.kind))
        if self.N < 2:
            raise DomainError(f"polynomial length must be >= 2, got {self.N}")


@dataclass(frozen=True)
class FejerParams:
    delta_cap: float

    def __post_init__(self):
        if not self.delta_cap > 0:
            raise DomainError("delta_cap must be positive")


def smoothing_w(n, N: int):
    """W_N(n): 1 up to sqrt(N), then log(N/n)/log N."""
    arr = np.asarray(n, dtype=float)
    if np.any(arr < 1) or np.any(arr > N):
        raise DomainError(f"smoothing weight needs 1 <= n <= N = {N}")
    out = np.where(arr * arr <= N, 1.0, np.log(N / arr) / math.log(N))
    return float(out) if out.ndim == 0 else out


def _coefficients(spec: PolySpec, n_max: int):
    if spec.N > n_max:
        raise DomainError(f"N = {spec.N} exceeds the sieve table ({n_max})")
    n, lam = von_mangoldt_table(n_max).prime_powers(spec.N)
    if spec.kind is PolyKind.A:
        w = smoothing_w(n, spec.N)
    elif spec.kind is PolyKind.B:
        w = 1.0 - np.log(n) / math.log(spec.N)
    else:
        w = np.ones(n.size)
    return n.astype(float), lam * w


def eval_poly(spec: PolySpec, t, n_max: int = N_MAX_DEFAULT):
    """Sum over prime powers n <= N of weight(n) Lambda(n) n^{-s}, s = 1/2 + offset + it.

    ``t`` may be an array; the result then has the same shape.
    """
    n, a = _coefficients(spec, n_max)
    tt = np.asarray(t, dtype=float)
    sigma = 0.5 + spec.sigma_offset
    logn = np.log(n)
    amp = a * np.exp(-sigma * logn)
    phase = np.multiply.outer(tt.ravel(), logn)
    vals = (np.cos(phase) - 1j * np.sin(phase)) @ amp
    return complex(vals[0]) if tt.ndim == 0 else vals.reshape(tt.shape)


def abs_poly_bound(spec: PolySpec, n_max: int = N_MAX_DEFAULT) -> float:
    """Sum of |coefficient| n^{-sigma}: a bound for |poly| on its vertical line."""
    n, a = _coefficients(spec, n_max)
    return float(np.sum(np.abs(a) * n ** -(0.5 + spec.sigma_offset)))


def _check_cover(g: np.ndarray, lo: float, hi: float):
    if not covers(g, lo, hi):
        have = "nothing" if g.size == 0 else f"[{g[0]}, {g[-1]}]"
        raise CoverageError(f"zeros {have} do not cover [{lo}, {hi}]")


def window_count(t: float, N: int, zeros) -> int:
    """Number of ordinates in (t - pi/log N, t + pi/log N]."""
    g = ordinates(zeros)
    r = math.pi / math.log(N)
    guard = mean_gap(max(t, 10.0))
    _check_cover(g, t - r - guard, t + r + guard)
    return int(np.searchsorted(g, t + r, side="right") - np.searchsorted(g, t - r, side="right"))


def window_constant(t: float, N: int, zeros, T: float) -> float:
    """count / (log T/log N + |B_N(1/2+it)|/log N): the empirical window-bound constant."""
    ln = math.log(N)
    b = abs(eval_poly(PolySpec(PolyKind.B, N), t))
    return window_count(t, N, zeros) / (math.log(T) / ln + b / ln)


def script_e(s: complex, N: int, T: float) -> float:
    """(|A_N(s)| + |B_N(1/2+it)|)/log N + log T/log N."""
    s = complex(s)
    a = abs(eval_poly(PolySpec(PolyKind.A, N, s.real - 0.5), s.imag))
    b = abs(eval_poly(PolySpec(PolyKind.B, N), s.imag))
    ln = math.log(N)
    return (a + b) / ln + math.log(T) / ln


def selberg_error(s: complex, N: int, c: float, zeros, T: float | None = None):
    """(lhs, budget): zeta'/zeta(s) minus the zeros within c/log T, and (log T/c) * E_{T,N}(s)."""
    if not 0 < c < 1:
        raise DomainError("c must lie in (0, 1)")
    s = complex(s)
    T = s.imag if T is None else T
    g = ordinates(zeros)
    radius = c / math.log(T)
    _check_cover(g, s.imag - radius - 1.0, s.imag + radius + 1.0)
    ld = log_deriv(s, 1e-6, known_zeros=g).value
    rho = 0.5 + 1j * g[np.abs(g - s.imag) < radius + 1.0]
    near = rho[np.abs(s - rho) < radius]
    lhs = ld - np.sum(1.0 / (s - near))
    budget = math.log(T) / c * script_e(s, N, T)
    return complex(lhs), float(budget)


def zero_density(u):
    """theta'(u)/pi = (Re psi(1/4 + iu/2) - log pi)/(2 pi), the smooth density of ordinates."""
    u = np.asarray(u, dtype=float)
    return (special.digamma(0.25 + 0.5j * u).real - math.log(math.pi)) / (2.0 * math.pi)


def _gamma_density(u):
    return special.digamma(0.25 + 0.5j * np.asarray(u, dtype=float)).real / (2.0 * math.pi)


def lorentz_sum(s: complex, zeros, window=None, radius: float | None = None) -> tuple[float, float]:
    """Sum over all rho of (sigma-1/2)/((sigma-1/2)^2 + (t-gamma)^2).

    Stored ordinates are summed exactly; ordinates outside ``window``
    (default: the span of the list) and the negative ordinates use the
    smooth density.  With ``radius`` only ordinates within that distance of
    t are summed and the window is (t - radius, t + radius].  Returns
    (value, tail_part).
    """
    s = complex(s)
    a = s.real - 0.5
    if not a > 0:
        raise DomainError("needs sigma > 1/2")
    g = ordinates(zeros)
    t = s.imag
    if radius is not None:
        _check_cover(g, t - radius, t + radius)
        g = g[(g > t - radius) & (g <= t + radius)]
        window = (t - radius, t + radius)
    elif window is None:
        if g.size == 0:
            raise CoverageError("empty zero list and no window")
        h = 0.5 * mean_gap(max(g[0], 10.0))
        window = (g[0] - h, g[-1] + h)
    lo, hi = window
    direct = float(np.sum(a / (a * a + (t - g) ** 2)))

    def k(u):
        return max(float(zero_density(u)), 0.0) * a / (a * a + (t - u) ** 2)

    def kneg(u):
        return max(float(zero_density(u)), 0.0) * a / (a * a + (t + u) ** 2)

    tail = integrate.quad(k, 0.0, lo, limit=200, points=[t] if 0 < t < lo else None)[0]
    tail += integrate.quad(k, hi, np.inf, limit=200)[0]
    tail += integrate.quad(kneg, 0.0, np.inf, limit=200)[0]
    return direct + tail, tail


def lemma1_constant(s: complex, N: int, zeros, T: float) -> float:
    """Lorentz sum over zeros divided by |A_N(s)| + log T."""
    s = complex(s)
    val, _ = lorentz_sum(s, zeros)
    a = abs(eval_poly(PolySpec(PolyKind.A, N, s.real - 0.5), s.imag))
    return val / (a + math.log(T))


def fejer(v, params: FejerParams):
    """F(v) = (sin(pi Delta v)/(pi Delta v))^2; complex arguments allowed."""
    d = params.delta_cap
    v = np.asarray(v)
    if np.iscomplexobj(v):
        x = math.pi * d * v
        safe = np.where(x == 0, 1.0, x)
        out = np.where(x == 0, 1.0, (np.sin(safe) / safe) ** 2)
    else:
        out = np.sinc(d * v) ** 2
    return out[()] if out.ndim == 0 else out


def fejer_hat(x, params: FejerParams):
    """Fourier transform of F: (1/Delta)(1 - |x|/Delta) on |x| < Delta, 0 beyond."""
    d = params.delta_cap
    x = np.abs(np.asarray(x, dtype=float))
    out = np.where(x < d, (1.0 - x / d) / d, 0.0)
    return float(out) if out.ndim == 0 else out


def _core_integral(fn, t, d, K):
    """Integral of F(v) fn(t+v) over [-K/d, K/d] by Gauss-Legendre on each lobe.

    Returns (value, error estimate from two rule orders).
    """
    edges = np.arange(-K, K + 1) / d
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 / d
    out = []
    for x, w in (_GL_LO, _GL_HI):
        v = (mid[:, None] + half * x[None, :]).ravel()
        vals = np.sinc(d * v) ** 2 * fn(t + v)
        out.append(half * float(np.sum(vals.reshape(mid.size, -1) @ w)))
    return out[1], abs(out[1] - out[0])


def _tail_integral(fn, t, d, W, sign):
    """Integral of F(v) fn(t + sign*v) over v in [W, inf) using the cosine weight.

    F(v) = (1 - cos(2 pi d v)) / (2 pi^2 d^2 v^2).
    """
    c = 2.0 * math.pi**2 * d * d

    def g(v):
        return float(fn(t + sign * v)) / (c * v * v)

    smooth, e1 = integrate.quad(g, W, np.inf, limit=200)
    osc, e2 = integrate.quad(g, W, np.inf, weight="cos", wvar=2.0 * math.pi * d, limlst=100)
    return smooth - osc, e1 + e2


def _segment_integral(fn, t, d, v0, v1):
    """Integral of F(v) fn(t+v) over a segment away from v = 0."""
    c = 2.0 * math.pi**2 * d * d

    def g(v):
        return float(fn(t + v)) / (c * v * v)

    smooth, e1 = integrate.quad(g, v0, v1, limit=400)
    osc, e2 = integrate.quad(g, v0, v1, weight="cos", wvar=2.0 * math.pi * d, limit=400)
    return smooth - osc, e1 + e2


@dataclass(frozen=True)
class ExplicitFormulaSides:
    zero_side: float
    arithmetic_side: float
    truncation_bound: float
    weil_residual: float
    tail_error: float

    def __iter__(self):
        # unpacks as the documented triple
        return iter((self.zero_side, self.arithmetic_side, self.truncation_bound))


def prime_side(t: float, params: FejerParams, n_max: int = N_MAX_DEFAULT) -> float:
    """(1/2pi) sum Lambda(n)/sqrt(n) (F^(log n/2pi) + F^(-log n/2pi)) cos(t log n)."""
    d = params.delta_cap
    if 2.0 * math.pi * d > math.log(n_max):
        raise ConstraintError(f"2 pi Delta = {2 * math.pi * d:.3f} exceeds log n_max = {math.log(n_max):.3f}")
    cap = min(int(math.exp(2.0 * math.pi * d)) + 1, n_max)
    n, lam = von_mangoldt_table(n_max).prime_powers(cap)
    logn = np.log(n.astype(float))
    fh = fejer_hat(logn / (2.0 * math.pi), params)
    return float(np.sum(lam / np.sqrt(n) * 2.0 * fh * np.cos(t * logn)) / (2.0 * math.pi))


def explicit_formula_sides(
    t: float,
    params: FejerParams,
    zeros,
    *,
    window=None,
    n_max: int = N_MAX_DEFAULT,
) -> ExplicitFormulaSides:
    """Both sides of the Fejer-kernel explicit formula at height ``t``.

    zero_side: sum of F(gamma - t) over all ordinates (stored ones exactly,
    the rest, including the negative ordinates, by the density integral).
    arithmetic_side: (1/2pi) integral of F(u-t) Re psi(1/4 + iu/2) du minus
    the prime sum.  The identity holds up to O(e^{pi Delta/2} t^-2 + 1/Delta),
    whose constant is taken as EF_CONSTANT; ``weil_residual`` is what
    remains once that term is made exact (-log pi/(2 pi Delta) + h(i/2) + h(-i/2)),
    and should be of the size of ``tail_error``.
    """
    d = params.delta_cap
    g = ordinates(zeros)
    if g.size == 0:
        raise CoverageError("empty zero list")
    if window is None:
        h = 0.5 * mean_gap(max(g[0], 10.0))
        window = (g[0] - h, g[-1] + h)
    lo, hi = window
    if lo > t - W_MIN or hi < t + W_MIN:
        raise CoverageError(f"zeros cover [{lo}, {hi}], need [{t - W_MIN}, {t + W_MIN}]")
    psum = prime_side(t, params, n_max)

    # zero side
    direct = float(np.sum(fejer(g - t, params)))
    tail = 0.0
    tail_q = 0.0
    v_lo, v_hi = lo - t, hi - t
    val, err = _tail_integral(zero_density, t, d, v_hi, +1)
    tail, tail_q = tail + val, tail_q + err
    if lo > 0:
        val, err = _segment_integral(zero_density, t, d, -t, v_lo)
        tail, tail_q = tail + val, tail_q + err
    # negative ordinates: F(-u - t) with u > 0, i.e. v = -u - t <= -t
    val, err = _tail_integral(lambda u: zero_density(-u), t, d, t, -1)
    tail, tail_q = tail + val, tail_q + err
    zero_side = direct + tail
    # |sum F(gamma - t) - integral| beyond the cut is at most S_BOUND times
    # (envelope at the cut + total variation of F beyond it), on each side
    W = min(t - lo, hi - t)
    env = 1.0 / (math.pi * d * W) ** 2
    tail_error = 2.0 * S_BOUND * (env + 2.0 / (math.pi**2 * d * W)) + tail_q

    # archimedean side: core lobes on [-K/d, K/d] plus two QAWF tails
    K = int(math.ceil(W * d))
    core, core_err = _core_integral(_gamma_density, t, d, K)
    Wc = K / d
    r1, e1 = _tail_integral(_gamma_density, t, d, Wc, +1)
    r2, e2 = _tail_integral(_gamma_density, t, d, Wc, -1)
    gamma_int = core + r1 + r2
    quad_err = core_err + e1 + e2
    arithmetic_side = gamma_int - psum

    big_o = EF_CONSTANT * (math.exp(math.pi * d / 2.0) / (t * t) + 1.0 / d)
    bound = big_o + tail_error + quad_err
    exact = -math.log(math.pi) / (2.0 * math.pi * d) + 2.0 * float(np.real(fejer(0.5j - t, params)))
    weil = zero_side - (arithmetic_side + exact)
    return ExplicitFormulaSides(zero_side, arithmetic_side, bound, weil, tail_error + quad_err)


def moment(spec: PolySpec, ordinates_, k: int, T: float | None = None, n_max: int = N_MAX_DEFAULT) -> float:
    """Sum over ordinates of |poly(1/2 + offset + i gamma)|^{2k}.

    ``T`` defaults to the smallest ordinate; N^k must not exceed sqrt(T).
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    g = ordinates(ordinates_)
    if g.size == 0:
        return 0.0
    T = float(g[0]) if T is None else T
    if float(spec.N) ** k > math.sqrt(T):
        raise ConstraintError(f"N^k = {spec.N}^{k} exceeds sqrt(T) = {math.sqrt(T):.3f}")
    vals = np.abs(eval_poly(spec, g, n_max))
    return float(np.sum(vals ** (2 * k)))


def moment_ratio(spec: PolySpec, ordinates_, k: int, T: float) -> float:
    """moment / (T log T (log N)^{2k} k^k), for inspecting bounded growth."""
    m = moment(spec, ordinates_, k, T)
    return m / (T * math.log(T) * math.log(spec.N) ** (2 * k) * k**k)
