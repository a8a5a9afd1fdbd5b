"""Empirical gap statistics over a window (T, 2T].

Curves are normalized by the population of the window rather than by the
asymptotic T log T / 2 pi, so that m(eps) tends to 1 at finite height.
Every count is an exact integer count; the quadratic brute-force versions
in the tests must reproduce them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CoverageError, DomainError, InsufficientDataError
from .zeros import ordinates
from .zeta_eval import riemann_siegel_theta


@dataclass(frozen=True)
class DistributionCurve:
    epsilon_grid: np.ndarray
    values: np.ndarray
    window_T: float
    population: int
    counts: np.ndarray = field(default=None, repr=False)
    statistic: str = "m"


@dataclass(frozen=True)
class PairCorrelationHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    expected_density: np.ndarray
    population: int

    @property
    def density(self) -> np.ndarray:
        """counts per zero per unit of u, directly comparable to expected_density."""
        if self.population == 0:
            return np.zeros(self.counts.size)
        return self.counts / (self.population * np.diff(self.bin_edges))


def epsilon_grid(eps_min: float, eps_max: float, points: int) -> np.ndarray:
    """Geometric grid of ``points`` values from eps_min to eps_max."""
    if not (0 < eps_min < eps_max) or points < 2:
        raise DomainError("need 0 < eps_min < eps_max and at least 2 points")
    return np.geomspace(eps_min, eps_max, points)


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(g <= 0) or np.any(g > 32) or np.any(np.diff(g) <= 0):
        raise DomainError("grid must be strictly increasing within (0, 32]")
    return g


def window_mask(g: np.ndarray, T: float, mult: float = 2.0) -> np.ndarray:
    """Ordinates in the half-open window (T, mult*T]."""
    return (g > T) & (g <= mult * T)


def smooth_count(T: float, mult: float = 2.0) -> int:
    """(theta(mult T) - theta(T))/pi rounded: the expected count of ordinates in the window."""
    return int(round((riemann_siegel_theta(mult * T) - riemann_siegel_theta(T)) / math.pi))


def _curve(stat: np.ndarray, grid: np.ndarray, T: float, population: int, name: str) -> DistributionCurve:
    s = np.sort(stat)
    # w is the indicator of [0, 1], closed at 1: stat <= eps counts
    counts = np.searchsorted(s, grid, side="right")
    values = counts / population if population else np.zeros(grid.size)
    return DistributionCurve(grid, values, float(T), int(population), counts, name)


def empirical_m(zeros, T: float, grid, mult: float = 2.0) -> DistributionCurve:
    """Fraction of ordinates gamma in (T, mult*T] with (gamma+ - gamma) log T <= eps."""
    grid = _check_grid(grid)
    g = ordinates(zeros)
    inside = np.flatnonzero(window_mask(g, T, mult))
    if inside.size == 0:
        return _curve(np.empty(0), grid, T, 0, "m")
    if inside[-1] + 1 >= g.size:
        raise CoverageError(f"no successor for the last ordinate below {mult * T}")
    gaps = (g[inside + 1] - g[inside]) * math.log(T)
    return _curve(gaps, grid, T, inside.size, "m")


def empirical_m_prime(zprimes, T: float, grid, mult: float = 2.0, population: int | None = None) -> DistributionCurve:
    """Normalized count of zeta' zeros in the window with (beta' - 1/2) log T <= eps.

    ``population`` is the number of zeta zeros in the window; without it the
    smooth count from theta is used.  On-line-coincident zeros enter with
    statistic 0.
    """
    grid = _check_grid(grid)
    zp = [z for z in zprimes if T < z.gamma_prime <= mult * T]
    stat = np.array(
        [0.0 if z.on_line_coincident else max(z.beta_prime - 0.5, 0.0) * math.log(T) for z in zp], dtype=float
    )
    if population is None:
        population = smooth_count(T, mult) if zp else 0
    return _curve(stat, grid, T, population, "m_prime")


def gue_density(u):
    """1 - (sin(pi u)/(pi u))^2."""
    return 1.0 - np.sinc(np.asarray(u, dtype=float)) ** 2


def _gue_bin_means(edges: np.ndarray) -> np.ndarray:
    x, w = np.polynomial.legendre.leggauss(20)
    lo, hi = edges[:-1], edges[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    vals = gue_density(mid[:, None] + half[:, None] * x[None, :])
    return (vals @ w) * 0.5


def pair_correlation(zeros, T: float, u_max: float = 2.0, bins: int = 16, mult: float = 2.0) -> PairCorrelationHistogram:
    """Histogram of u = (gamma1 - gamma2) log T / 2 pi over pairs gamma2 < gamma1 in the window.

    Bin k is the half-open interval (edge_k, edge_k+1].
    """
    if not (0 < u_max <= 4) or bins < 8:
        raise DomainError("need 0 < u_max <= 4 and bins >= 8")
    g = ordinates(zeros)
    if g.size and (g[0] > T or g[-1] < mult * T):
        # the window itself is all that is used, but it must be fully present
        raise CoverageError(f"zeros [{g[0]}, {g[-1]}] do not cover ({T}, {mult * T}]")
    w = g[window_mask(g, T, mult)]
    edges = np.linspace(0.0, u_max, bins + 1)
    scale = math.log(T) / (2.0 * math.pi)
    counts = np.zeros(bins, dtype=np.int64)
    if w.size > 1:
        hi_idx = np.searchsorted(w, w + u_max / scale, side="right")
        for lag in range(1, int(np.max(hi_idx - np.arange(w.size)))):
            d = (w[lag:] - w[:-lag]) * scale
            d = d[(d > 0) & (d <= u_max)]
            k = np.searchsorted(edges, d, side="left") - 1
            counts += np.bincount(k, minlength=bins)[:bins]
    return PairCorrelationHistogram(edges, counts, _gue_bin_means(edges), int(w.size))


def band_density(hist: PairCorrelationHistogram, lo: float, hi: float) -> float:
    """Pair density over the union of bins inside [lo, hi]."""
    e = hist.bin_edges
    sel = (e[:-1] >= lo - 1e-12) & (e[1:] <= hi + 1e-12)
    if not sel.any() or hist.population == 0:
        return 0.0
    return float(hist.counts[sel].sum() / (hist.population * (e[1:][sel] - e[:-1][sel]).sum()))


def window_tail(zeros, T: float, threshold: float, mult: float = 2.0) -> float:
    """Fraction of gamma in the window whose interval (gamma - h, gamma + h], h = 2 pi/log T,
    holds more than ``threshold`` ordinates."""
    g = ordinates(zeros)
    idx = np.flatnonzero(window_mask(g, T, mult))
    if idx.size == 0:
        return 0.0
    h = 2.0 * math.pi / math.log(T)
    c = g[idx]
    if g[0] > c[0] - h or g[-1] < c[-1] + h:
        raise CoverageError("zero list does not cover the short windows at the edges")
    n = np.searchsorted(g, c + h, side="right") - np.searchsorted(g, c - h, side="right")
    return float(np.mean(n > threshold))


def default_fit_range(curve: DistributionCurve) -> tuple[float, float]:
    """One decade centered (geometrically) in the part of the grid where 0 < value < 0.5."""
    e = curve.epsilon_grid[(curve.values > 0) & (curve.values < 0.5)]
    if e.size == 0:
        raise InsufficientDataError("no grid point with 0 < value < 0.5")
    lo, hi = float(e[0]), float(e[-1])
    if hi / lo <= 10.0:
        return lo, hi
    c = math.sqrt(lo * hi)
    return c / math.sqrt(10.0), c * math.sqrt(10.0)


def scaling_fit(curve: DistributionCurve, fit_range=None) -> tuple[float, float]:
    """Least-squares slope of log(value) on log(eps) over ``fit_range``; returns (exponent, r^2)."""
    lo, hi = default_fit_range(curve) if fit_range is None else fit_range
    e = curve.epsilon_grid
    sel = (e >= lo * (1 - 1e-12)) & (e <= hi * (1 + 1e-12)) & (curve.values > 0)
    if sel.sum() < 5:
        raise InsufficientDataError(f"only {int(sel.sum())} positive grid points in [{lo}, {hi}]")
    x = np.log(e[sel])
    y = np.log(curve.values[sel])
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return float(slope), r2


def gonek_sum(x: tuple[int, int], zeros, T: float | None = None, mult: float = 2.0) -> complex:
    """Sum of (a/b)^{i gamma} over the ordinates (restricted to the window if T is given)."""
    a, b = x
    if a <= 0 or b <= 0:
        raise DomainError("x must be a positive rational a/b")
    g = ordinates(zeros)
    if T is not None:
        g = g[window_mask(g, T, mult)]
    if a == b:
        return complex(g.size, 0.0)
    return complex(np.sum(np.exp(1j * g * math.log(a / b))))
