"""Critical-line zeros of zeta and the exact counting function N(T).

Zeros are located by sign changes of Hardy's Z on a grid finer than an
eighth of the mean gap, refined to brackets of width <= 1e-11, and the
count in every shard is checked against N(b) - N(a) computed from the
argument principle.  A mismatch halves the grid step and rescans.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import contour
from .errors import CompletenessError, ConsistencyError, DomainError, NearZeroError
from .zeta_eval import (
    DEFAULT_ACCURACY,
    T_MAX,
    eval_line,
    eval_many,
    hardy_Z_line,
    hardy_Z_many,
    riemann_siegel_theta,
)

NEAR_ZERO = 1e-6
BRACKET_TOL = 1e-11
RESIDUAL_MAX = 1e-9
STEP_DIVISOR = 8
MAX_RETRIES = 4
SHARD_LENGTH = 250.0


@dataclass(frozen=True)
class ZetaZero:
    gamma: float
    index: int
    refinement_residual: float


def mean_gap(t: float) -> float:
    """Average spacing 2*pi/log(t/2*pi) of ordinates near height t."""
    return 2.0 * math.pi / max(math.log(t / (2.0 * math.pi)), 0.25)


FIRST_ORDINATE = 14.134725141734693


def covers(g: np.ndarray, lo: float, hi: float) -> bool:
    """Whether sorted ordinates g span [lo, hi]; a list starting at the first ordinate covers any lo."""
    if g.size == 0:
        return False
    return (g[0] <= lo or g[0] <= FIRST_ORDINATE + 1e-6) and g[-1] >= hi


def ordinates(zeros) -> np.ndarray:
    """Ordinates of a list of ZetaZero (or any float sequence) as an array."""
    if isinstance(zeros, np.ndarray):
        return zeros.astype(float, copy=False)
    return np.array([z.gamma if isinstance(z, ZetaZero) else float(z) for z in zeros], dtype=float)


def _arg_zeta_half(T: float, accuracy: float = DEFAULT_ACCURACY) -> float:
    """Continuous arg zeta(1/2 + iT), varied from sigma = 2 (where Re zeta > 0)."""
    n = 33
    z0 = complex(2.0, T)
    step = complex(-1.5 / (n - 1), 0.0)
    f = eval_line(z0, step, n, accuracy)[0]
    z = z0 + step * np.arange(n)
    edge = np.zeros(n, dtype=np.int64)

    def zeta_on(points):
        return eval_many(points, accuracy, deriv=False)[0]

    z, f, edge, amb = contour.refine(z, f, edge, zeta_on, [1.5])
    if amb.size:
        raise NearZeroError(f"cannot track arg zeta near height {T}")
    return float(np.angle(f[0]) + contour.edge_arg_changes(f, edge, 1)[0])


def _near_ordinate(T: float, radius: float = NEAR_ZERO, accuracy: float = DEFAULT_ACCURACY) -> bool:
    if T < 14.0:
        return False  # first ordinate is 14.1347...
    zs = hardy_Z_many(np.array([T - radius, T, T + radius]), accuracy)
    return bool(zs[1] == 0.0 or np.sign(zs[0]) != np.sign(zs[2]))


def count_zeros(T: float, accuracy: float = DEFAULT_ACCURACY) -> int:
    """N(T): number of zeros with 0 < gamma <= T, via theta(T)/pi + 1 + S(T)."""
    if not T >= 10.0:
        raise DomainError("count_zeros needs T >= 10")
    if T > T_MAX:
        raise DomainError(f"T exceeds T_max = {T_MAX}")
    if _near_ordinate(T, accuracy=accuracy):
        raise NearZeroError(f"T = {T} lies within {NEAR_ZERO} of an ordinate")
    val = riemann_siegel_theta(T) / math.pi + 1.0 + _arg_zeta_half(T, accuracy) / math.pi
    n = round(val)
    if abs(val - n) > 0.1:
        raise ConsistencyError(f"N({T}) evaluated to non-integral {val}")
    return int(n)


def _safe_height(T: float, direction: float, accuracy: float = DEFAULT_ACCURACY) -> float:
    """T itself, or a nearby height at least NEAR_ZERO from every ordinate."""
    k = 0
    if T < 14.0:
        return T
    while _near_ordinate(T + direction * 3.0 * NEAR_ZERO * k, accuracy=accuracy):
        k += 1
    return T + direction * 3.0 * NEAR_ZERO * k


def _refine_brackets(a, b, za, zb, accuracy: float = DEFAULT_ACCURACY):
    """Shrink sign-change brackets to width <= BRACKET_TOL.

    Anderson-Bjorck steps move the estimate; a symmetric probe of half-width
    0.45*BRACKET_TOL certifies the bracket once the estimate is close.
    """
    a = a.copy()
    b = b.copy()
    fa = za.copy()
    fb = zb.copy()
    for _ in range(60):
        width = np.abs(b - a)
        live = width > BRACKET_TOL
        if not live.any():
            break
        i = np.flatnonzero(live)
        c = b[i] - fb[i] * (b[i] - a[i]) / (fb[i] - fa[i])
        lo = np.minimum(a[i], b[i])
        hi = np.maximum(a[i], b[i])
        inside = (c > lo) & (c < hi) & np.isfinite(c)
        c = np.where(inside, c, 0.5 * (a[i] + b[i]))
        fc = hardy_Z_many(c, accuracy)
        # probe c +- 0.45 tol only once the secant says the zero is that close
        slope = np.abs((fb[i] - fa[i]) / (b[i] - a[i]))
        near = np.abs(fc) < 0.5 * BRACKET_TOL * slope
        cert = np.zeros(c.size, dtype=bool)
        if near.any():
            cn = c[near]
            probe = np.concatenate((cn - 0.45 * BRACKET_TOL, cn + 0.45 * BRACKET_TOL))
            fp = hardy_Z_many(probe, accuracy)
            n = cn.size
            ok = np.signbit(fp[:n]) != np.signbit(fp[n:])
            cert[np.flatnonzero(near)[ok]] = True
            j = i[near][ok]
            a[j], b[j] = probe[:n][ok], probe[n:][ok]
            fa[j], fb[j] = fp[:n][ok], fp[n:][ok]
        # Anderson-Bjorck update for the rest
        k = ~cert
        j = i[k]
        ck, fck = c[k], fc[k]
        flip = np.sign(fck) != np.sign(fb[j])
        fa_new = np.where(flip, fb[j], fa[j] * np.where(1 - fck / fb[j] > 0, 1 - fck / fb[j], 0.5))
        a_new = np.where(flip, b[j], a[j])
        exact = fck == 0.0
        a[j] = np.where(exact, ck, a_new)
        fa[j] = np.where(exact, 0.0, fa_new)
        b[j] = ck
        fb[j] = fck
    if np.any(np.abs(b - a) > BRACKET_TOL):
        raise ConsistencyError("bracket refinement did not converge")
    return 0.5 * (a + b)


def _scan_shard(a, b, expected, index0, step_divisor, max_retries, accuracy=DEFAULT_ACCURACY):
    h = mean_gap(b) / step_divisor
    for _ in range(max_retries + 1):
        count = max(int(math.ceil((b - a) / h)), 2) + 1
        hs = (b - a) / (count - 1)
        z = hardy_Z_line(a, hs, count, accuracy)
        sa = np.signbit(z)
        idx = np.flatnonzero(sa[:-1] != sa[1:])
        if idx.size == expected:
            if expected == 0:
                return []
            t = a + hs * np.arange(count)
            gam = _refine_brackets(t[idx], t[idx + 1], z[idx], z[idx + 1], accuracy)
            res = np.abs(hardy_Z_many(gam, accuracy))
            if np.any(res > RESIDUAL_MAX):
                raise ConsistencyError(f"residual |Z| = {res.max():.3g} above {RESIDUAL_MAX}")
            if expected > 1 and np.min(np.diff(gam)) <= 1e-9:
                raise ConsistencyError("refined ordinates not separated by 1e-9")
            return [ZetaZero(float(g), index0 + k + 1, float(r)) for k, (g, r) in enumerate(zip(gam, res))]
        if idx.size > expected:
            raise ConsistencyError(f"{idx.size} sign changes but N difference {expected} on ({a}, {b}]")
        h *= 0.5
    raise CompletenessError(
        f"found fewer than the {expected} zeros N predicts on ({a}, {b}] after {max_retries} step halvings"
    )


def find_zeta_zeros(
    t_lo: float,
    t_hi: float,
    *,
    threads: int = 1,
    step_divisor: int = STEP_DIVISOR,
    max_retries: int = MAX_RETRIES,
    shard_length: float = SHARD_LENGTH,
    accuracy: float = DEFAULT_ACCURACY,
) -> list[ZetaZero]:
    """All critical-line zeros with t_lo < gamma <= t_hi, completeness-checked.

    The window is cut into shards of fixed length (independent of
    ``threads``, so results do not depend on it); each shard is scanned and
    its count checked against N independently.
    """
    if not (10.0 <= t_lo <= t_hi <= T_MAX):
        raise DomainError(f"need 10 <= t_lo <= t_hi <= {T_MAX}, got ({t_lo}, {t_hi}]")
    if t_lo == t_hi:
        return []
    a = _safe_height(t_lo, -1.0, accuracy)
    b = _safe_height(t_hi, +1.0, accuracy)
    nshard = max(1, int(math.ceil((b - a) / shard_length)))
    cuts = [a] + [_safe_height(a + (b - a) * k / nshard, +1.0, accuracy) for k in range(1, nshard)] + [b]
    cuts = sorted(set(cuts))

    def shard(k):
        lo, hi = cuts[k], cuts[k + 1]
        return _scan_shard(lo, hi, counts[k + 1] - counts[k], counts[k], step_divisor, max_retries, accuracy)

    def count(T):
        return count_zeros(T, accuracy)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            counts = list(ex.map(count, cuts))
            parts = list(ex.map(shard, range(len(cuts) - 1)))
    else:
        counts = [count(T) for T in cuts]
        parts = [shard(k) for k in range(len(cuts) - 1)]
    zeros = [z for part in parts for z in part]
    return [z for z in zeros if t_lo < z.gamma <= t_hi]
