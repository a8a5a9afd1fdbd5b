"""Zeros of zeta' in the strip right of the critical line, and the rho_c pairing.

The strip (1/2 - 0.05, sigma_max] x (t_lo, t_hi] is cut into boxes of about
half a mean gap in height.  Box edges are shared, so each edge is sampled
and argument-tracked once; the winding number of zeta' around a box counts
its zeros.  A box winding once is seeded with the contour moment
(1/2 pi i) * integral of z d(log zeta'), which for a single zero is the zero
itself, and polished by Newton with a central-difference derivative.  Boxes
winding more than once, or whose Newton iterate escapes, are bisected.
Every zero is finally certified by a winding count of 1 on a small circle.

The left edge sits at 1/2 - 0.05 rather than at 1/2: zeta' has no zeros
with sigma < 1/2 (under RH), so nothing is lost, and a zero with beta'
extremely close to 1/2 never lies near a box edge.
"""

from __future__ import annotations

import bisect
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import contour
from .errors import CertificationError, ConsistencyError, CoverageError, DomainError, WindingAmbiguityError
from .zeros import ZetaZero, covers, mean_gap, ordinates
from .zeta_eval import DEFAULT_ACCURACY, T_MAX, eval_line, eval_many

SIGMA_LEFT = 0.45
SIGMA_MAX_DEFAULT = 6.0
NEWTON_TOL = 1e-10
RESIDUAL_MAX = 1e-9
FD_STEP = 1e-5
CERT_RADIUS = 1e-5
CERT_POINTS = 12
MAX_SUBDIVISIONS = 40
JITTER = 1e-7
ON_LINE_TOL = 1e-8
SHARD_LENGTH = 50.0
GUARD_GAPS = 10.0

# horizontal edges are sampled densely near the critical line, where
# log zeta' varies on the scale 1/log t, and sparsely further right
_SIGMA_NODES = np.array([0.0, 0.05, 0.1, 0.17, 0.25, 0.35, 0.5, 0.7, 0.95, 1.3, 1.8, 2.5, 3.5, 4.5, 5.55])


@dataclass(frozen=True)
class ZPrimeZero:
    beta_prime: float
    gamma_prime: float
    newton_residual: float
    box_id: int
    on_line_coincident: bool = False

    @property
    def point(self) -> complex:
        return complex(self.beta_prime, self.gamma_prime)


@dataclass(frozen=True)
class PairingRecord:
    zprime: ZPrimeZero
    rho_c_gamma: float
    dist: float
    gap_up: float
    gap_down: float
    gap_nearest: float
    log_T: float


def _dzeta_at(accuracy: float):
    def f(points):
        return eval_many(points, accuracy)[1]

    return f


_dzeta = _dzeta_at(DEFAULT_ACCURACY)


def _sigma_nodes(sigma_max: float) -> np.ndarray:
    width = sigma_max - SIGMA_LEFT
    nodes = SIGMA_LEFT + _SIGMA_NODES[_SIGMA_NODES < width]
    return np.append(nodes, sigma_max)


def _newton(z0: np.ndarray, dzeta=_dzeta) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Newton on zeta' with derivative (f(z+h) - f(z-h))/2h.

    Returns (roots, |zeta'(root)|); entries that fail to converge are nan.
    """
    z = z0.astype(complex).copy()
    res = np.full(z.size, np.inf)
    live = np.ones(z.size, dtype=bool)
    for _ in range(40):
        i = np.flatnonzero(live)
        if i.size == 0:
            break
        zi = z[i]
        f = dzeta(np.concatenate((zi, zi + FD_STEP, zi - FD_STEP)))
        n = zi.size
        f0, fp, fm = f[:n], f[n : 2 * n], f[2 * n :]
        res[i] = np.abs(f0)
        done = res[i] <= NEWTON_TOL
        d1 = (fp - fm) / (2.0 * FD_STEP)
        step = np.where(done, 0.0, f0 / d1)
        z[i] = zi - step
        # converged when the residual is tiny or the step is at the rounding floor
        floor = 4e-16 * np.maximum(np.abs(zi), 1.0)
        stop = done | (np.abs(step) <= floor) | ~np.isfinite(step)
        live[i[stop]] = False
    if live.any():
        z[live] = np.nan
    fin = np.isfinite(z)
    res[fin] = np.abs(dzeta(z[fin]))
    res[~fin] = np.inf
    return z, res


def _circle_windings(centers: np.ndarray, radius: float = CERT_RADIUS, dzeta=_dzeta) -> np.ndarray:
    """Winding number of zeta' around small circles about each center."""
    k = CERT_POINTS
    u = np.exp(2j * np.pi * np.arange(k + 1) / k)
    z = (centers[:, None] + radius * u[None, :]).ravel()
    edge = np.repeat(np.arange(centers.size), k + 1)
    f = dzeta(z)
    # refinement on a circle is done along the chords, which is just as valid
    z, f, edge, amb = contour.refine(z, f, edge, dzeta, np.full(centers.size, 2 * np.pi * radius))
    total = contour.edge_arg_changes(f, edge, centers.size) / (2 * np.pi)
    w = np.rint(total).astype(int)
    w[np.abs(total - w) > 0.1] = -999
    w[amb] = -999
    return w


def _box_contour(sa, sb, ta, tb, dzeta=_dzeta, samples=12):
    """(winding, moment/(2 pi i)) of zeta' around the rectangle [sa, sb] x [ta, tb]."""
    verts = np.array([complex(sa, ta), complex(sb, ta), complex(sb, tb), complex(sa, tb), complex(sa, ta)])
    u = np.linspace(0.0, 1.0, samples + 1)
    z = np.concatenate([a + (b - a) * u for a, b in zip(verts[:-1], verts[1:])])
    edge = np.repeat(np.arange(4), samples + 1)
    f = dzeta(z)
    z, f, edge, amb = contour.refine(z, f, edge, dzeta, np.abs(np.diff(verts)))
    if amb.size:
        return None, None
    total = contour.edge_arg_changes(f, edge, 4).sum() / (2 * np.pi)
    w = round(total)
    if abs(total - w) > 0.1:
        return None, None
    mom = contour.edge_log_moments(z, f, edge, 4).sum() / (2j * np.pi)
    return int(w), complex(mom)


def _inside(z, sa, sb, ta, tb, tol=1e-9):
    return sa - tol <= z.real <= sb + tol and ta - tol <= z.imag <= tb + tol


class _Ambiguous(Exception):
    pass


def _solve_box(sa, sb, ta, tb, depth, box_id, dzeta=_dzeta):
    """All zeros in one box by winding count, Newton and bisection.

    Raises _Ambiguous when the box boundary itself is unresolvable, so the
    caller can move the cut that produced it.
    """
    w, mom = _box_contour(sa, sb, ta, tb, dzeta)
    if w is None:
        raise _Ambiguous
    if w < 0:
        raise ConsistencyError(f"negative winding {w} around a box of an entire function")
    if w == 0:
        return []
    if w == 1:
        root, res = _newton(np.array([mom]), dzeta)
        r = root[0]
        if np.isfinite(r) and res[0] <= RESIDUAL_MAX and _inside(r, sa, sb, ta, tb):
            return [(complex(r), float(res[0]), box_id)]
    if depth >= MAX_SUBDIVISIONS:
        raise WindingAmbiguityError(f"box around {complex(sa, ta)} unresolved after {depth} subdivisions")
    # bisect the longer side slightly off-center; if a half turns out
    # ambiguous, the cut is moved by JITTER and the halves are redone
    along_t = (tb - ta) >= 0.5 * (sb - sa)
    lo, hi = (ta, tb) if along_t else (sa, sb)
    base = lo + 0.4812 * (hi - lo)
    for shift in (0.0, JITTER, -JITTER):
        cut = base + shift
        if along_t:
            parts = [(sa, sb, ta, cut), (sa, sb, cut, tb)]
        else:
            parts = [(sa, cut, ta, tb), (cut, sb, ta, tb)]
        try:
            out = [r for p in parts for r in _solve_box(*p, depth + 1, box_id, dzeta)]
        except _Ambiguous:
            continue
        if len(out) != w:
            raise ConsistencyError(f"box winding {w} but its halves yield {len(out)} zeros")
        return out
    raise WindingAmbiguityError(f"cut near {base} in box around {complex(sa, ta)} stays ambiguous after jitter")


def _shard(t_a: float, t_b: float, sigma_max: float, box_height: float, box0: int, accuracy: float):
    """Zeros of zeta' with t_a < t <= t_b; returns list of (root, residual, box_id)."""
    dzeta = _dzeta_at(accuracy)
    nb = max(1, int(math.ceil((t_b - t_a) / box_height)))
    q = 8  # samples per vertical edge at start
    K = nb * q + 1
    ht = (t_b - t_a) / (K - 1)
    cuts = t_a + ht * q * np.arange(nb + 1)
    cuts[-1] = t_b
    nodes = _sigma_nodes(sigma_max)
    ns = nodes.size

    # edge ids: horizontals 0..nb, left verticals nb+1.., right verticals 2nb+1..
    n_edges = 3 * nb + 1
    zh = (nodes[None, :] + 1j * cuts[:, None]).ravel()
    eh = np.repeat(np.arange(nb + 1), ns)
    fh = dzeta(zh)
    z_line = complex(SIGMA_LEFT, t_a) + 1j * ht * np.arange(K)
    f_left = eval_line(complex(SIGMA_LEFT, t_a), complex(0.0, ht), K, accuracy)[1]
    f_right = eval_line(complex(sigma_max, t_a), complex(0.0, ht), K, accuracy)[1]
    idx = (np.arange(nb)[:, None] * q + np.arange(q + 1)[None, :]).ravel()
    ev = np.repeat(np.arange(nb), q + 1)
    zl = z_line[idx]
    zr = zl + (sigma_max - SIGMA_LEFT)
    z = np.concatenate((zh, zl, zr))
    f = np.concatenate((fh, f_left[idx], f_right[idx]))
    edge = np.concatenate((eh, nb + 1 + ev, 2 * nb + 1 + ev))
    lengths = np.concatenate((np.full(nb + 1, sigma_max - SIGMA_LEFT), np.diff(cuts), np.diff(cuts)))
    z, f, edge, amb = contour.refine(z, f, edge, dzeta, lengths)

    darg = contour.edge_arg_changes(f, edge, n_edges)
    mom = contour.edge_log_moments(z, f, edge, n_edges)
    j = np.arange(nb)
    H, L, R = j, nb + 1 + j, 2 * nb + 1 + j
    wind = (darg[H] + darg[R] - darg[H + 1] - darg[L]) / (2 * np.pi)
    seed = (mom[H] + mom[R] - mom[H + 1] - mom[L]) / (2j * np.pi)
    w = np.rint(wind).astype(int)
    bad = np.abs(wind - w) > 0.1
    ambiguous = set(int(e) for e in amb)
    if ambiguous & set(range(nb + 1, 3 * nb + 1)):
        raise WindingAmbiguityError(f"a zero of zeta' lies on the strip boundary near t in ({t_a}, {t_b}]")
    if ambiguous & {0, nb}:
        raise WindingAmbiguityError(f"a zero of zeta' lies on a shard boundary in ({t_a}, {t_b}]")
    for e in ambiguous:
        bad[e - 1] = bad[e] = True

    roots = []
    simple = np.flatnonzero((w == 1) & ~bad)
    r, res = _newton(seed[simple], dzeta)
    retry = set(int(k) for k in np.flatnonzero((w > 1) | bad))
    for k, rk, rs in zip(simple, r, res):
        if np.isfinite(rk) and rs <= RESIDUAL_MAX and _inside(rk, SIGMA_LEFT, sigma_max, cuts[k], cuts[k + 1]):
            roots.append((complex(rk), float(rs), box0 + int(k)))
        else:
            retry.add(int(k))
    if np.any(w[~bad] < 0):
        raise ConsistencyError("negative winding number for zeta'")
    # boxes sharing an ambiguous edge are solved as one merged box
    k = 0
    retry = sorted(retry)
    while k < len(retry):
        j = k
        while j + 1 < len(retry) and retry[j + 1] == retry[j] + 1 and retry[j + 1] in ambiguous:
            j += 1
        a, b = retry[k], retry[j] + 1
        try:
            roots.extend(_solve_box(SIGMA_LEFT, sigma_max, cuts[a], cuts[b], 1, box0 + a, dzeta))
        except _Ambiguous:
            raise WindingAmbiguityError(f"box ({cuts[a]}, {cuts[b]}] has an unresolvable boundary") from None
        k = j + 1
    expected = int(w[~bad].sum())
    found_plain = sum(1 for rt in roots if not bad[rt[2] - box0])
    if found_plain != expected:
        raise ConsistencyError(f"winding total {expected} but {found_plain} zeros found in ({t_a}, {t_b}]")
    return roots


def find_zprime_zeros(
    t_lo: float,
    t_hi: float,
    sigma_max: float = SIGMA_MAX_DEFAULT,
    *,
    threads: int = 1,
    shard_length: float = SHARD_LENGTH,
    accuracy: float = DEFAULT_ACCURACY,
) -> list[ZPrimeZero]:
    """All zeros of zeta' in (1/2, sigma_max] x (t_lo, t_hi], certified, sorted by ordinate.

    Zeros with beta' within ON_LINE_TOL of 1/2 at which zeta also vanishes
    (a multiple zeta zero) are kept but flagged ``on_line_coincident``.
    """
    if not (10.0 <= t_lo <= t_hi <= T_MAX):
        raise DomainError(f"need 10 <= t_lo <= t_hi <= {T_MAX}, got ({t_lo}, {t_hi}]")
    if not (0.5 < sigma_max <= 6.0):
        raise DomainError(f"sigma_max must lie in (1/2, 6], got {sigma_max}")
    if t_lo == t_hi:
        return []
    box_height = 0.5 * mean_gap(t_hi)
    nshard = max(1, int(math.ceil((t_hi - t_lo) / shard_length)))
    edges = [t_lo + (t_hi - t_lo) * k / nshard for k in range(nshard)] + [t_hi]
    boxes_per = [int(math.ceil((edges[k + 1] - edges[k]) / box_height)) for k in range(nshard)]
    box0 = np.concatenate(([0], np.cumsum(boxes_per)))

    def run(k):
        return _shard(edges[k], edges[k + 1], sigma_max, box_height, int(box0[k]), accuracy)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(run, range(nshard)))
    else:
        parts = [run(k) for k in range(nshard)]
    roots = sorted((r for part in parts for r in part), key=lambda x: (x[0].imag, x[0].real))
    if not roots:
        return []
    pts = np.array([r[0] for r in roots])
    w = _circle_windings(pts, dzeta=_dzeta_at(accuracy))
    if np.any(w != 1):
        k = int(np.flatnonzero(w != 1)[0])
        raise CertificationError(f"certification circle about {pts[k]} winds {w[k]} times")
    if np.any(pts.real < 0.5 - ON_LINE_TOL):
        k = int(np.argmin(pts.real))
        raise CertificationError(f"zero of zeta' at {pts[k]} lies left of the critical line")
    out = []
    near_line = pts.real - 0.5 < ON_LINE_TOL
    zvals = np.zeros(pts.size, dtype=complex)
    if near_line.any():
        zvals[near_line] = eval_many(pts[near_line], accuracy, deriv=False)[0]
    for k, (p, res, bid) in enumerate(roots):
        if not (t_lo < p.imag <= t_hi and 0.5 < p.real + ON_LINE_TOL and p.real <= sigma_max):
            continue
        coincident = bool(near_line[k] and abs(zvals[k]) < ON_LINE_TOL)
        out.append(ZPrimeZero(float(p.real), float(p.imag), res, bid, coincident))
    return out


def _gap_fields(g: np.ndarray, c: int):
    up = g[c + 1] - g[c]
    down = g[c] - g[c - 1]
    return float(up), float(down), float(min(up, down))


def pair_with_closest(zp: ZPrimeZero, zeros, T: float | None = None) -> PairingRecord:
    """Pair a zeta' zero with the closest critical-line zero rho_c.

    The distance to 1/2 + i gamma is minimized by the ordinate nearest to
    gamma'; exact ties (within 1e-12) go to the smaller ordinate.  ``T`` is
    the window anchor giving log_T (default: gamma').
    """
    g = ordinates(zeros)
    if g.size == 0:
        raise CoverageError("empty zero list")
    gp = zp.gamma_prime
    guard = GUARD_GAPS * mean_gap(max(gp, 10.0))
    if not covers(g, gp - guard, gp + guard):
        raise CoverageError(f"zeros [{g[0]}, {g[-1]}] do not cover {gp} +- {guard:.3f}")
    i = bisect.bisect_left(g.tolist(), gp)
    cand = [k for k in (i - 1, i) if 0 <= k < g.size]
    dd = [abs(g[k] - gp) for k in cand]
    c = cand[0] if len(cand) == 1 or dd[0] <= dd[1] + 1e-12 else cand[1]
    up, down, near = _gap_fields(g, c)
    dist = math.hypot(zp.beta_prime - 0.5, gp - g[c])
    log_T = math.log(T if T is not None else gp)
    return PairingRecord(zp, float(g[c]), dist, up, down, near, log_T)


def pair_all(zprimes, zeros, T: float | None = None, include_coincident: bool = False) -> list[PairingRecord]:
    """Pairings for every zeta' zero (on-line-coincident ones skipped unless asked)."""
    return [
        pair_with_closest(zp, zeros, T) for zp in zprimes if include_coincident or not zp.on_line_coincident
    ]


__all__ = [
    "ZPrimeZero",
    "PairingRecord",
    "ZetaZero",
    "find_zprime_zeros",
    "pair_with_closest",
    "pair_all",
]
