"""Continuous argument tracking along polygonal paths.

Paths are stored flat: sample points ``z``, values ``f`` and an integer
``edge`` id per sample, samples of one edge contiguous and in path order.
A segment is accepted when |log(f1/f0)| <= MAX_DLOG, a scale-free test that
tolerates exponential decay but refines near zeros; refinement evaluates the
midpoints of all rejected segments of all edges in one batch.
"""

from __future__ import annotations

import numpy as np

from .errors import WindingAmbiguityError

MAX_DLOG = 0.6
MAX_DEPTH = 40


def _bad_segments(z, f, edge, min_len):
    same = edge[:-1] == edge[1:]
    f0, f1 = f[:-1], f[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        dlog = np.abs(np.log(f1 / f0))
    bad = same & ~(dlog <= MAX_DLOG)
    seglen = np.abs(z[1:] - z[:-1])
    stuck = bad & (seglen < min_len[edge[:-1]])
    return np.flatnonzero(bad & ~stuck), np.flatnonzero(stuck)


def refine(z, f, edge, func, edge_length, max_depth: int = MAX_DEPTH):
    """Refine samples until no segment can hide a turn of the argument.

    ``func`` maps an array of points to values.  ``edge_length[e]`` is the
    length of edge ``e``; a segment shorter than ``edge_length/2**max_depth``
    that still fails the tests marks its edge as ambiguous.

    Returns ``(z, f, edge, ambiguous_edges)``.
    """
    min_len = np.asarray(edge_length, dtype=float) / 2.0**max_depth
    while True:
        idx, stuck = _bad_segments(z, f, edge, min_len)
        if idx.size == 0:
            return z, f, edge, np.unique(edge[stuck])
        mids = 0.5 * (z[idx] + z[idx + 1])
        fm = func(mids)
        z = np.insert(z, idx + 1, mids)
        f = np.insert(f, idx + 1, fm)
        edge = np.insert(edge, idx + 1, edge[idx])


def edge_arg_changes(f, edge, n_edges: int) -> np.ndarray:
    """Total change of arg f along each edge."""
    same = edge[:-1] == edge[1:]
    d = np.angle(f[1:] / f[:-1])
    d = np.where(same, d, 0.0)
    return np.bincount(edge[:-1], weights=d, minlength=n_edges)


def edge_log_moments(z, f, edge, n_edges: int) -> np.ndarray:
    """Trapezoid approximation of the integral of z d(log f) along each edge."""
    same = edge[:-1] == edge[1:]
    dlog = np.log(np.abs(f[1:]) / np.abs(f[:-1])) + 1j * np.angle(f[1:] / f[:-1])
    zm = 0.5 * (z[1:] + z[:-1])
    w = np.where(same, zm * dlog, 0.0)
    return np.bincount(edge[:-1], weights=w.real, minlength=n_edges) + 1j * np.bincount(
        edge[:-1], weights=w.imag, minlength=n_edges
    )


def track_path(vertices, func, samples_per_edge=16, max_depth: int = MAX_DEPTH) -> float:
    """Total argument change of ``func`` along the polygon through ``vertices``."""
    vertices = np.asarray(vertices, dtype=complex)
    n_edges = len(vertices) - 1
    u = np.linspace(0.0, 1.0, samples_per_edge + 1)
    z = np.concatenate([a + (b - a) * u for a, b in zip(vertices[:-1], vertices[1:])])
    edge = np.repeat(np.arange(n_edges), samples_per_edge + 1)
    f = func(z)
    lengths = np.abs(np.diff(vertices))
    z, f, edge, amb = refine(z, f, edge, func, lengths, max_depth)
    if amb.size:
        raise WindingAmbiguityError(f"path passes too close to a zero on edge {int(amb[0])}")
    return float(edge_arg_changes(f, edge, n_edges).sum())


def winding_number(vertices, func, samples_per_edge=16, tol: float = 0.1) -> int:
    """Winding number of ``func`` around 0 along a closed polygon."""
    total = track_path(vertices, func, samples_per_edge) / (2.0 * np.pi)
    k = round(total)
    if abs(total - k) > tol:
        raise WindingAmbiguityError(f"non-integral winding {total:.4f}")
    return int(k)
