"""Per-lemma verification reports over computed zeros.

Each report counts the checks made, the violations, and the smallest slack
(negative exactly when something was violated) together with the record
attaining it.  Suites backed by a theorem (L7, L10, L11 and the lower
envelope of P2) must report zero violations on real data; a violation
there points to a defect in zero finding or pairing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .dirichlet import FejerParams, explicit_formula_sides, lorentz_sum
from .errors import CoverageError
from .statistics import window_mask, window_tail
from .zeros import mean_gap, ordinates
from .zprime import PairingRecord, ZPrimeZero

LEMMA11_SLACK = 1e-12
LEMMA6_BOUND = 5.0
P2_LOWER = math.sqrt(2.0) - 1e-6


class LemmaId(str, enum.Enum):
    L6 = "L6"
    L7 = "L7"
    L10 = "L10"
    L11 = "L11"
    P2 = "P2"
    C3 = "C3"
    EF = "EF"


THEOREM_BACKED = (LemmaId.L7, LemmaId.L10, LemmaId.L11, LemmaId.P2)


@dataclass(frozen=True)
class VerificationReport:
    lemma_id: LemmaId
    checked: int
    violations: int
    worst_margin: float
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def as_dict(self) -> dict:
        return {
            "lemma_id": self.lemma_id.value,
            "checked": self.checked,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "witness": self.witness,
            "details": self.details,
        }


def _report(lemma, margins, witnesses, tol=0.0, details=None):
    margins = np.asarray(margins, dtype=float)
    if margins.size == 0:
        return VerificationReport(lemma, 0, 0, math.inf, None, details or {})
    k = int(np.argmin(margins))
    return VerificationReport(
        lemma,
        int(margins.size),
        int(np.sum(margins < -tol)),
        float(margins[k]),
        witnesses[k],
        details or {},
    )


def _zp_of(x) -> ZPrimeZero:
    return x.zprime if isinstance(x, PairingRecord) else x


def _wit(zp: ZPrimeZero, **extra) -> dict:
    return {"beta_prime": zp.beta_prime, "gamma_prime": zp.gamma_prime, **extra}


def lemma6_residuals(items, zeros, radius_gaps: float = 50.0, window=None) -> np.ndarray:
    """r = log(gamma')/2 - sum_rho (beta'-1/2)/|rho' - rho|^2 for each zeta' zero.

    The sum runs over stored ordinates within ``radius_gaps`` mean gaps of
    gamma' plus the smooth-density tail beyond.  With ``window`` the stored
    list is taken as complete on that window instead, whatever its size.
    """
    g = ordinates(zeros)
    out = []
    for it in items:
        zp = _zp_of(it)
        s = complex(zp.beta_prime, zp.gamma_prime)
        if window is None:
            val, _ = lorentz_sum(s, g, radius=radius_gaps * mean_gap(zp.gamma_prime))
        else:
            val, _ = lorentz_sum(s, g, window=window)
        out.append(0.5 * math.log(zp.gamma_prime) - val)
    return np.array(out)


def verify_lemma6(
    items, zeros, radius_gaps: float = 50.0, bound: float = LEMMA6_BOUND, doubling: bool = False
) -> VerificationReport:
    """Residuals of the Hadamard identity; margin = bound - |r|.

    On-line-coincident zeros (rho' = rho) are outside the identity and skipped.
    With ``doubling`` the residuals are recomputed at twice the radius and
    the largest change is reported as ``max_doubling_change``.
    """
    zps = [_zp_of(x) for x in items if not _zp_of(x).on_line_coincident]
    g = ordinates(zeros)
    reach = radius_gaps * (2.0 if doubling else 1.0)
    for zp in zps:
        R = reach * mean_gap(zp.gamma_prime)
        if g.size == 0 or g[0] > zp.gamma_prime - R or g[-1] < zp.gamma_prime + R:
            raise CoverageError(f"gamma' = {zp.gamma_prime} is within {R:.2f} of the zero-list boundary")
    r = lemma6_residuals(zps, g, radius_gaps)
    wit = [_wit(zp, residual=float(v)) for zp, v in zip(zps, r)]
    details = {
        "max_abs_residual": float(np.max(np.abs(r))) if r.size else 0.0,
        "mean_residual": float(np.mean(r)) if r.size else 0.0,
        "radius_gaps": radius_gaps,
    }
    if doubling:
        r2 = lemma6_residuals(zps, g, 2.0 * radius_gaps)
        details["max_doubling_change"] = float(np.max(np.abs(r2 - r))) if r.size else 0.0
    return _report(LemmaId.L6, bound - np.abs(r), wit, details=details)


def verify_lemma7(zprimes, zeros, T: float, mult: float = 2.0) -> VerificationReport:
    """At most one zeta' zero in 1/2 <= sigma < 1/2 + 1/log T between consecutive ordinates."""
    g = ordinates(zeros)
    idx = np.flatnonzero(window_mask(g, T, mult))
    boxes = idx[idx + 1 < g.size]
    if boxes.size == 0:
        return VerificationReport(LemmaId.L7, 0, 0, math.inf)
    limit = 0.5 + 1.0 / math.log(T)
    pts = [z for z in zprimes if z.beta_prime < limit and not z.on_line_coincident]
    gp = np.array([z.gamma_prime for z in pts])
    # box k is (g[k], g[k+1]); searchsorted gives k + 1 for g[k] < gp <= g[k+1]
    k = np.searchsorted(g, gp, side="left") - 1
    counts = np.bincount(k[(k >= 0) & (k < g.size - 1)], minlength=g.size)[boxes]
    margins = 1.0 - counts
    wit = [{"gamma_lo": float(g[b]), "gamma_hi": float(g[b + 1]), "count": int(c)} for b, c in zip(boxes, counts)]
    return _report(LemmaId.L7, margins, wit, details={"sigma_limit": limit, "zeros_in_strip": len(pts)})


def verify_lemma10(zeros, zprimes, T: float, eps_max: float = 1.0, mult: float = 2.0) -> VerificationReport:
    """Every small gap (gamma+ - gamma) log gamma < eps_max has a zeta' zero within 2 eps/log gamma."""
    g = ordinates(zeros)
    idx = np.flatnonzero(window_mask(g, T, mult))
    idx = idx[idx + 1 < g.size]
    lg = np.log(g[idx])
    eps = (g[idx + 1] - g[idx]) * lg
    sel = eps < min(eps_max, 1.0)
    idx, lg, eps = idx[sel], lg[sel], eps[sel]
    if idx.size == 0:
        return VerificationReport(LemmaId.L10, 0, 0, math.inf)
    pts = np.array([complex(z.beta_prime, z.gamma_prime) for z in zprimes])
    order = np.argsort(pts.imag) if pts.size else np.empty(0, dtype=int)
    pts = pts[order]
    margins, wit = [], []
    for i, l, e in zip(idx, lg, eps):
        rho = complex(0.5, g[i])
        r = 2.0 * e / l
        lo, hi = np.searchsorted(pts.imag, [g[i] - r - 1e-9, g[i] + r + 1e-9])
        d = np.abs(pts[lo:hi] - rho) if hi > lo else np.array([math.inf])
        best = float(np.min(d))
        margins.append(r - best)
        wit.append({"gamma": float(g[i]), "eps": float(e), "radius": r, "nearest": best})
    return _report(LemmaId.L10, margins, wit, tol=LEMMA11_SLACK)


def verify_lemma11(pairings) -> VerificationReport:
    """dist^2 >= 2(beta' - 1/2)/log gamma' for every pairing."""
    margins, wit = [], []
    for p in pairings:
        zp = p.zprime
        m = p.dist**2 - 2.0 * (zp.beta_prime - 0.5) / math.log(zp.gamma_prime)
        margins.append(m)
        wit.append(_wit(zp, gamma_c=p.rho_c_gamma, dist=p.dist))
    return _report(LemmaId.L11, margins, wit, tol=LEMMA11_SLACK)


def prop2_ratios(pairings, eps: float) -> tuple[np.ndarray, list]:
    sel = [
        p
        for p in pairings
        if (p.zprime.beta_prime - 0.5) * p.log_T <= eps and p.zprime.beta_prime > 0.5 + 1e-10
    ]
    R = np.array([p.dist / math.sqrt((p.zprime.beta_prime - 0.5) / p.log_T) for p in sel])
    return R, sel


def check_prop2_envelope(pairings, eps: float, A: float = 1.0, kappa: float = 0.1) -> VerificationReport:
    """Ratio R = dist / sqrt((beta'-1/2)/log T) for zeta' zeros with (beta'-1/2) log T <= eps.

    The lower envelope R >= sqrt(2) is asserted; the fraction above
    sqrt(A log(1/(eps kappa delta))), with delta the median normalized
    spacing gap_nearest * log T, is reported only.
    """
    R, sel = prop2_ratios(pairings, eps)
    if R.size == 0:
        return VerificationReport(LemmaId.P2, 0, 0, math.inf, None, {"eps": eps, "selected": 0})
    delta = float(np.median([p.gap_nearest * p.log_T for p in sel]))
    arg = 1.0 / (eps * kappa * delta)
    upper = math.sqrt(A * math.log(arg)) if arg > 1 else 0.0
    wit = [_wit(p.zprime, ratio=float(r)) for p, r in zip(sel, R)]
    details = {
        "eps": eps,
        "A": A,
        "kappa": kappa,
        "delta": delta,
        "selected": int(R.size),
        "ratio_quantiles": [float(q) for q in np.quantile(R, [0.0, 0.25, 0.5, 0.75, 1.0])],
        "upper_envelope": upper,
        "fraction_above_upper": float(np.mean(R > upper)),
    }
    return _report(LemmaId.P2, R - P2_LOWER, wit, details=details)


def corollary3_report(zeros, T: float, thresholds=(2, 4, 8), mult: float = 2.0) -> VerificationReport:
    """Tail fractions of short-window counts (reported, not asserted)."""
    fr = {str(th): window_tail(zeros, T, th, mult) for th in thresholds}
    n = int(np.sum(window_mask(ordinates(zeros), T, mult)))
    return VerificationReport(LemmaId.C3, n, 0, math.inf, None, {"tail_fraction": fr})


def explicit_formula_report(zeros, ts, deltas=(1.0, 2.0), window=None) -> VerificationReport:
    """|zero_side - arithmetic_side| <= truncation_bound over a grid of heights."""
    margins, wit, weil = [], [], []
    for d in deltas:
        p = FejerParams(d)
        for t in ts:
            r = explicit_formula_sides(float(t), p, zeros, window=window)
            margins.append(r.truncation_bound - abs(r.zero_side - r.arithmetic_side))
            weil.append(abs(r.weil_residual))
            wit.append({"t": float(t), "delta": d, "zero_side": r.zero_side, "arithmetic_side": r.arithmetic_side})
    details = {"max_weil_residual": float(max(weil)) if weil else 0.0}
    return _report(LemmaId.EF, margins, wit, details=details)
