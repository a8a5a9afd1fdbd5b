"""Command-line front end: compute, verify and export zero data for a window (T, cT].

Every flag may also be given through an environment variable named
ZETAGAPS_<FLAG>, e.g. ZETAGAPS_SIGMA_MAX=4.  An explicit flag wins over
the environment, which wins over the built-in default.

Exit codes: 0 success, 1 usage or configuration error (including a
missing archive), 2 a theorem-backed verification suite reported a
violation, 3 a computation failed.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import statistics as st
from . import store
from . import verify as vf
from .dirichlet import PolyKind, PolySpec, moment_ratio
from .errors import ConstraintError, InsufficientDataError, ZetaLabError
from .zeros import find_zeta_zeros, mean_gap, ordinates
from .zeta_eval import T_MAX
from .zprime import find_zprime_zeros, pair_all

log = logging.getLogger("zetagaps")

ENV_PREFIX = "ZETAGAPS_"
EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_FAILURE = 0, 1, 2, 3

ZETA_FILE = "zeta.csv"
ZPRIME_FILE = "zeta_prime.csv"
PAIRING_FILE = "pairing.csv"

# L6 is checked at 50 and 100 mean gaps, so the zero archive extends this far past the window
GUARD_GAPS = 110.0
GUARD_MIN = 40.0
EF_POINTS = 100
EF_SEED = 20240917
EF_DELTAS = (1.0, 2.0)
P2_EPS = (0.5, 1.0, 2.0)
C3_THRESHOLDS = (2, 4, 8)
GONEK_RATIOS = ((2, 1), (3, 1), (3, 2), (5, 1))
MOMENT_N = 5
PC_UMAX, PC_BINS = 2.0, 16


class UsageError(Exception):
    pass


@dataclasses.dataclass(frozen=True)
class RunConfig:
    T: float = 1000.0
    window_multiplier: float = 2.0
    sigma_max: float = 6.0
    eps_min: float = 0.05
    eps_max: float = 32.0
    eps_points: int = 40
    threads: int = 1
    accuracy: float = 1e-10
    output_dir: str = "."

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T >= 100):
            raise UsageError(f"T must be >= 100, got {self.T}")
        if not (1 < self.window_multiplier <= 4):
            raise UsageError(f"window multiplier must lie in (1, 4], got {self.window_multiplier}")
        if self.eps_points < 8:
            raise UsageError(f"need at least 8 epsilon points, got {self.eps_points}")
        if not (0 < self.eps_min < self.eps_max <= 32):
            raise UsageError("need 0 < eps-min < eps-max <= 32")
        if not (0.5 < self.sigma_max <= 6):
            raise UsageError(f"sigma-max must lie in (1/2, 6], got {self.sigma_max}")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")
        if not (1e-14 <= self.accuracy <= 1e-9):
            raise UsageError(f"accuracy must lie in [1e-14, 1e-9], got {self.accuracy}")
        if self.zeta_window[1] > T_MAX:
            raise UsageError(f"window plus guard exceeds the supported height {T_MAX:g}")

    @property
    def top(self) -> float:
        return self.T * self.window_multiplier

    @property
    def window(self) -> tuple[float, float]:
        return (self.T, self.top)

    @property
    def zeta_window(self) -> tuple[float, float]:
        guard = max(GUARD_GAPS * mean_gap(self.T), GUARD_MIN)
        return (max(10.0, self.T - guard), self.top + guard)

    @property
    def grid(self) -> np.ndarray:
        return st.epsilon_grid(self.eps_min, self.eps_max, self.eps_points)

    def as_dict(self) -> dict:
        # execution-only settings (threads, output location) stay out of the
        # outputs so that they are byte-identical across thread counts
        return {
            "T": self.T,
            "window_multiplier": self.window_multiplier,
            "sigma_max": self.sigma_max,
            "eps_grid": [self.eps_min, self.eps_max, self.eps_points],
            "accuracy": self.accuracy,
        }


# flag name, RunConfig field, type
_FLAGS = (
    ("T", "T", float),
    ("mult", "window_multiplier", float),
    ("sigma-max", "sigma_max", float),
    ("eps-min", "eps_min", float),
    ("eps-max", "eps_max", float),
    ("eps-points", "eps_points", int),
    ("threads", "threads", int),
    ("accuracy", "accuracy", float),
    ("out", "output_dir", str),
)


def env_name(flag: str) -> str:
    return ENV_PREFIX + flag.upper().replace("-", "_")


def resolve_config(ns: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    kw = {}
    for flag, name, typ in _FLAGS:
        v = getattr(ns, name, None)
        if v is None and env_name(flag) in environ:
            raw = environ[env_name(flag)]
            try:
                v = typ(raw)
            except ValueError:
                raise UsageError(f"{env_name(flag)}={raw!r} is not a valid {typ.__name__}") from None
        if v is not None:
            kw[name] = v
    return RunConfig(**kw)


# ---------------------------------------------------------------- output helpers


def _clean(x):
    if isinstance(x, float):
        return x if math.isfinite(x) else None
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.generic):
        return _clean(x.item())
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


def _write_json(path: Path, payload: dict) -> None:
    text = json.dumps(_clean(payload), sort_keys=True, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    log.info("wrote %s", path)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    log.info("wrote %s", path)


def _envelope(cfg: RunConfig, lemma_ids) -> dict:
    return {
        "format_version": store.FORMAT_VERSION,
        "version": __version__,
        "config": cfg.as_dict(),
        "lemma_ids": [getattr(x, "value", x) for x in lemma_ids],
    }


def _out(cfg: RunConfig) -> Path:
    p = Path(cfg.output_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _load(cfg: RunConfig, name: str) -> store.ZeroArchive:
    path = Path(cfg.output_dir) / name
    if not path.exists():
        raise UsageError(f"archive {path} not found; run the command that produces it first")
    return store.load_archive(path)


# ---------------------------------------------------------------- commands


def cmd_zeros(cfg: RunConfig) -> int:
    lo, hi = cfg.zeta_window
    log.info("zeros of zeta on (%g, %g]", lo, hi)
    zeros = find_zeta_zeros(lo, hi, threads=cfg.threads, accuracy=cfg.accuracy)
    store.save_archive(store.zeta_archive(zeros, (lo, hi)), _out(cfg) / ZETA_FILE)
    log.info("%d zeros saved", len(zeros))
    return EXIT_OK


def cmd_zprime(cfg: RunConfig) -> int:
    zeros = store.to_zeta_zeros(_load(cfg, ZETA_FILE))
    log.info("zeros of zeta' on (%g, %g] x (1/2, %g]", cfg.T, cfg.top, cfg.sigma_max)
    zp = find_zprime_zeros(cfg.T, cfg.top, cfg.sigma_max, threads=cfg.threads, accuracy=cfg.accuracy)
    pairs = pair_all(zp, zeros, cfg.T)
    out = _out(cfg)
    store.save_archive(store.zprime_archive(zp, cfg.window), out / ZPRIME_FILE)
    store.save_archive(store.pairing_archive(pairs, cfg.window), out / PAIRING_FILE)
    log.info("%d zeros of zeta' and %d pairings saved", len(zp), len(pairs))
    return EXIT_OK


def _fit(curve) -> dict:
    try:
        lo, hi = st.default_fit_range(curve)
        slope, r2 = st.scaling_fit(curve, (lo, hi))
    except InsufficientDataError as e:
        return {"exponent": None, "r_squared": None, "fit_range": None, "note": str(e)}
    return {"exponent": slope, "r_squared": r2, "fit_range": [lo, hi]}


def _curve_csv(path: Path, curve) -> None:
    _write_csv(path, ["epsilon", "value", "count"], zip(curve.epsilon_grid, curve.values, curve.counts))


def cmd_stats(cfg: RunConfig) -> int:
    g = ordinates(store.to_zeta_zeros(_load(cfg, ZETA_FILE)))
    zp = store.to_zprime_zeros(_load(cfg, ZPRIME_FILE))
    if g.size == 0:
        log.warning("zero archive is empty; all curves are identically zero")
    T, c, grid = cfg.T, cfg.window_multiplier, cfg.grid
    m = st.empirical_m(g, T, grid, c)
    mp = st.empirical_m_prime(zp, T, grid, c, population=m.population)
    pc = st.pair_correlation(g, T, PC_UMAX, PC_BINS, c)
    out = _out(cfg)
    _curve_csv(out / "m_curve.csv", m)
    _curve_csv(out / "m_prime_curve.csv", mp)
    e = pc.bin_edges
    _write_csv(
        out / "pair_correlation.csv",
        ["u_lo", "u_hi", "count", "density", "expected_density"],
        zip(e[:-1], e[1:], pc.counts, pc.density, pc.expected_density),
    )
    moments = []
    if g.size:
        inside = g[st.window_mask(g, T, c)]
        for kind in PolyKind:
            for k in (1, 2):
                spec = PolySpec(kind, MOMENT_N)
                try:
                    r = moment_ratio(spec, inside, k, T)
                except ConstraintError:
                    continue
                moments.append({"kind": kind.value, "N": MOMENT_N, "k": k, "ratio": r})
    payload = _envelope(cfg, [vf.LemmaId.C3])
    payload.update(
        {
            "estimate": "fixed window (T, cT]; not a liminf",
            "window": list(cfg.window),
            "m": {"window_T": m.window_T, "population": m.population, "fit": _fit(m), "csv": "m_curve.csv"},
            "m_prime": {
                "window_T": mp.window_T,
                "population": mp.population,
                "zeros_in_window": int(sum(1 for z in zp if T < z.gamma_prime <= c * T)),
                "fit": _fit(mp),
                "csv": "m_prime_curve.csv",
            },
            "pair_correlation": {
                "population": pc.population,
                "density_0_0.25": st.band_density(pc, 0.0, 0.25),
                "density_0.75_1": st.band_density(pc, 0.75, 1.0),
                "csv": "pair_correlation.csv",
            },
            "window_tail": {str(th): st.window_tail(g, T, th, c) for th in C3_THRESHOLDS} if g.size else {},
            "gonek_sums": {f"{a}/{b}": [s.real, s.imag] for a, b in GONEK_RATIOS for s in [st.gonek_sum((a, b), g, T, c)]},
            "moment_ratios": moments,
        }
    )
    _write_json(out / "stats.json", payload)
    return EXIT_OK


def _ef_heights(cfg: RunConfig) -> np.ndarray:
    rng = np.random.default_rng(EF_SEED)
    return np.sort(rng.uniform(cfg.T, cfg.top, EF_POINTS))


def run_verification(cfg: RunConfig, g, zp, pairs) -> list[vf.VerificationReport]:
    T, c = cfg.T, cfg.window_multiplier
    inside = [z for z in zp if T < z.gamma_prime <= c * T]
    reps = [
        vf.verify_lemma6(inside, g, doubling=True),
        vf.verify_lemma7(zp, g, T, c),
        vf.verify_lemma10(g, zp, T, 1.0, c),
        vf.verify_lemma11(pairs),
    ]
    reps += [vf.check_prop2_envelope(pairs, eps) for eps in P2_EPS]
    reps.append(vf.corollary3_report(g, T, C3_THRESHOLDS, c))
    if g.size:
        reps.append(vf.explicit_formula_report(g, _ef_heights(cfg), EF_DELTAS))
    return reps


def cmd_verify(cfg: RunConfig) -> int:
    g = ordinates(store.to_zeta_zeros(_load(cfg, ZETA_FILE)))
    zp = store.to_zprime_zeros(_load(cfg, ZPRIME_FILE))
    pairs = store.to_pairings(_load(cfg, PAIRING_FILE))
    reps = run_verification(cfg, g, zp, pairs)
    bad = sorted({r.lemma_id.value for r in reps if r.lemma_id in vf.THEOREM_BACKED and not r.passed})
    payload = _envelope(cfg, list(vf.LemmaId))
    payload.update(
        {
            "theorem_backed": [x.value for x in vf.THEOREM_BACKED],
            "violated": bad,
            "reports": [r.as_dict() for r in reps],
        }
    )
    _write_json(_out(cfg) / "verify.json", payload)
    for r in reps:
        log.info("%-3s checked %6d violations %d worst margin %.3e", r.lemma_id.value, r.checked, r.violations, r.worst_margin)
    if bad:
        log.error("theorem-backed suites with violations: %s", ", ".join(bad))
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_crosscheck(cfg: RunConfig, external_path: str) -> int:
    if not Path(external_path).exists():
        raise UsageError(f"external file {external_path} not found")
    ext = store.ingest_external(external_path)
    local = store.to_zeta_zeros(_load(cfg, ZETA_FILE))
    report = store.crosscheck(ext, local)
    payload = _envelope(cfg, [])
    payload.update({"external": str(external_path), "external_window": list(ext.window), "report": report})
    _write_json(_out(cfg) / "crosscheck.json", payload)
    return EXIT_OK


# ---------------------------------------------------------------- entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    for flag, name, typ in _FLAGS:
        common.add_argument(f"--{flag}", dest=name, type=typ, default=None, help=f"(env {env_name(flag)})")
    common.add_argument("-q", "--quiet", action="store_true", help="only warnings and errors")
    p = _Parser(prog="zetagaps", description="Zeros of zeta and zeta', gap statistics and lemma checks.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("zeros", parents=[common], help="zeros of zeta on the window plus guard")
    sub.add_parser("zprime", parents=[common], help="zeros of zeta' and their pairings")
    sub.add_parser("stats", parents=[common], help="m, m' curves, pair correlation, fits")
    sub.add_parser("verify", parents=[common], help="run all verification suites")
    x = sub.add_parser("crosscheck", parents=[common], help="compare an external ordinate list")
    x.add_argument("external", help="text file with one ordinate per line")
    return p


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = resolve_config(ns)
    except UsageError as e:
        print(f"zetagaps: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING if ns.quiet else logging.INFO,
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        if ns.command == "crosscheck":
            return cmd_crosscheck(cfg, ns.external)
        return {"zeros": cmd_zeros, "zprime": cmd_zprime, "stats": cmd_stats, "verify": cmd_verify}[ns.command](cfg)
    except UsageError as e:
        log.error("%s", e)
        return EXIT_USAGE
    except ZetaLabError as e:
        log.error("%s: %s", type(e).__name__, e)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
