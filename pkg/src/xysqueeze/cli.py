"""Command-line sweeps writing CSV datasets.

Every file starts with ``#`` comment lines holding the tool version, the
fully resolved configuration and the column names; numbers are written with
12 significant digits so reruns with the same configuration are
byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .excited import density_histogram, enumerate_subspace, squeezing_distribution
from .model import ModelParams
from .squeezing import (
    find_coherent_temperatures,
    fit_factorized_field,
    refine_roots,
    ssp_thermal,
)

COMMANDS = ("heatmap", "curve-t", "excited", "dos", "dist", "zero-t-phase", "fit", "ed-check")

DEFAULTS = {
    "n": 200,
    "delta": 0.8,
    "h": None,
    "h_range": None,
    "t": None,
    "t_range": None,
    "delta_range": None,
    "nb": "1,2,3",
    "mprime": 50,
    "mdprime": 5000,
    "seed": 0,
    "cap": 2_000_000,
    "out": "-",
    "threads": os.cpu_count() or 1,
    "ensemble": "projected",
    "step": 0.01,
    "input": None,
    "ed_sizes": "8,10,12",
    "ed_tol": 5e-2,
}

CASTS = {
    "n": int, "delta": float, "h": float, "t": float, "mprime": int, "mdprime": int,
    "seed": int, "cap": int, "threads": int, "step": float, "ed_tol": float,
}


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def parse_range(text: str) -> np.ndarray:
    """``start:stop:count`` (commas also accepted) to ``count`` equally spaced values."""
    parts = text.replace(",", ":").split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must be start:stop:count, got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ConfigError("range count must be >= 1")
    if count == 1:
        return np.array([start])
    return np.linspace(start, stop, count)


def parse_list(text: str, cast=int) -> list:
    return [cast(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, keys use - or _."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_").lower()
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then command-line flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config_file(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    for key, cast in CASTS.items():
        if cfg[key] is not None:
            try:
                cfg[key] = cast(cfg[key])
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {cfg[key]!r}") from exc
    if cfg["threads"] < 1:
        raise ConfigError("threads must be >= 1")
    if cfg["ensemble"] not in ("projected", "periodic"):
        raise ConfigError("ensemble must be projected or periodic")
    return cfg


def axis(cfg: dict, single: str, ranged: str, name: str) -> np.ndarray:
    if cfg[ranged] is not None:
        return parse_range(str(cfg[ranged]))
    if cfg[single] is not None:
        return np.array([float(cfg[single])])
    raise ConfigError(f"give --{name} or --{name}-range")


# ---------------------------------------------------------------------------
# output


@dataclass
class Table:
    columns: Sequence[str]
    rows: list
    notes: Sequence[str] = ()


def render(command: str, cfg: dict, table: Table) -> str:
    buf = io.StringIO()
    buf.write(f"# xysqueeze {__version__} {command}\n")
    buf.write("# config: " + " ".join(f"{k}={fmt(cfg[k])}" for k in sorted(cfg)) + "\n")
    for note in table.notes:
        buf.write(f"# {note}\n")
    buf.write("# columns: " + ",".join(table.columns) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_output(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def companion_path(path: str, suffix: str) -> str:
    p = Path(path)
    return str(p.with_name(p.stem + suffix + (p.suffix or ".csv")))


class Failures(list):
    def report(self):
        for label, exc in self:
            print(f"failed: {label}: {exc}", file=sys.stderr)


def run_points(fn: Callable, points: Sequence, threads: int, failures: Failures, label=str):
    """Evaluate ``fn`` on every point; results keep input order, errors become None."""

    def safe(p):
        try:
            return fn(p)
        except Exception as exc:  # reported per point, the sweep continues
            failures.append((label(p), exc))
            return None

    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(safe, points))
    return [safe(p) for p in points]


# ---------------------------------------------------------------------------
# commands


def cmd_heatmap(cfg, failures):
    hs = axis(cfg, "h", "h_range", "h")
    ts = axis(cfg, "t", "t_range", "t")
    pts = [(h, t) for h in hs for t in ts]

    def ev(p):
        return ssp_thermal(ModelParams(cfg["n"], cfg["delta"], p[0]), p[1], cfg["ensemble"]).xi2

    vals = run_points(ev, pts, cfg["threads"], failures, lambda p: f"h={p[0]} T={p[1]}")
    grid = Table(("h", "T", "xi2"), [(h, t, v) for (h, t), v in zip(pts, vals) if v is not None])

    # coherent temperatures from sign changes along each T row
    pos = ts > 0
    tpos = ts[pos]

    def roots(i):
        h = hs[i]
        row = np.array([vals[i * len(ts) + j] for j in range(len(ts))], dtype=float)[pos]
        if np.any(np.isnan(row)) or len(tpos) < 2:
            return ()
        params = ModelParams(cfg["n"], cfg["delta"], h)
        return refine_roots(lambda t: ssp_thermal(params, t, cfg["ensemble"]).xi2 - 1.0,
                            tpos, row - 1.0)[0]

    found = run_points(roots, list(range(len(hs))), cfg["threads"], failures,
                       lambda i: f"T_co at h={hs[i]}")
    curve = Table(("h", "T_co"), [(hs[i], t) for i, r in enumerate(found) if r for t in r])
    return [("", grid), ("_tco", curve)]


def cmd_curve_t(cfg, failures):
    ts = axis(cfg, "t", "t_range", "t")
    h = cfg["h"] if cfg["h"] is not None else axis(cfg, "h", "h_range", "h")[0]
    params = ModelParams(cfg["n"], cfg["delta"], float(h))
    x0 = ssp_thermal(params, 0.0, cfg["ensemble"]).xi2
    vals = run_points(lambda t: ssp_thermal(params, t, cfg["ensemble"]).xi2, list(ts),
                      cfg["threads"], failures, lambda t: f"T={t}")
    rows = []
    for t, v in zip(ts, vals):
        if v is None:
            continue
        d = v - x0
        ok = t > 0 and d > 0
        rows.append((t, v, d, math.log(t) if ok else "", math.log(d) if ok else ""))
    notes = [f"h={fmt(h)} xi2_zero_T={fmt(x0)}"]
    logs = [(r[3], r[4]) for r in rows if r[3] != ""]
    if len(logs) >= 2:
        slope = np.polyfit([a for a, _ in logs], [b for _, b in logs], 1)[0]
        notes.append(f"loglog_slope={fmt(slope)}")
    return [("", Table(("T", "xi2", "xi2_minus_xi2_zero", "log_T", "log_dxi2"), rows, notes))]


def _scans(cfg, failures):
    hs = axis(cfg, "h", "h_range", "h")
    out = []
    for h in hs:
        params = ModelParams(cfg["n"], cfg["delta"], float(h))
        for nb in parse_list(cfg["nb"]):
            try:
                out.append((h, enumerate_subspace(params, nb, cfg["cap"], cfg["seed"], cfg["threads"])))
            except Exception as exc:
                failures.append((f"h={h} N_B={nb}", exc))
    return out


def _scan_notes(scans):
    return [f"h={fmt(h)} N_B={s.n_b} states={len(s)} subspace={s.total} sampled={fmt(s.sampled)}"
            for h, s in scans]


def cmd_excited(cfg, failures):
    scans = _scans(cfg, failures)
    rows = []
    for h, s in scans:
        for occ, e, x in zip(s.occupied, s.energy, s.xi2):
            rows.append((h, s.n_b, e, x, ";".join(str(int(i)) for i in occ)))
    return [("", Table(("h", "N_B", "E_minus_E0", "xi2", "occupied"), rows, _scan_notes(scans)))]


def cmd_dos(cfg, failures):
    scans = _scans(cfg, failures)
    rows = []
    for h, s in scans:
        d = density_histogram(s, cfg["mprime"])
        for b in range(len(d.dos_s)):
            rows.append((h, s.n_b, b, d.edges[b], d.edges[b + 1], d.dos_s[b], d.dos_n[b]))
    cols = ("h", "N_B", "bin", "E_lo", "E_hi", "dos_s", "dos_n")
    return [("", Table(cols, rows, _scan_notes(scans)))]


def cmd_dist(cfg, failures):
    scans = _scans(cfg, failures)
    rows = []
    for h, s in scans:
        d = squeezing_distribution(s, cfg["mdprime"])
        for b in range(len(d.d_s)):
            rows.append((h, s.n_b, b, d.edges[b], d.edges[b + 1], d.d_s[b], d.d_n[b]))
    cols = ("h", "N_B", "bin", "xi2_lo", "xi2_hi", "d_s", "d_n")
    return [("", Table(cols, rows, _scan_notes(scans)))]


def cmd_zero_t_phase(cfg, failures):
    hs = axis(cfg, "h", "h_range", "h")
    ds = parse_range(str(cfg["delta_range"])) if cfg["delta_range"] else np.array([cfg["delta"]])
    pts = [(h, d) for h in hs for d in ds]

    def ev(p):
        return ssp_thermal(ModelParams(cfg["n"], p[1], p[0]), 0.0, cfg["ensemble"]).xi2

    vals = run_points(ev, pts, cfg["threads"], failures, lambda p: f"h={p[0]} delta={p[1]}")
    return [("", Table(("h", "delta", "xi2"), [(h, d, v) for (h, d), v in zip(pts, vals) if v is not None]))]


def read_curve(path: str) -> list[tuple[float, float]]:
    """``(T_co, h)`` pairs from a CSV with ``h`` and ``T_co`` columns."""
    lines = [l for l in Path(path).read_text(encoding="utf-8").splitlines() if l and not l.startswith("#")]
    reader = csv.DictReader(lines)
    return [(float(r["T_co"]), float(r["h"])) for r in reader]


def cmd_fit(cfg, failures):
    h_f = math.sqrt(1.0 - cfg["delta"] ** 2)
    if cfg["input"]:
        pts = read_curve(cfg["input"])
    else:
        hs = axis(cfg, "h", "h_range", "h")
        ts = axis(cfg, "t", "t_range", "t") if (cfg["t_range"] or cfg["t"] is not None) else np.array([0.0, 2.0])

        def roots(h):
            params = ModelParams(cfg["n"], cfg["delta"], float(h))
            return find_coherent_temperatures(params, (float(ts.min()), float(ts.max())), cfg["step"],
                                              cfg["ensemble"]).roots

        found = run_points(roots, list(hs), cfg["threads"], failures, lambda h: f"T_co at h={h}")
        pts = [(t, float(h)) for h, r in zip(hs, found) if r for t in r]
    fit = fit_factorized_field(pts, h_f)
    hvals = [p[1] for p in pts]
    span = max(hvals) - min(hvals) if pts else 0.0
    rel = fit.residual / span if span > 0 else float("nan")
    rows = [(h_f, fit.a, fit.b, fit.c, fit.residual, rel, len(pts), fit.converged)]
    cols = ("h_f", "a", "b", "c", "rms_residual", "residual_over_h_span", "points", "converged")
    notes = ["model: h(T) = h_f + a*T + b*tanh(c*T)"]
    if not fit.converged:
        failures.append(("fit", RuntimeError("simplex search hit its iteration budget")))
    data = Table(("T_co", "h", "h_fit"), [(t, h, float(fit(t))) for t, h in pts])
    return [("", Table(cols, rows, notes)), ("_points", data)]


def cmd_ed_check(cfg, failures):
    from .ed import diagonalize, thermal_ssp_ed

    sizes = [n for n in parse_list(cfg["ed_sizes"]) if n <= 12]
    hs = axis(cfg, "h", "h_range", "h") if (cfg["h"] is not None or cfg["h_range"]) else np.array([0.3, 0.6, 1.0, 2.0])
    ts = axis(cfg, "t", "t_range", "t") if (cfg["t"] is not None or cfg["t_range"]) else np.array([0.05, 0.2, 1.0])
    ts = list(ts) + [math.inf]
    diff = {}
    rows = []
    for N in sizes:
        for h in hs:
            params = ModelParams(N, cfg["delta"], float(h))
            try:
                spec = diagonalize(params)
            except Exception as exc:
                failures.append((f"ED N={N} h={h}", exc))
                continue
            for t in ts:
                a = thermal_ssp_ed(params, t, spec).xi2
                b = ssp_thermal(params, t, cfg["ensemble"]).xi2
                d = abs(a - b)
                diff[(N, h, t)] = d
                ok = d <= cfg["ed_tol"] if math.isfinite(t) else (abs(a - 1.0) <= 1e-12 and abs(b - 1.0) <= 1e-12)
                rows.append(("match", N, h, t, a, b, d, ok))
    if len(sizes) >= 2:
        lo, hi = min(sizes), max(sizes)
        for h in hs:
            for t in ts:
                if (lo, h, t) in diff and (hi, h, t) in diff:
                    d0, d1 = diff[(lo, h, t)], diff[(hi, h, t)]
                    ok = d1 <= max(1.2 * d0, 1e-10)
                    rows.append(("trend", f"{lo}->{hi}", h, t, d0, d1, d1 - d0, ok))
    cols = ("check", "N", "h", "T", "a", "b", "diff", "pass")
    notes = ["match rows: a=xi2 exact diagonalization, b=xi2 free fermions",
             "trend rows: a,b = discrepancy at smallest and largest N"]
    return [("", Table(cols, rows, notes))]


HANDLERS = {
    "heatmap": cmd_heatmap,
    "curve-t": cmd_curve_t,
    "excited": cmd_excited,
    "dos": cmd_dos,
    "dist": cmd_dist,
    "zero-t-phase": cmd_zero_t_phase,
    "fit": cmd_fit,
    "ed-check": cmd_ed_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--n", type=int, help="chain length (default 200)")
    common.add_argument("--delta", type=float, help="anisotropy in (0, 1] (default 0.8)")
    common.add_argument("--h", type=float, help="transverse field")
    common.add_argument("--h-range", dest="h_range", help="fields as start:stop:count")
    common.add_argument("--t", type=float, help="temperature")
    common.add_argument("--t-range", dest="t_range", help="temperatures as start:stop:count")
    common.add_argument("--delta-range", dest="delta_range", help="anisotropies as start:stop:count")
    common.add_argument("--nb", help="quasiparticle numbers, comma separated (default 1,2,3)")
    common.add_argument("--mprime", type=int, help="energy bins (default 50)")
    common.add_argument("--mdprime", type=int, help="xi^2 bins (default 5000)")
    common.add_argument("--seed", type=int, help="sampling seed (default 0)")
    common.add_argument("--cap", type=int, help="largest exhaustive subspace (default 2000000)")
    common.add_argument("--out", help="output CSV path, - for stdout (default -)")
    common.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    common.add_argument("--ensemble", choices=("projected", "periodic"),
                        help="thermal state: exact parity-projected (default) or single periodic grid")
    common.add_argument("--step", type=float, help="temperature scan step for coherent temperatures")
    common.add_argument("--input", help="fit: CSV with h,T_co columns")
    common.add_argument("--ed-sizes", dest="ed_sizes", help="ed-check chain lengths (default 8,10,12)")
    common.add_argument("--ed-tol", dest="ed_tol", type=float, help="ed-check tolerance (default 0.05)")

    parser = argparse.ArgumentParser(prog="xysqueeze", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"xysqueeze {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "heatmap": "xi^2 over an (h, T) grid plus coherent temperatures per h",
        "curve-t": "xi^2 versus T at fixed h, with log-log export of xi^2(T) - xi^2(0)",
        "excited": "per-state (E - E0, xi^2) scatter of N_B subspaces",
        "dos": "densities of squeezed/unsqueezed states over energy bins",
        "dist": "distributions of squeezed/unsqueezed states over xi^2 bins",
        "zero-t-phase": "ground-state xi^2 over an (h, delta) grid",
        "fit": "fit h(T_co) = h_f + a T + b tanh(c T) to coherent temperatures",
        "ed-check": "compare against exact diagonalization for N <= 12",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failures = Failures()
    try:
        outputs = HANDLERS[args.command](cfg, failures)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    path = cfg["out"]
    try:
        for suffix, table in outputs:
            if suffix and path == "-":
                sys.stdout.write("\n")
                write_output("-", render(args.command + suffix, cfg, table))
            else:
                target = companion_path(path, suffix) if suffix else path
                write_output(target, render(args.command + suffix, cfg, table))
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 3
    failures.report()
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
