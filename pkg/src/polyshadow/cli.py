"""Command-line interface: ``polyshadow <command> [options]``.

Options may also come from a JSON file given with ``--config``; explicit flags
override the file, which overrides the defaults.  The default worker count is
read from ``POLYSHADOW_WORKERS``.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from . import closedforms, estimators, oracles
from .errors import ConfigurationError, UnsupportedMethodError
from .polytopes import Name, all_polytopes, make_polytope, parse_name

COMMANDS = ("moments", "reference", "vertex-dist", "xcheck", "density", "identity-test", "validate")
Z_LIMIT = 5.0


@dataclass
class RunConfig:
    command: str
    polytope: str | None = None
    dim: int | None = None
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    method: str = "mc"
    grid: int = 256
    format: str = "json"
    out: str | None = None


def _defaults() -> dict:
    return {
        "polytope": None, "dim": None, "samples": 100_000, "seed": 0,
        "workers": int(os.environ.get("POLYSHADOW_WORKERS", "1")),
        "method": "mc", "grid": 256, "format": "json", "out": None,
    }


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyshadow",
                                 description="Moments of random planar shadows of regular polytopes.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--polytope", help="simplex, cube, crosspolytope (or square, triangle)")
    ap.add_argument("--dim", type=int)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--method", choices=("mc", "quadrature"))
    ap.add_argument("--grid", type=int, help="quadrature nodes per angle")
    ap.add_argument("--format", choices=("json", "csv", "table"))
    ap.add_argument("--out", help="write to this file instead of stdout")
    ap.add_argument("--config", help="JSON file with option values")
    return ap


def parse_config(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    merged = _defaults()
    if ns.config:
        with open(ns.config, encoding="utf-8") as fh:
            file_opts = json.load(fh)
        unknown = set(file_opts) - set(merged)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_opts)
    for key in merged:
        val = getattr(ns, key)
        if val is not None:
            merged[key] = val
    cfg = RunConfig(command=ns.command, **merged)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    if cfg.polytope is not None:
        parse_name(cfg.polytope)
    if cfg.command in ("moments", "vertex-dist"):
        if cfg.polytope is None or cfg.dim is None:
            raise ConfigurationError(f"{cfg.command} needs --polytope and --dim")
        make_polytope(cfg.polytope, cfg.dim)
    if cfg.method == "quadrature" and cfg.dim not in (None, 3):
        raise UnsupportedMethodError("quadrature is only available in dimension 3")
    if cfg.dim is not None and cfg.command in ("validate",) and cfg.dim not in (3, 4):
        raise ConfigurationError("validate needs --dim 3 or 4")
    if cfg.samples < 2 or cfg.workers < 1 or cfg.grid < 8:
        raise ConfigurationError("samples >= 2, workers >= 1 and grid >= 8 are required")


# --- output helpers ----------------------------------------------------------

def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=_plain) + "\n"


def _plain(x):
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(type(x))


def _table(rows: list[dict]) -> str:
    if not rows:
        return ""
    keys = list(rows[0])
    cells = [[_cell(r.get(k)) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    lines = ["  ".join(k.ljust(w) for k, w in zip(keys, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, dict):
        return ";".join(f"{k}:{_cell(x)}" for k, x in v.items())
    return "" if v is None else str(v)


def _csv(rows: list[dict]) -> str:
    import csv
    import io
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def _render(rows: list[dict], fmt: str, payload=None) -> str:
    if fmt == "json":
        return _json(payload if payload is not None else rows)
    if fmt == "csv":
        return _csv(rows)
    return _table(rows)


# --- commands ----------------------------------------------------------------

def _moments(cfg: RunConfig):
    p = make_polytope(cfg.polytope, cfg.dim)
    if cfg.method == "quadrature":
        r = estimators.estimate_quadrature3(p, cfg.grid, cfg.grid)
    else:
        r = estimators.estimate_mc(p, cfg.samples, cfg.seed, cfg.workers)
    if cfg.format == "csv":
        return estimators.reports_to_csv([r]), 0
    if cfg.format == "table":
        return _table([r.csv_row()]), 0
    return _json(r.to_dict()), 0


def _reference(cfg: RunConfig):
    table = closedforms.reference_table()
    if cfg.format == "table":
        return table.to_text(), 0
    rows = table.to_dict()
    return _render(rows, cfg.format), 0


def _vertex_dist(cfg: RunConfig):
    p = make_polytope(cfg.polytope, cfg.dim)
    hist, se, mean, mean_se = estimators.vertex_distribution(p, cfg.samples, cfg.seed, cfg.workers)
    rows = [{"nverts": k, "probability": hist[k], "se": se[k]} for k in sorted(hist)]
    payload = {"polytope": p.label, "n_samples": cfg.samples, "seed": cfg.seed,
               "distribution": rows, "expected_nverts": mean, "se_expected_nverts": mean_se}
    return _render(rows, cfg.format, payload), 0


def _xcheck(cfg: RunConfig):
    bodies = list(oracles.BODIES)
    if cfg.polytope is not None:
        bodies = [f"{parse_name(cfg.polytope).value}3"]
    rows = [oracles.cross_check(b, cfg.samples, cfg.seed).to_dict() for b in bodies]
    return _render(rows, cfg.format), 0


def _density(cfg: RunConfig):
    bodies = [Name.SQUARE, Name.TRIANGLE]
    if cfg.polytope is not None:
        bodies = [parse_name(cfg.polytope)]
    rows = []
    for b in bodies:
        if b not in oracles.WIDTH_SUPPORT:
            raise ConfigurationError("density needs square or triangle")
        lo, hi = oracles.WIDTH_SUPPORT[b]
        chi = oracles.width_chi2(b, cfg.samples, seed=cfg.seed)
        rows.append({"body": b.value, "support_lo": lo, "support_hi": hi,
                     "normalization": oracles.width_cdf(b, hi) - oracles.width_cdf(b, lo),
                     "chi2": chi.statistic, "dof": chi.dof, "p_value": chi.p_value})
    return _render(rows, cfg.format), 0


def _identity(cfg: RunConfig):
    r = oracles.distribution_identity_test(cfg.samples, cfg.seed, cfg.workers)
    return _render([r.to_dict()], cfg.format, r.to_dict()), 0


def validation_rows(report: estimators.MomentReport, body: str, table) -> list[dict]:
    """z-scores of a Monte Carlo report against every exact table entry."""
    rows = []
    checks = [(f"E_{k}", report.mean(k), report.se(k)) for k in estimators.MOMENTS]
    checks.append(("E_nverts", report.mean_nverts, report.se_nverts))
    for k, prob in report.vertex_hist.items():
        checks.append((f"P{k}", prob, report.vertex_se[k]))
    for key, est, se in checks:
        name = f"{body}.{key}"
        if name not in table or table[name].status is not closedforms.Status.EXACT:
            continue
        ref = table.value(name)
        if se > 0:
            z = (est - ref) / se
        else:
            z = 0.0 if abs(est - ref) <= 1e-12 * max(1.0, abs(ref)) else math.inf
        rows.append({"key": name, "reference": ref, "estimate": est, "se": se, "z": z,
                     "pass": abs(z) <= Z_LIMIT})
    return rows


def _validate(cfg: RunConfig):
    table = closedforms.reference_table()
    dims = [cfg.dim] if cfg.dim else [3, 4]
    rows = []
    for d in dims:
        bodies = all_polytopes(d)
        if cfg.polytope is not None:
            bodies = [make_polytope(cfg.polytope, d)]
        for p in bodies:
            r = estimators.estimate_mc(p, cfg.samples, cfg.seed, cfg.workers)
            rows += validation_rows(r, p.label, table)
    ok = all(r["pass"] for r in rows)
    payload = {"passed": ok, "z_limit": Z_LIMIT, "entries": rows}
    return _render(rows, cfg.format, payload), 0 if ok else 1


HANDLERS = {
    "moments": _moments, "reference": _reference, "vertex-dist": _vertex_dist,
    "xcheck": _xcheck, "density": _density, "identity-test": _identity, "validate": _validate,
}


def run(cfg: RunConfig, stream=None) -> int:
    text, status = HANDLERS[cfg.command](cfg)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)
    return status


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except (ConfigurationError, OSError) as exc:
        print(f"polyshadow: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
