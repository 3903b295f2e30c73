"""Command-line front end: run experiment files and presets, write CSV/JSON tables."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from . import __version__
from .config import ExperimentSpec, Series, apply_param, parse_config, spec_from_dict, trial_config_dict
from .errors import ConfigError
from .sim import TABLE_FPRS, roc_curve, simulate, tpr_at_fpr

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_ACCEPTANCE = 0, 1, 2, 3
ROC_HEADER = ("threshold", "fpr", "tpr")
RATE_HEADER = ("sweep_value", "fpr_target", "tpr")


@dataclass
class Table:
    stem: str
    header: tuple[str, ...]
    rows: list[tuple]

    def records(self) -> list[dict]:
        return [dict(zip(self.header, row)) for row in self.rows]


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    tables: list[Table]
    points: list[dict] = field(default_factory=list)


def _slug(text) -> str:
    return re.sub(r"[^A-Za-z0-9.=+-]+", "_", str(text)).strip("_")


def preset_names() -> list[str]:
    files = resources.files("risauth").joinpath("presets").iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".json"))


def load_preset(name: str) -> ExperimentSpec:
    if name not in preset_names():
        raise ConfigError("preset", f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    text = resources.files("risauth").joinpath("presets", f"{name}.json").read_text()
    return spec_from_dict(json.loads(text), default_name=name)


def override(spec: ExperimentSpec, seed=None, trials=None, out=None, formats=None) -> ExperimentSpec:
    base = spec.base
    if seed is not None:
        base = replace(base, master_seed=seed)
    if trials is not None:
        base = replace(base, n_trials=trials)
    return replace(
        spec, base=base,
        output_dir=Path(out) if out is not None else spec.output_dir,
        formats=tuple(formats) if formats is not None else spec.formats,
    )


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Simulate every (series, sweep value) point and assemble the output tables."""
    series = spec.series or (Series("", {}),)
    param, values = spec.sweep if spec.sweep else ("", (None,))
    tables, points = [], []
    for s in series:
        cfg_s = spec.base
        for k, v in s.overrides.items():
            cfg_s = apply_param(cfg_s, k, v)
        rate_rows = []
        for value in values:
            cfg = cfg_s if value is None else apply_param(cfg_s, param, value)
            res = simulate(cfg, workers=workers)
            roc = roc_curve(res.legit, res.attack)
            parts = [spec.name, "roc"]
            if s.label:
                parts.append(_slug(s.label))
            if value is not None:
                parts.append(_slug(f"{param}={value}"))
            tables.append(Table("_".join(parts), ROC_HEADER, [(p.threshold, p.fpr, p.tpr) for p in roc]))
            rates = [tpr_at_fpr(roc, f) for f in TABLE_FPRS]
            label = "" if value is None else value
            rate_rows += [(label, f, r.tpr) for f, r in zip(TABLE_FPRS, rates)]
            points.append({
                "series": s.label, "sweep_parameter": param or None, "sweep_value": value,
                "mean_snr_db": res.mean_snr_db,
                "extrapolated": [f for f, r in zip(TABLE_FPRS, rates) if r.extrapolated],
                "config": trial_config_dict(cfg),
            })
        stem = f"{spec.name}_rates" + (f"_{_slug(s.label)}" if s.label else "")
        tables.append(Table(stem, RATE_HEADER, rate_rows))
        if spec.sweep and not spec.series:
            header = ("fpr_target", *(f"{param}={v}" for v in values))
            grid = {(r[0], r[1]): r[2] for r in rate_rows}
            wide = [(f, *(grid[(v, f)] for v in values)) for f in TABLE_FPRS]
            tables.append(Table(f"{spec.name}_table", header, wide))
    return ExperimentResult(spec, tables, points)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.header)
    writer.writerows(table.rows)
    return buf.getvalue()


def emit_results(tables: list[Table], out_dir, formats, provenance: dict | None = None,
                 name: str = "results") -> list[Path]:
    """Write one CSV per table and/or a single JSON document; return the written paths."""
    if not tables:
        raise ValueError("no tables to write")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc
    paths = []
    try:
        if "csv" in formats:
            for t in tables:
                path = out_dir / f"{t.stem}.csv"
                _atomic_write(path, _csv_text(t))
                paths.append(path)
        if "json" in formats:
            doc = dict(provenance or {})
            doc["tables"] = {t.stem: t.records() for t in tables}
            path = out_dir / f"{name}.json"
            _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
            paths.append(path)
    except OSError as exc:
        raise OSError(f"writing results to {out_dir}: {exc}") from exc
    return paths


def write_experiment(result: ExperimentResult) -> list[Path]:
    spec = result.spec
    provenance = {
        "tool": "risauth",
        "version": __version__,
        "name": spec.name,
        "master_seed": spec.base.master_seed,
        "config": trial_config_dict(spec.base),
        "sweep": None if spec.sweep is None else {"parameter": spec.sweep[0], "values": list(spec.sweep[1])},
        "series": [{"label": s.label, "overrides": s.overrides} for s in spec.series],
        "points": result.points,
    }
    return emit_results(result.tables, spec.output_dir, spec.formats, provenance, spec.name)


def _formats(value: str) -> list[str]:
    return ["csv", "json"] if value == "both" else [value]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risauth", description=__doc__)
    parser.add_argument("--version", action="version", version=f"risauth {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, help="master seed (overrides the file)")
        p.add_argument("--trials", type=int, help="trials per configuration")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=("csv", "json", "both"), help="output format")
        p.add_argument("--workers", type=int, default=1, help="worker processes")

    common(p_run := sub.add_parser("run", help="run an experiment file"))
    p_run.add_argument("config")
    common(p_pre := sub.add_parser("preset", help="run a shipped preset"))
    p_pre.add_argument("name")
    p_ver = sub.add_parser("verify", help="run the acceptance checks")
    p_ver.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    sub.add_parser("list-presets", help="list shipped presets")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-presets":
        for name in preset_names():
            print(name)
        return EXIT_OK
    if args.command == "verify":
        from .acceptance import run_all

        results = run_all(args.only)
        for r in results:
            print(r.line())
        return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE

    try:
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed", "seed must be an unsigned 64-bit integer")
        if args.trials is not None and args.trials < 1:
            raise ConfigError("--trials", "must be >= 1")
        spec = parse_config(args.config) if args.command == "run" else load_preset(args.name)
        spec = override(spec, args.seed, args.trials, args.out,
                        _formats(args.format) if args.format else None)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        paths = write_experiment(run_experiment(spec, workers=args.workers))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
