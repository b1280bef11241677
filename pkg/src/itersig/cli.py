"""Command line runner.

    itersig run CONFIG [--out DIR] [--threads K]
    itersig validate CONFIG
    itersig identities [--seed S]
"""

from __future__ import annotations

import argparse
import csv
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import yaml

from . import __version__
from .config import ConfigError, ExperimentConfig, dump_config, load_config
from .ergodic_lab import ConvergenceReport, ErdosRenyiReport, as_sweeps, er_scan, l1_sweeps
from .identities import run_identities
from .iterated_sums import coordinate_track
from .processes import generate, replication_seed

THREADS_ENV = "ITERSIG_THREADS"


def _fmt(x) -> str:
    if isinstance(x, (int,)) or (hasattr(x, "dtype") and x.dtype.kind in "iu"):
        return str(int(x))
    return format(float(x), ".17g")


def emit_csv(report, path: str | Path) -> Path:
    """Write one row per checkpoint; floats with 17 significant digits."""
    path = Path(path)
    if isinstance(report, ErdosRenyiReport):
        header = ["n", "ell_n", "statistic", "predicted_limit", "I_alpha"]
        rows = [
            [n, ell, s, report.predicted_limit, report.rate_value]
            for n, ell, s in zip(report.checkpoints, report.ell, report.statistic)
        ]
    elif isinstance(report, ConvergenceReport):
        header = ["n", "value", "limit", "abs_error"]
        cols = [report.checkpoints, report.values, [report.limit] * len(report.checkpoints), report.errors]
        if report.stderr is not None:
            header.append("stderr")
            cols.append(report.stderr)
        rows = [list(r) for r in zip(*cols)]
    else:
        raise TypeError(f"cannot write {type(report).__name__}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def _safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", text)


def _target(outdir: Path, name: str) -> Path:
    path = (outdir / _safe_name(name)).resolve()
    if path.parent != outdir.resolve():
        raise ConfigError(f"refusing to write {path} outside {outdir}")
    return path


def _jobs(cfg: ExperimentConfig, threads: int):
    """Yield ``(filename, report)`` pairs in a fixed order."""
    kind = cfg.experiment
    model = cfg.build_model()
    words = [tuple(w) for w in cfg.words]
    if kind in ("as", "continuous"):
        h = cfg.step if kind == "continuous" else None
        for r in as_sweeps(model, words, cfg.checkpoints, cfg.seed, cfg.depth, h=h, kahan=cfg.kahan):
            yield f"{kind}_w{r.word}.csv", r
    elif kind == "l1":
        reports = l1_sweeps(model, words, cfg.checkpoints, cfg.replications, cfg.seed, cfg.depth,
                            h=cfg.step, kahan=cfg.kahan, threads=threads)
        for r in reports:
            yield f"l1_w{r.word}.csv", r
    elif kind == "er":
        pairs = [(w, a) for w in words for a in cfg.alphas]
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            reports = list(pool.map(lambda p: er_scan(model, p[0], p[1], cfg.checkpoints, cfg.seed), pairs))
        for r in reports:
            yield f"er_w{r.word}_a{r.alpha!r}.csv", r


def _write_track(cfg: ExperimentConfig, outdir: Path) -> list[Path]:
    model = cfg.build_model()
    series = generate(model, cfg.checkpoints[-1], replication_seed(cfg.seed, 0))
    paths = []
    for w in cfg.words:
        track = coordinate_track(series, w)
        path = _target(outdir, f"er_w{track.word}_track.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["m", "value"])
            for m, v in zip(range(0, len(track.values), cfg.decimation), track.decimate(cfg.decimation)):
                writer.writerow([m, _fmt(v)])
        paths.append(path)
    return paths


def run(config_path: str | Path, out: str | Path | None = None, threads: int = 1) -> int:
    try:
        cfg = load_config(config_path)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    outdir = Path(out if out is not None else cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        if cfg.experiment == "identity-suite":
            results = run_identities(cfg.seed)
            path = _target(outdir, "identities.csv")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["check", "passed", "total"])
                for r in results:
                    writer.writerow([r.name, r.passed, r.total])
                    print(f"{r.name}: {r.passed}/{r.total} passed")
            written.append(path)
            failed = [r for r in results if not r.ok]
        else:
            failed = []
            for name, report in _jobs(cfg, threads):
                written.append(emit_csv(report, _target(outdir, name)))
            if cfg.experiment == "er" and cfg.decimation > 0:
                written.extend(_write_track(cfg, outdir))
    except (ValueError, ArithmeticError, RuntimeError) as e:
        print(f"error: {config_path}: {e}", file=sys.stderr)
        return 1
    manifest = {
        "config": cfg.to_dict(),
        "version": __version__,
        "seed": cfg.seed,
        "files": [p.name for p in written],
    }
    _target(outdir, "manifest.yaml").write_text(
        yaml.safe_dump(manifest, sort_keys=False, default_flow_style=None), encoding="utf-8"
    )
    for p in written:
        print(p)
    return 1 if failed else 0


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="itersig", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config and write CSVs")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory (overrides the config)")
    p_run.add_argument("--threads", type=int, default=_default_threads(),
                       help=f"worker threads (default from ${THREADS_ENV} or 1)")

    p_val = sub.add_parser("validate", help="parse and validate a config")
    p_val.add_argument("config")

    p_id = sub.add_parser("identities", help="run the built-in identity suite")
    p_id.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)

    if args.command == "run":
        return run(args.config, args.out, max(1, args.threads))
    if args.command == "validate":
        try:
            cfg = load_config(args.config)
        except ConfigError as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        sys.stdout.write(dump_config(cfg))
        return 0
    results = run_identities(args.seed)
    for r in results:
        print(f"{r.name}: {r.passed}/{r.total} passed")
    return 0 if all(r.ok for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
