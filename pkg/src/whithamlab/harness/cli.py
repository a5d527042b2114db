"""Command line entry point: ``whithamlab <subcommand> [options]``."""
from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from typing import Optional, Sequence

from ..errors import WhithamLabError
from .config import ConfigError, ExperimentConfig, ExperimentKind, default_config, load_config
from .experiments import run_experiment, simulate
from .report import ScalingReport, from_json, render, rows_from_csv, summary
from .suites import run_suites

log = logging.getLogger("whithamlab")

_DEFAULT_KIND = {
    "simulate": ExperimentKind.CONSISTENCY_DIAG,
    "consistency": ExperimentKind.CONSISTENCY_DIAG,
    "corollary": ExperimentKind.COROLLARY_ONESIDED,
    "pipeline": ExperimentKind.THEOREM_PIPELINE,
}
_ALLOWED = {
    "consistency": (ExperimentKind.CONSISTENCY_DIAG, ExperimentKind.CONSISTENCY_WHITHAM),
    "corollary": (ExperimentKind.COROLLARY_ONESIDED,),
    "pipeline": (ExperimentKind.THEOREM_PIPELINE,),
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="whithamlab", description="Whitham model hierarchy laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML experiment config (defaults are built in)")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default: config or csv)")
        p.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("-v", "--verbose", action="store_true")

    common(sub.add_parser("simulate", help="evolve cfg.model and record mean/norm observers"))
    common(sub.add_parser("consistency", help="diagonalization (or Whitham) residual sweep"))
    common(sub.add_parser("corollary", help="one-sided Whitham approximation sweep"))
    common(sub.add_parser("pipeline", help="normal-form pipeline sweep"))
    common(sub.add_parser("suites", help="invariant suites (all three unless --config names one)"))
    rp = sub.add_parser("report", help="summarise or convert a saved CSV/JSON report")
    rp.add_argument("input", help="report file written by another subcommand")
    rp.add_argument("--out")
    rp.add_argument("--format", choices=("csv", "json", "text"), default="text")
    return ap


def _config(args, command: str) -> Optional[ExperimentConfig]:
    if args.config:
        cfg = load_config(args.config)
    elif command == "suites":
        cfg = None
    else:
        cfg = default_config(_DEFAULT_KIND[command])
    if cfg is not None:
        if command in _ALLOWED and cfg.experiment not in _ALLOWED[command]:
            raise ConfigError(f"'{command}' cannot run experiment {cfg.experiment.value}")
        if command == "suites" and not cfg.experiment.is_suite:
            raise ConfigError(f"'suites' needs a suite config, got {cfg.experiment.value}")
        if args.seed is not None:
            cfg = replace(cfg, seeds=args.seed)
    return cfg


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_report(path: str) -> ScalingReport:
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".json") or text.lstrip().startswith("{"):
        return from_json(text)
    rows = rows_from_csv(text)
    return ScalingReport(rows[0].experiment if rows else "unknown", rows)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "report":
            report = _load_report(args.input)
            text = summary(report) + "\n" if args.format == "text" else render(report, args.format)
            _emit(text, args.out)
            return 0
        cfg = _config(args, args.command)
        t0 = time.perf_counter()
        if args.command == "suites":
            report = run_suites(cfg) if cfg is not None else _all_suites(args.seed)
        elif args.command == "simulate":
            report = simulate(cfg)
        else:
            report = run_experiment(cfg, workers=args.workers)
        log.info("%s finished in %.1f s", args.command, time.perf_counter() - t0)
        fmt = args.format or (cfg.output.format if cfg else "csv")
        out = args.out or (cfg.output.path if cfg else None)
        _emit(render(report, fmt), out)
        sys.stderr.write(summary(report) + "\n")
        return 0 if report.passed else 1
    except (WhithamLabError, OSError) as exc:
        sys.stderr.write(f"whithamlab: error: {exc}\n")
        return 2


def _all_suites(seed: Optional[int]) -> ScalingReport:
    from .config import SUITES

    report = None
    for kind in SUITES:
        cfg = default_config(kind)
        if seed is not None:
            cfg = replace(cfg, seeds=seed)
        r = run_suites(cfg)
        report = r if report is None else report.merge(r)
    report.experiment = "suites"
    return report


if __name__ == "__main__":
    raise SystemExit(main())
