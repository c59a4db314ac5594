"""Command-line front end: ``pinnbc run``.

Reads an optional TOML config, applies flag overrides, trains one case or the
whole four-case suite, and writes CSV/text results::

    pinnbc run --problem bar --strategy reparam --out results/
    pinnbc run --suite --config suite.toml --out results/

Exit codes: 0 success, 2 config error, 3 training diverged, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .bc import LEGAL, make_strategy
from .problems import BarSpec, BeamSpec
from .trainer import CaseFailure, ExperimentReport, SuiteResult, TrainConfig, TrainingDiverged, run_suite, train

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO = 0, 2, 3, 4

SOLUTION_HEADER = ["x", "predicted", "exact", "abs_error"]
HISTORY_HEADER = ["epoch", "total_loss", "residual_term", "bc_term"]
SUMMARY_HEADER = ["case", "percent_error", "bc_deviation_x0", "bc_deviation_xL"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    problem: str = "bar"
    strategy: str = "reparam"
    suite: bool = False
    bar: BarSpec = field(default_factory=BarSpec)
    beam: BeamSpec = field(default_factory=BeamSpec)
    lam1: float = 100.0
    lam2: float = 100.0
    train: TrainConfig = field(default_factory=TrainConfig)
    out: Path = Path("results")

    def validate(self):
        if self.suite:
            return
        if self.problem not in LEGAL:
            raise ConfigError(f"problem: expected 'bar' or 'beam', got {self.problem!r}")
        if self.strategy not in LEGAL[self.problem]:
            raise ConfigError(
                f"strategy: {self.strategy!r} is not valid for problem {self.problem!r} "
                f"(allowed: {', '.join(LEGAL[self.problem])})"
            )


def _section(data: dict, name: str, cls) -> dict:
    """Keyword arguments for ``cls`` from a TOML table, rejecting unknown keys by name."""
    table = data.get(name, {})
    if not isinstance(table, dict):
        raise ConfigError(f"[{name}] must be a table")
    allowed = {f.name for f in fields(cls)}
    for key in table:
        if key not in allowed:
            raise ConfigError(f"unknown key {name}.{key}")
    return dict(table)


def load_config(path) -> RunConfig:
    """Parse a TOML run config.

    Top-level keys ``problem``, ``strategy``, ``suite``, ``out``; tables
    ``[physical.bar]`` (E, A, L, P), ``[physical.beam]`` (E, I, L),
    ``[penalty]`` (lam1, lam2) and ``[train]`` (any TrainConfig field).
    """
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    top = {"problem", "strategy", "suite", "out", "physical", "penalty", "train"}
    for key in data:
        if key not in top:
            raise ConfigError(f"unknown key {key}")
    physical = data.get("physical", {})
    for key in physical:
        if key not in ("bar", "beam"):
            raise ConfigError(f"unknown key physical.{key}")
    penalty = data.get("penalty", {})
    for key in penalty:
        if key not in ("lam1", "lam2"):
            raise ConfigError(f"unknown key penalty.{key}")
    try:
        cfg = RunConfig(
            problem=data.get("problem", "bar"),
            strategy=data.get("strategy", "reparam"),
            suite=bool(data.get("suite", False)),
            bar=BarSpec(**_section(physical, "bar", BarSpec)),
            beam=BeamSpec(**_section(physical, "beam", BeamSpec)),
            lam1=float(penalty.get("lam1", 100.0)),
            lam2=float(penalty.get("lam2", 100.0)),
            train=TrainConfig(**_section(data, "train", TrainConfig)),
            out=Path(data.get("out", "results")),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return cfg


def _fmt(v: float) -> str:
    # repr is the shortest string that round-trips the float64 exactly
    return repr(float(v))


def write_solution(report: ExperimentReport, path: Path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SOLUTION_HEADER)
        for x, p, e in zip(report.x, report.predicted, report.exact):
            w.writerow([_fmt(x), _fmt(p), _fmt(e), _fmt(abs(p - e))])


def write_history(report: ExperimentReport, path: Path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HISTORY_HEADER)
        for epoch, total, res, bc in report.history:
            w.writerow([epoch, _fmt(total), _fmt(res), _fmt(bc)])


def format_report(report: ExperimentReport) -> str:
    lines = [f"{report.label}", ""]
    lines.append("config:")
    for k, v in report.config.items():
        lines.append(f"  {k} = {v}")
    lines.append("")
    lines.append(f"epochs run: {report.epochs_run}")
    lines.append(f"percent error (relative L2): {_fmt(report.percent_error)}")
    lines.append(f"max pointwise error: {_fmt(report.max_error)}")
    lines.append(f"bc deviation at x=0: {_fmt(report.bc_deviation_x0)}")
    lines.append(f"bc deviation at x=L: {_fmt(report.bc_deviation_xL)}")
    lines.append(f"final loss: {_fmt(report.final.total)}")
    lines.append(f"  residual term: {_fmt(report.final.residual_term)}")
    for t in report.final.bc_terms:
        lines.append(
            f"  bc {t.label}: raw {_fmt(t.raw)}, squared {_fmt(t.raw * t.raw)}, weighted {_fmt(t.weighted)}"
        )
    return "\n".join(lines) + "\n"


def emit_plotdata(report: ExperimentReport, out_dir) -> list[Path]:
    """Write ``solution.csv``, ``history.csv`` and ``report.txt`` for one case."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [out_dir / "solution.csv", out_dir / "history.csv", out_dir / "report.txt"]
    write_solution(report, paths[0])
    write_history(report, paths[1])
    paths[2].write_text(format_report(report))
    return paths


def write_summary(suite: SuiteResult, path: Path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_HEADER)
        for case, err, d0, dl in suite.summary():
            w.writerow([case, _fmt(err), _fmt(d0), _fmt(dl)])


def read_solution(path):
    """Load a ``solution.csv`` back as ``(x, predicted, exact, abs_error)`` arrays."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return tuple(data[:, i] for i in range(4))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pinnbc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="train one case or the four-case suite")
    run.add_argument("--config", type=Path, help="TOML run config")
    run.add_argument("--suite", action="store_true", help="run all four cases")
    run.add_argument("--problem", choices=["bar", "beam"])
    run.add_argument("--strategy", help="penalty | reparam (bar) | hybrid (beam)")
    run.add_argument("--epochs", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--nodes", type=int)
    run.add_argument("--out", type=Path)
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def merge_overrides(cfg: RunConfig, args) -> RunConfig:
    updates = {}
    if args.suite:
        updates["suite"] = True
    if args.problem is not None:
        updates["problem"] = args.problem
    if args.strategy is not None:
        updates["strategy"] = args.strategy
    if args.out is not None:
        updates["out"] = args.out
    train_updates = {}
    for flag, key in (("epochs", "epochs"), ("seed", "seed"), ("nodes", "n_nodes")):
        value = getattr(args, flag)
        if value is not None:
            train_updates[key] = value
    try:
        if train_updates:
            updates["train"] = replace(cfg.train, **train_updates)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return replace(cfg, **updates)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = merge_overrides(cfg, args)
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if cfg.suite:
            suite = run_suite(cfg.train, cfg.bar, cfg.beam, cfg.lam1, cfg.lam2)
            cfg.out.mkdir(parents=True, exist_ok=True)
            for n, r in enumerate(suite.results, start=1):
                if isinstance(r, CaseFailure):
                    print(f"{r.label}: diverged ({r.error})", file=sys.stderr)
                    continue
                emit_plotdata(r, cfg.out / f"case{n}")
            write_summary(suite, cfg.out / "summary.csv")
            for case, err, d0, dl in suite.summary():
                print(f"case {case}: error {err:.4f}%  bc deviation x=0 {d0:.3e}  x=L {dl:.3e}")
            return EXIT_DIVERGED if suite.failures else EXIT_OK

        spec = cfg.bar if cfg.problem == "bar" else cfg.beam
        strategy = make_strategy(cfg.strategy, cfg.problem, spec.L, cfg.lam1, cfg.lam2)
        try:
            report = train(spec, strategy, cfg.train)
        except TrainingDiverged as exc:
            print(f"training diverged: {exc}", file=sys.stderr)
            return EXIT_DIVERGED
        emit_plotdata(report, cfg.out)
        print(f"{report.label}: error {report.percent_error:.4f}%")
        return EXIT_OK
    except OSError as exc:
        print(f"I/O error: {exc.filename or ''} {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
