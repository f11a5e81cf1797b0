"""``lgdot`` command-line interface.

Exit codes: 0 success, 1 validation failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from lgdot import __version__, densmat
from lgdot.config import (
    FIGURES,
    FigureSpec,
    RunConfig,
    config_record,
    figure_spec,
    parse_config,
)
from lgdot.errors import InputError, LGDotError
from lgdot.lganalysis import LGPoint, SweepResult, lg_point, sweep
from lgdot.svg import emit_svg
from lgdot.validation import run_validation

log = logging.getLogger("lgdot")

CSV_HEADER = ("t_ps", "k_t", "k_2t", "k_plus", "k_minus")

AXIS_LABELS = {
    "s_fss": ("S", "ueV"),
    "g_noise": ("g", ""),
    "temperature": ("T", "K"),
    "gate_width": ("omega", "ps"),
}


def _num(x: float) -> str:
    return repr(float(x))


def write_points_csv(path: Path, points: Sequence[LGPoint]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for pt in points:
            w.writerow([_num(pt.t), _num(pt.k_t), _num(pt.k_2t), _num(pt.k_plus), _num(pt.k_minus)])


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _axis_label(axis: str, value: float) -> str:
    sym, unit = AXIS_LABELS[axis]
    return f"{sym} = {value:g} {unit}".rstrip()


def evolve_points(cfg: RunConfig) -> list[LGPoint]:
    return [lg_point(cfg.dot, t) for t in cfg.t_grid()]


def cmd_evolve(cfg: RunConfig, prefix: str = "evolve", title: str = "") -> int:
    points = evolve_points(cfg)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    if "csv" in cfg.formats:
        write_points_csv(out / f"{prefix}.csv", points)
    if "json" in cfg.formats:
        doc = {"config": config_record(cfg), "points": [dataclasses.asdict(pt) for pt in points]}
        _write_text(out / f"{prefix}.json", _json(doc))
    if "svg" in cfg.formats:
        ts = [pt.t for pt in points]
        series = [
            ("K+", ts, [pt.k_plus for pt in points]),
            ("K-", ts, [pt.k_minus for pt in points]),
        ]
        _write_text(out / f"{prefix}.svg", emit_svg(series, title=title or "Leggett-Garg combinations"))
    log.info("wrote %d time points to %s", len(points), out)
    return 0


def _summary_rows(res: SweepResult):
    for value, mk, tv in zip(res.axis_values, res.min_kminus, res.first_violation_t):
        yield [_num(value), _num(mk), "none" if tv is None else _num(tv)]


def cmd_sweep(cfg: RunConfig, prefix: str = "sweep", title: str = "", workers: int = 1) -> int:
    if cfg.sweep_axis is None:
        raise InputError("sweep needs run.sweep_axis and run.sweep_values in the config")
    res = sweep(cfg.dot, cfg.sweep_axis, cfg.sweep_values, cfg.t_grid(), workers=workers)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    axis = res.axis_name
    if "csv" in cfg.formats:
        for i, curve in enumerate(res.curves):
            write_points_csv(out / f"{prefix}_{axis}_{i:02d}.csv", curve)
        with open(out / f"{prefix}_summary.csv", "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([axis, "min_k_minus", "first_violation_t_ps"])
            w.writerows(_summary_rows(res))
    if "json" in cfg.formats:
        doc = {
            "config": config_record(cfg),
            "axis": axis,
            "curves": [
                {
                    "value": v,
                    "min_k_minus": mk,
                    "first_violation_t": tv,
                    "points": [dataclasses.asdict(pt) for pt in curve],
                }
                for v, mk, tv, curve in zip(res.axis_values, res.min_kminus, res.first_violation_t, res.curves)
            ],
        }
        _write_text(out / f"{prefix}.json", _json(doc))
    if "svg" in cfg.formats:
        series = [
            (_axis_label(axis, v), [pt.t for pt in curve], [pt.k_minus for pt in curve])
            for v, curve in zip(res.axis_values, res.curves)
        ]
        _write_text(
            out / f"{prefix}.svg",
            emit_svg(series, title=title or f"K- versus t for several {axis}", y_label="K-"),
        )
    for row in _summary_rows(res):
        print("\t".join(row))
    return 0


def cmd_figure(spec: FigureSpec, workers: int = 1) -> int:
    cfg = spec.config
    if cfg.sweep_axis is None:
        return cmd_evolve(cfg, prefix=spec.figure_id, title=f"{spec.figure_id}: K+ and K-")
    return cmd_sweep(cfg, prefix=spec.figure_id, title=f"{spec.figure_id}: K- versus t", workers=workers)


def cmd_validate(propagate_fn: Optional[Callable] = None) -> int:
    results = run_validation(propagate_fn or densmat.propagate)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}  ({r.seconds:.1f} s)")
    ok = all(r.passed for r in results)
    print("all checks passed" if ok else "validation FAILED")
    return 0 if ok else 1


def _load_config(path: str, out: Optional[str]) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    cfg = parse_config(text)
    if out is not None:
        cfg = dataclasses.replace(cfg, output_dir=Path(out))
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lgdot", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lgdot {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log applied defaults and progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="K(t), K(2t), K+ and K- on a time grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (overrides run.output_dir)")

    p = sub.add_parser("sweep", help="K- curves over one swept parameter")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (overrides run.output_dir)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("figure", help="reproduce one of the figure setups")
    p.add_argument("figure_id", choices=sorted(FIGURES))
    p.add_argument("--out", default="out")
    p.add_argument("--workers", type=int, default=1)

    sub.add_parser("validate", help="run the self-certification suite")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "evolve":
            return cmd_evolve(_load_config(args.config, args.out))
        if args.command == "sweep":
            return cmd_sweep(_load_config(args.config, args.out), workers=args.workers)
        if args.command == "figure":
            return cmd_figure(figure_spec(args.figure_id, args.out), workers=args.workers)
        return cmd_validate()
    except InputError as exc:
        print(f"lgdot: error: {exc}", file=sys.stderr)
        return 2
    except LGDotError as exc:
        print(f"lgdot: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
