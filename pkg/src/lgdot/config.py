"""Run configuration: flat ``section.key = value`` files and figure presets.

Grammar, one item per line::

    # comment
    dot.s_fss = 3.0
    [run]              # optional header; bare keys below belong to it
    t_max = 6000

Numbers accept scientific notation, lists are comma separated and
``dot.eta_override = none`` clears the override.  Unknown keys are errors.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from lgdot.cascade import DotParameters
from lgdot.errors import InputError
from lgdot.lganalysis import SWEEP_AXES

log = logging.getLogger(__name__)

FORMATS = ("csv", "json", "svg")


class ConfigError(InputError):
    pass


@dataclass(frozen=True)
class RunConfig:
    dot: DotParameters = field(default_factory=DotParameters)
    t_max: float = 6000.0
    t_steps: int = 601
    output_dir: Path = Path("out")
    formats: tuple[str, ...] = FORMATS
    sweep_axis: Optional[str] = None
    sweep_values: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        if not (isinstance(self.t_max, (int, float)) and math.isfinite(self.t_max) and self.t_max > 0):
            raise ConfigError(f"run.t_max = {self.t_max!r} out of range (must be > 0)")
        if isinstance(self.t_steps, bool) or not isinstance(self.t_steps, int) or self.t_steps < 2:
            raise ConfigError(f"run.t_steps = {self.t_steps!r} out of range (integer >= 2)")
        fmts = tuple(f for f in FORMATS if f in self.formats)
        unknown = set(self.formats) - set(FORMATS)
        if unknown or not fmts:
            raise ConfigError(
                f"run.formats = {','.join(self.formats)!r} invalid (non-empty subset of {FORMATS})"
            )
        object.__setattr__(self, "formats", fmts)
        if self.sweep_axis is not None:
            if self.sweep_axis not in SWEEP_AXES:
                raise ConfigError(
                    f"run.sweep_axis = {self.sweep_axis!r} invalid (one of {SWEEP_AXES})"
                )
            if not self.sweep_values:
                raise ConfigError("run.sweep_values must be non-empty when run.sweep_axis is set")
        if self.sweep_values is not None:
            vals = tuple(float(v) for v in self.sweep_values)
            object.__setattr__(self, "sweep_values", vals)
            if self.sweep_axis is not None:
                for v in vals:
                    try:
                        dataclasses.replace(self.dot, **{self.sweep_axis: v})
                    except InputError as exc:
                        raise ConfigError(f"run.sweep_values: {exc}") from exc

    def t_grid(self) -> list[float]:
        step = self.t_max / (self.t_steps - 1)
        return [k * step for k in range(self.t_steps - 1)] + [float(self.t_max)]


def _float(text: str) -> float:
    return float(text)


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _optional_float(text: str) -> Optional[float]:
    return None if text.lower() == "none" else float(text)


def _optional_str(text: str) -> Optional[str]:
    return None if text.lower() == "none" else text


_DOT_KEYS = {
    "s_fss": _float,
    "level_energies": _float_list,
    "gamma_x": _float,
    "gamma_dephase0": _float,
    "gamma_phonon": _float,
    "temperature": _float,
    "g_noise": _float,
    "gate_width": _float,
    "eta_override": _optional_float,
}
_RUN_KEYS = {
    "t_max": _float,
    "t_steps": int,
    "output_dir": str,
    "formats": _str_list,
    "sweep_axis": _optional_str,
    "sweep_values": _float_list,
}
_SECTIONS = {"dot": _DOT_KEYS, "run": _RUN_KEYS}


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document, applying defaults."""
    values: dict[str, dict[str, object]] = {"dot": {}, "run": {}}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if "." in key:
            sec, name = key.split(".", 1)
        elif section is not None:
            sec, name = section, key
        else:
            raise ConfigError(f"line {lineno}: key {key!r} has no section")
        full = f"{sec}.{name}"
        if sec not in _SECTIONS or name not in _SECTIONS[sec]:
            raise ConfigError(f"unknown key {full!r}")
        if name in values[sec]:
            raise ConfigError(f"duplicate key {full!r}")
        try:
            values[sec][name] = _SECTIONS[sec][name](value)
        except ValueError:
            raise ConfigError(f"{full} = {value!r} is not a valid value") from None

    for sec, keys in _SECTIONS.items():
        defaults = _defaults(sec)
        for name in keys:
            if name not in values[sec]:
                log.info("default applied: %s.%s = %s", sec, name, _format(defaults[name]))

    try:
        dot = DotParameters(**values["dot"])
    except InputError as exc:
        raise ConfigError(f"dot.{exc}") from exc
    return RunConfig(dot=dot, **values["run"])


def _defaults(section: str) -> dict:
    if section == "dot":
        return {f.name: getattr(DotParameters(), f.name) for f in dataclasses.fields(DotParameters)}
    cfg = RunConfig()
    return {f.name: getattr(cfg, f.name) for f in dataclasses.fields(RunConfig) if f.name != "dot"}


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, (tuple, list)):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for f in dataclasses.fields(DotParameters):
        lines.append(f"dot.{f.name} = {_format(getattr(cfg.dot, f.name))}")
    for f in dataclasses.fields(RunConfig):
        if f.name == "dot":
            continue
        value = getattr(cfg, f.name)
        if f.name == "sweep_values" and value is None:
            continue
        lines.append(f"run.{f.name} = {_format(value)}")
    return "\n".join(lines) + "\n"


def config_record(cfg: RunConfig) -> dict:
    """JSON-ready echo of everything that determines the output data."""
    record = {"dot": dataclasses.asdict(cfg.dot)}
    record["dot"]["level_energies"] = list(cfg.dot.level_energies)
    record["run"] = {
        "t_max": cfg.t_max,
        "t_steps": cfg.t_steps,
        "sweep_axis": cfg.sweep_axis,
        "sweep_values": list(cfg.sweep_values) if cfg.sweep_values is not None else None,
    }
    return record


# Caption parameters; swept grids are our own choice.
FIGURES = {
    "fig2": dict(dot=dict(s_fss=3.0, g_noise=0.0, gate_width=50.0, temperature=5.0), t_max=6000.0, t_steps=601),
    "fig3": dict(
        dot=dict(g_noise=0.3, gate_width=50.0, temperature=5.0),
        sweep_axis="s_fss",
        sweep_values=(0.5, 1.0, 2.0, 3.0, 5.0, 8.0),
    ),
    "fig4": dict(
        dot=dict(s_fss=3.0, gate_width=50.0, temperature=5.0),
        sweep_axis="g_noise",
        sweep_values=(0.0, 0.1, 0.3, 0.6, 1.0),
    ),
    "fig5": dict(
        dot=dict(s_fss=2.5, g_noise=0.2, gate_width=50.0),
        sweep_axis="temperature",
        sweep_values=(4.0, 10.0, 20.0, 40.0, 80.0),
    ),
}
_SWEEP_GRID = dict(t_max=3000.0, t_steps=301)


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    config: RunConfig


def figure_spec(figure_id: str, output_dir: Path | str = Path("out")) -> FigureSpec:
    if figure_id not in FIGURES:
        raise InputError(f"unknown figure {figure_id!r}; expected one of {sorted(FIGURES)}")
    preset = dict(FIGURES[figure_id])
    dot = DotParameters(**preset.pop("dot"))
    if "sweep_axis" in preset:
        preset = {**_SWEEP_GRID, **preset}
    return FigureSpec(figure_id, RunConfig(dot=dot, output_dir=Path(output_dir), **preset))
