"""Run configuration documents (TOML) and their translation into sweep specs.

A document is a flat table.  Run keys (``scenario``, ``out``, ``format``,
``threads`` and the convention switches) sit next to unit-suffixed parameter
keys such as ``kappa_b_hz = 100``, which override the scenario's defaults.
Custom grids go in ``[[axes]]`` tables::

    scenario = "fig4"
    threads = 4
    power_w = 1.0

    [[axes]]
    name = "temperature"
    start = 0.0
    stop = 0.3
    points = 61
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from magsim.entanglement import Convention
from magsim.errors import ConfigError, MagsimError
from magsim.mean_field import Method
from magsim.params import Direction, build_params, param_keys
from magsim.scenarios import AXES, Axis, SweepSpec, preset, preset_names

FORMATS = ("csv", "json")
INTERPRETATIONS = ("caption", "text")
THREADS_ENV = "MAGSIM_THREADS"

RUN_KEYS = frozenset({
    "scenario", "out", "format", "threads", "points", "directions", "outputs", "axes",
    "logneg_convention", "gmb_2pi_interpretation", "meanfield_mode",
})
AXIS_KEYS = frozenset({"name", "start", "stop", "points", "values"})


@dataclass(frozen=True)
class RunConfig:
    scenario: Optional[str] = None
    overrides: dict[str, Any] = field(default_factory=dict)
    axes: Optional[tuple[Axis, ...]] = None
    directions: Optional[tuple[Direction, ...]] = None
    outputs: Optional[tuple[str, ...]] = None
    out: Optional[str] = None
    format: str = "csv"
    threads: Optional[int] = None
    points: Optional[int] = None
    logneg_convention: Convention = Convention.NORMALIZED
    gmb_2pi_interpretation: str = "caption"
    meanfield_mode: Method = Method.CLOSED_FORM

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigError(f"format: expected one of {', '.join(FORMATS)}, got {self.format!r}")
        if self.threads is not None and (isinstance(self.threads, bool) or not isinstance(self.threads, int)
                                         or self.threads < 1):
            raise ConfigError(f"threads: expected an integer >= 1, got {self.threads!r}")
        if self.points is not None and (isinstance(self.points, bool) or not isinstance(self.points, int)
                                        or self.points < 2):
            raise ConfigError(f"points: expected an integer >= 2, got {self.points!r}")
        if self.gmb_2pi_interpretation not in INTERPRETATIONS:
            raise ConfigError(f"gmb_2pi_interpretation: expected caption or text, got "
                              f"{self.gmb_2pi_interpretation!r}")
        if self.scenario is not None and self.scenario not in preset_names():
            raise ConfigError(f"scenario: unknown preset {self.scenario!r}")

    def sweep_spec(self) -> SweepSpec:
        """The sweep this configuration describes."""
        try:
            if self.scenario is not None:
                spec = preset(
                    self.scenario,
                    points=self.points,
                    overrides=self.overrides,
                    gmb_2pi_interpretation=self.gmb_2pi_interpretation,
                    meanfield_mode=self.meanfield_mode,
                    logneg_convention=self.logneg_convention,
                )
                changes = {k: v for k, v in (("axes", self.axes), ("directions", self.directions),
                                              ("outputs", self.outputs)) if v is not None}
                return _rebuild(spec, **changes) if changes else spec
            if self.axes is None or self.outputs is None:
                raise ConfigError("a configuration without a scenario needs axes and outputs")
            return SweepSpec(
                build_params(self.overrides),
                self.axes,
                self.directions or (Direction.FORWARD, Direction.BACKWARD),
                self.outputs,
                meanfield_mode=self.meanfield_mode,
                logneg_convention=self.logneg_convention,
            )
        except ConfigError:
            raise
        except MagsimError as exc:
            raise ConfigError(str(exc)) from exc


def _rebuild(spec, **changes):
    import dataclasses
    return dataclasses.replace(spec, **changes)


def _enum_value(enum_cls, key, value):
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in enum_cls)
        raise ConfigError(f"{key}: expected one of {choices}, got {value!r}") from None


def _parse_axes(raw) -> tuple[Axis, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("axes: expected a non-empty array of tables")
    axes = []
    for i, table in enumerate(raw):
        if not isinstance(table, dict):
            raise ConfigError(f"axes[{i}]: expected a table")
        unknown = set(table) - AXIS_KEYS
        if unknown:
            raise ConfigError(f"axes[{i}]: unknown key(s) {', '.join(sorted(unknown))}")
        name = table.get("name")
        if name not in AXES:
            raise ConfigError(f"axes[{i}].name: expected one of {', '.join(AXES)}, got {name!r}")
        try:
            if "values" in table:
                axes.append(Axis(name, tuple(table["values"])))
            elif {"start", "stop", "points"} <= set(table):
                axes.append(Axis.linspace(name, table["start"], table["stop"], table["points"]))
            else:
                raise ConfigError(f"axes[{i}]: give either values or start, stop and points")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"axes[{i}]: {exc}") from exc
    return tuple(axes)


def config_from_mapping(doc: dict[str, Any]) -> RunConfig:
    """Validate a parsed document and apply defaults."""
    allowed = RUN_KEYS | param_keys()
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    kwargs: dict[str, Any] = {}
    for key in ("scenario", "out", "format", "threads", "points", "gmb_2pi_interpretation"):
        if key in doc:
            kwargs[key] = doc[key]
    if "logneg_convention" in doc:
        kwargs["logneg_convention"] = _enum_value(Convention, "logneg_convention", doc["logneg_convention"])
    if "meanfield_mode" in doc:
        kwargs["meanfield_mode"] = _enum_value(Method, "meanfield_mode", doc["meanfield_mode"])
    if "directions" in doc:
        if not isinstance(doc["directions"], list):
            raise ConfigError("directions: expected an array")
        kwargs["directions"] = tuple(_enum_value(Direction, "directions", d) for d in doc["directions"])
    if "outputs" in doc:
        if not isinstance(doc["outputs"], list):
            raise ConfigError("outputs: expected an array")
        kwargs["outputs"] = tuple(str(o) for o in doc["outputs"])
    if "axes" in doc:
        kwargs["axes"] = _parse_axes(doc["axes"])
    kwargs["overrides"] = {k: v for k, v in doc.items() if k not in RUN_KEYS}
    for key, value in kwargs["overrides"].items():
        if key == "angular":
            if not isinstance(value, bool):
                raise ConfigError("angular: expected true or false")
        elif isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
    return RunConfig(**kwargs)


def parse_config(text: str) -> RunConfig:
    """Parse a TOML run configuration.

    Raises
    ------
    ConfigError
        On a syntax error (the message carries line and column) or a schema
        violation (the message names the offending key).
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    return config_from_mapping(doc)


def load_config(path: str | os.PathLike) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {os.fspath(path)!r}: {exc.strerror}") from None
    return parse_config(text)


def threads_from_env(default: int = 1) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}: expected an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV}: expected an integer >= 1, got {value}")
    return value
