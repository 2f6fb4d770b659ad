"""Parameter sweeps over the full pipeline and the named figure presets.

Every grid point runs mean field -> effective coupling -> drift matrix ->
stability -> Lyapunov -> pair entanglement, and/or the transmission
coefficients, for each requested drive direction.  Failures at a point are
recorded on that point and never abort the sweep.
"""

from __future__ import annotations

import itertools
import math
import warnings
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from magsim.constants import TWO_PI
from magsim.entanglement import STANDARD_PAIRS, Convention, ModePair, entanglement_isolation, pair_entanglement
from magsim.errors import MagsimError, ParameterError
from magsim.fluctuations import drift_matrix, stability
from magsim.lyapunov import solve_lyapunov
from magsim.mean_field import Method, effective_coupling, effective_coupling_from_state
from magsim.params import Direction, DriveConfig, SystemParams, build_params
from magsim.transmission import mean_field, transmission_point
from magsim.validation import validate


@dataclass(frozen=True)
class AxisKind:
    column: str
    unit_label: str
    apply: Callable[[SystemParams, float], SystemParams]


def _set_power(p, v):
    return p.replace(P_a=v, P_c=v)


def _ratio_setter(name):
    def apply(p, v):
        return p.replace(**{name: v * p.omega_b})
    return apply


AXES: dict[str, AxisKind] = {
    "power": AxisKind("P_watts", "W", _set_power),
    "p_m": AxisKind("P_m_watts", "W", lambda p, v: p.replace(P_m=v)),
    "temperature": AxisKind("T_kelvin", "K", lambda p, v: p.replace(temperature=v)),
    "delta_a": AxisKind("delta_a_over_omega_b", "omega_b", _ratio_setter("delta_a")),
    "delta_c": AxisKind("delta_c_over_omega_b", "omega_b", _ratio_setter("delta_c")),
    "delta_m_tilde": AxisKind("delta_m_tilde_over_omega_b", "omega_b", _ratio_setter("delta_m_tilde")),
    "g_ac": AxisKind("g_ac_over_omega_b", "omega_b", _ratio_setter("g_ac")),
}

TRANSMISSION_OUTPUTS = ("T12", "T21", "Tiso_db")
ENTANGLEMENT_OUTPUTS = tuple(f"E_{p.label}" for p in STANDARD_PAIRS)
ISOLATION_OUTPUTS = tuple(f"E_{p.label}_iso_db" for p in STANDARD_PAIRS)
OUTPUTS = TRANSMISSION_OUTPUTS + ENTANGLEMENT_OUTPUTS + ISOLATION_OUTPUTS + ("stability_margin", "flags")


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.name not in AXES:
            raise ParameterError(f"unknown sweep axis {self.name!r}; choose from {', '.join(AXES)}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ParameterError(f"axis {self.name!r} has an empty grid")
        diffs = np.diff(values)
        if len(values) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ParameterError(f"axis {self.name!r} grid must be strictly monotone")
        object.__setattr__(self, "values", values)

    @property
    def column(self) -> str:
        return AXES[self.name].column

    @classmethod
    def linspace(cls, name, start, stop, points) -> "Axis":
        return cls(name, tuple(np.linspace(start, stop, int(points))))


@dataclass(frozen=True)
class SweepSpec:
    """A grid of one or two axes evaluated over a base parameter set.

    ``fixed_coupling`` (rad/s) bypasses the mean-field coupling; otherwise the
    coupling follows the drive of each direction.
    """

    base: SystemParams
    axes: tuple[Axis, ...]
    directions: tuple[Direction, ...]
    outputs: tuple[str, ...]
    name: str = "custom"
    fixed_coupling: Optional[float] = None
    meanfield_mode: Method = Method.CLOSED_FORM
    logneg_convention: Convention = Convention.NORMALIZED

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ParameterError("a sweep needs one or two axes")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise ParameterError("sweep axes must be distinct")
        if not self.outputs:
            raise ParameterError("a sweep needs at least one output")
        unknown = [o for o in self.outputs if o not in OUTPUTS]
        if unknown:
            raise ParameterError(f"unknown output(s): {', '.join(unknown)}")
        directions = tuple(dict.fromkeys(Direction(d) for d in self.directions))
        if not directions:
            raise ParameterError("a sweep needs at least one drive direction")
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "meanfield_mode", Method(self.meanfield_mode))
        object.__setattr__(self, "logneg_convention", Convention(self.logneg_convention))
        needs_both = [o for o in self.outputs if o in TRANSMISSION_OUTPUTS or o.endswith("_iso_db")]
        if needs_both and not {Direction.FORWARD, Direction.BACKWARD} <= set(directions):
            raise ParameterError(f"outputs {needs_both} need both forward and backward directions")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a.values) for a in self.axes)

    def grid(self):
        """Grid coordinates in row-major order (first axis outermost)."""
        return itertools.product(*(a.values for a in self.axes))

    def with_points(self, points: int) -> "SweepSpec":
        axes = tuple(Axis.linspace(a.name, a.values[0], a.values[-1], points) for a in self.axes)
        return _replace(self, axes=axes)


def _replace(obj, **changes):
    import dataclasses
    return dataclasses.replace(obj, **changes)


@dataclass
class DirectionRecord:
    direction: Direction
    values: dict[str, Optional[float]] = field(default_factory=dict)
    stable: Optional[bool] = None
    margin: Optional[float] = None
    flags: list[str] = field(default_factory=list)


@dataclass
class PointResult:
    coords: tuple[float, ...]
    records: dict[Direction, DirectionRecord]
    combined: dict[str, Optional[float]] = field(default_factory=dict)


@dataclass
class SweepResult:
    spec: SweepSpec
    points: list[PointResult]

    @property
    def records(self) -> list[tuple[tuple[float, ...], DirectionRecord]]:
        """One (coordinates, record) entry per grid point and direction."""
        return [(p.coords, p.records[d]) for p in self.points for d in self.spec.directions]

    def columns(self) -> list[str]:
        spec = self.spec
        cols = [a.column for a in spec.axes]
        single = len(spec.directions) == 1
        if single:
            cols.append("direction")
        for out in spec.outputs:
            if out in TRANSMISSION_OUTPUTS or out.endswith("_iso_db"):
                cols.append(out)
            elif out == "stability_margin":
                for d in spec.directions:
                    cols.extend([_suffixed("stable", d, single), _suffixed("margin", d, single)])
            else:
                cols.extend(_suffixed(out, d, single) for d in spec.directions)
        return cols

    def rows(self) -> list[dict]:
        spec = self.spec
        single = len(spec.directions) == 1
        out_rows = []
        for point in self.points:
            row = {a.column: c for a, c in zip(spec.axes, point.coords)}
            if single:
                row["direction"] = spec.directions[0].value
            for out in spec.outputs:
                if out in TRANSMISSION_OUTPUTS or out.endswith("_iso_db"):
                    row[out] = _lookup(point, out)
                    continue
                for d in spec.directions:
                    rec = point.records[d]
                    if out == "stability_margin":
                        row[_suffixed("stable", d, single)] = rec.stable
                        row[_suffixed("margin", d, single)] = rec.margin
                    elif out == "flags":
                        row[_suffixed("flags", d, single)] = ";".join(rec.flags)
                    else:
                        row[_suffixed(out, d, single)] = rec.values.get(out)
            out_rows.append(row)
        return out_rows

    def column_values(self, column: str) -> list:
        return [row[column] for row in self.rows()]


def _suffixed(name, direction, single):
    if single or not direction.suffix:
        return name
    return f"{name}_{direction.suffix}"


def _lookup(point, out):
    if out in point.combined:
        return point.combined[out]
    for rec in point.records.values():
        if out in rec.values:
            return rec.values[out]
    return None


def _wants_entanglement(spec):
    return any(o in ENTANGLEMENT_OUTPUTS or o in ISOLATION_OUTPUTS or o == "stability_margin"
               for o in spec.outputs)


def _pairs_needed(spec):
    labels = set()
    for out in spec.outputs:
        if out.startswith("E_"):
            labels.add(out[2:4])
    return [p for p in STANDARD_PAIRS if p.label in labels]


def _error_flag(exc):
    kind = type(exc).__name__.replace("Error", "").lower()
    return f"{kind}: {exc}"


def evaluate_point(spec: SweepSpec, params: SystemParams, coords: tuple[float, ...]) -> PointResult:
    records = {d: DirectionRecord(d) for d in spec.directions}
    combined: dict[str, Optional[float]] = {}
    pairs = _pairs_needed(spec)

    if any(o in TRANSMISSION_OUTPUTS for o in spec.outputs):
        try:
            tp = transmission_point(params, params.P_a, spec.meanfield_mode)
            records[Direction.FORWARD].values["T12"] = _none_if_nan(tp.t12)
            records[Direction.BACKWARD].values["T21"] = _none_if_nan(tp.t21)
            combined["Tiso_db"] = tp.t_iso_db
        except MagsimError as exc:
            for d in (Direction.FORWARD, Direction.BACKWARD):
                records[d].flags.append(_error_flag(exc))

    for direction, rec in records.items():
        state = drive = None
        try:
            drive = DriveConfig.from_params(params, direction)
            state = mean_field(params, drive, spec.meanfield_mode)
            rec.flags.extend(validate(params, state, drive).flags)
        except MagsimError as exc:
            if spec.fixed_coupling is None or _wants_entanglement(spec):
                rec.flags.append(_error_flag(exc))
        if not _wants_entanglement(spec):
            continue
        try:
            if spec.fixed_coupling is not None:
                coupling = spec.fixed_coupling
            elif state is None:
                continue
            elif spec.meanfield_mode is Method.CLOSED_FORM:
                coupling = effective_coupling(params, drive).value
            else:
                coupling = effective_coupling_from_state(params, state, direction).value
            model = drift_matrix(params, coupling)
            report = stability(model)
            rec.stable, rec.margin = report.stable, report.margin
            if not report.stable:
                rec.flags.append("unstable")
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                cov = solve_lyapunov(model, check_stability=False, report=report)
            rec.flags.extend(cov.warnings)
            for pair in pairs:
                rep = pair_entanglement(cov, pair, spec.logneg_convention, direction)
                rec.values[f"E_{pair.label}"] = rep.e_n
        except MagsimError as exc:
            rec.flags.append(_error_flag(exc))

    if Direction.FORWARD in records and Direction.BACKWARD in records:
        fwd, bwd = records[Direction.FORWARD].values, records[Direction.BACKWARD].values
        for pair in pairs:
            key = f"E_{pair.label}"
            if fwd.get(key) is not None and bwd.get(key) is not None:
                combined[f"{key}_iso_db"] = entanglement_isolation(fwd[key], bwd[key])
    return PointResult(tuple(coords), records, combined)


def _none_if_nan(x):
    return None if x is None or (isinstance(x, float) and math.isnan(x)) else x


def _point_params(spec, coords):
    params = spec.base
    for axis, value in zip(spec.axes, coords):
        params = AXES[axis.name].apply(params, value)
    return params


def _evaluate(spec, coords):
    try:
        params = _point_params(spec, coords)
    except MagsimError as exc:
        records = {d: DirectionRecord(d, flags=[_error_flag(exc)]) for d in spec.directions}
        return PointResult(tuple(coords), records)
    return evaluate_point(spec, params, coords)


def run_sweep(spec: SweepSpec, parallelism: int = 1) -> SweepResult:
    """Evaluate ``spec`` at every grid point; output order is grid order for any ``parallelism``."""
    if parallelism < 1:
        raise ParameterError("parallelism must be >= 1")
    coords = list(spec.grid())
    if parallelism == 1:
        points = [_evaluate(spec, c) for c in coords]
    else:
        chunk = max(1, len(coords) // (parallelism * 8))
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            points = list(pool.map(lambda c: _evaluate(spec, c), coords, chunksize=chunk))
    return SweepResult(spec, points)


# --- presets --------------------------------------------------------------------------

# shared operating point of the transmission and entanglement figures
BASE_CONFIG = {
    "omega_a_hz": 10e9,
    "omega_b_hz": 10e6,
    "delta_a_over_omega_b": -1.0,
    "delta_c_over_omega_b": -1.0,
    "delta_m_tilde_over_omega_b": 0.9,
    "kappa_hz": 1e6,
    "kappa_m_hz": 1e6,
    "g_cm_hz": 3.2e6,
    "g_ac_over_omega_b": 0.32,
    "g_mb_hz": 0.3,
    "kappa_b_hz": 100.0,
    "temperature_k": 0.02,
    "p_m_mw": 94.5,
}

DEFAULT_POINTS = 201
FIG3_POINTS = 101
# resolves the transmission null near 12 mW to better than 70 dB
NOTCH_RESOLVING_POINTS = 10001
FIG5_POWER_W = 0.5
# 1 mK spacing, so 20 mK and 100 mK fall on the grid
FIG5_POINTS = 301
FIG3_COUPLING_HZ = 2.5e6

PRESET_DESCRIPTIONS = {
    "fig2a": "transmission T12, T21 vs probe power, g_ac = omega_b (impedance matched)",
    "fig2b": "transmission T12, T21 vs probe power, g_ac = 0.32 omega_b",
    "fig2c": "transmission isolation vs probe power, g_ac = omega_b",
    "fig2d": "transmission isolation vs probe power, g_ac = 0.32 omega_b",
    "fig3": "pair entanglement vs cavity detunings at fixed G_mb",
    "fig4": "magnon-phonon and cavity-phonon entanglement vs probe power, both directions",
    "fig5": "magnon-phonon and cavity-phonon entanglement vs temperature, both directions",
}


_UNIT_SUFFIXES = ("_over_omega_b", "_hz", "_mw", "_w", "_mk", "_k")


def _key_stem(key: str) -> str:
    for suffix in _UNIT_SUFFIXES:
        if key.endswith(suffix):
            return key[: -len(suffix)]
    return key


def preset_params(name: str, overrides: Optional[dict] = None) -> SystemParams:
    config = dict(BASE_CONFIG)
    if name in ("fig2a", "fig2c"):
        config["g_ac_over_omega_b"] = 1.0
    elif name == "fig3":
        config["p_m_mw"] = 1.85
    elif name == "fig5":
        config["power_w"] = FIG5_POWER_W
    if overrides:
        overrides = dict(overrides)
        if overrides.pop("angular", False):
            # the preset defaults are ordinary frequencies, so bring angular overrides to Hz
            overrides = {k: v / TWO_PI if k.endswith("_hz") else v for k, v in overrides.items()}
        # an override replaces the default however either one is spelled
        given = {_key_stem(k) for k in overrides}
        config = {k: v for k, v in config.items() if _key_stem(k) not in given}
        config.update(overrides)
    return build_params(config)


def preset(
    name: str,
    *,
    points: Optional[int] = None,
    overrides: Optional[dict] = None,
    gmb_2pi_interpretation: str = "caption",
    meanfield_mode=Method.CLOSED_FORM,
    logneg_convention=Convention.NORMALIZED,
) -> SweepSpec:
    """Sweep specification for a named figure.

    ``gmb_2pi_interpretation`` only affects ``fig3``: ``"caption"`` reads its
    fixed coupling as G_mb / 2 pi = 2.5 MHz, ``"text"`` as G_mb = 2.5e6 rad/s.
    """
    if name not in PRESET_DESCRIPTIONS:
        raise ParameterError(f"unknown preset {name!r}; choose from {', '.join(PRESET_DESCRIPTIONS)}")
    base = preset_params(name, overrides)
    both = (Direction.FORWARD, Direction.BACKWARD)
    common = dict(name=name, meanfield_mode=meanfield_mode, logneg_convention=logneg_convention)

    if name.startswith("fig2"):
        n = points or (DEFAULT_POINTS if name in ("fig2a", "fig2c") else NOTCH_RESOLVING_POINTS)
        return SweepSpec(base, (Axis.linspace("power", 0.0, 0.2, n),), both, TRANSMISSION_OUTPUTS, **common)
    if name == "fig3":
        if gmb_2pi_interpretation == "caption":
            coupling = TWO_PI * FIG3_COUPLING_HZ
        elif gmb_2pi_interpretation == "text":
            coupling = FIG3_COUPLING_HZ
        else:
            raise ParameterError("gmb_2pi_interpretation must be 'caption' or 'text'")
        n = points or FIG3_POINTS
        axes = (Axis.linspace("delta_a", -2.0, 2.0, n), Axis.linspace("delta_c", -2.0, 2.0, n))
        outputs = ENTANGLEMENT_OUTPUTS + ("stability_margin", "flags")
        return SweepSpec(base, axes, (Direction.MAGNON_ONLY,), outputs, fixed_coupling=coupling, **common)
    n = points or DEFAULT_POINTS
    if name == "fig4":
        outputs = ("E_mb", "E_ab", "E_mb_iso_db", "E_ab_iso_db", "stability_margin", "flags")
        return SweepSpec(base, (Axis.linspace("power", 0.0, 2.0, n),), both, outputs, **common)
    outputs = ("E_mb", "E_ab", "stability_margin", "flags")
    n = points or FIG5_POINTS
    return SweepSpec(base, (Axis.linspace("temperature", 0.0, 0.3, n),), both, outputs, **common)


def preset_names() -> Sequence[str]:
    return tuple(PRESET_DESCRIPTIONS)
