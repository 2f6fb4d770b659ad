"""Parameter container, unit handling and derived drive/thermal quantities.

All rates and frequencies are stored as angular frequencies (rad/s).  Raw
configuration records give ordinary frequencies in Hz (``*_hz`` keys), which
are multiplied by 2 pi on ingest, unless the record sets ``angular = true``.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any, Optional

from magsim.constants import (
    BOLTZMANN,
    DEFAULT_KERR,
    DEFAULT_N_SPINS,
    GYROMAGNETIC_HZ_PER_OE,
    HBAR,
    TWO_PI,
)
from magsim.errors import ParameterError

CONSISTENCY_RTOL = 1e-9


class Direction(str, enum.Enum):
    """Which port carries the probe drive."""

    FORWARD = "forward"  # cavity a driven, output read from cavity c
    BACKWARD = "backward"  # cavity c driven, output read from cavity a
    MAGNON_ONLY = "magnon_only"

    @property
    def suffix(self) -> str:
        return {"forward": "12", "backward": "21", "magnon_only": ""}[self.value]


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the two-cavity magnomechanical system.

    Frequencies and rates in rad/s, powers in W, temperature in K.  Mode and
    drive frequencies are optional; only detunings enter the dynamics.
    """

    omega_b: float
    delta_a: float
    delta_c: float
    delta_m_tilde: float
    g_ac: float
    g_cm: float
    kappa_a: float
    kappa_c: float
    kappa_m: float
    kappa_b: float
    g_mb: float = 0.0
    omega_a: Optional[float] = None
    omega_c: Optional[float] = None
    omega_m: Optional[float] = None
    omega_d: Optional[float] = None
    delta_m: Optional[float] = None
    P_a: float = 0.0
    P_c: float = 0.0
    P_m: float = 0.0
    temperature: float = 0.0
    n_spins: float = DEFAULT_N_SPINS
    kerr_K: float = DEFAULT_KERR

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if value is None:
                continue
            if not math.isfinite(value):
                raise ParameterError(f"{field.name} must be finite, got {value!r}")
        for name in ("omega_b", "g_ac", "g_cm", "g_mb", "kappa_a", "kappa_c", "kappa_m",
                     "kappa_b", "P_a", "P_c", "P_m", "kerr_K"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative, got {getattr(self, name)!r}")
        for name in ("omega_a", "omega_c", "omega_m", "omega_d"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ParameterError(f"{name} must be non-negative, got {value!r}")
        if self.temperature < 0:
            raise ParameterError("temperature must be >= 0")
        if self.n_spins <= 0:
            raise ParameterError("n_spins must be > 0")
        if self.omega_d is not None:
            for mode, delta in (("a", self.delta_a), ("c", self.delta_c), ("m", self.delta_m)):
                omega = getattr(self, f"omega_{mode}")
                if omega is None or delta is None:
                    continue
                _check_triple(mode, omega, self.omega_d, delta)

    def replace(self, **changes) -> "SystemParams":
        """Return a copy with ``changes`` applied, keeping mode frequencies consistent.

        Changing a detuning while the drive frequency is known moves the
        matching mode frequency along with it.
        """
        if self.omega_d is not None:
            for mode in ("a", "c", "m"):
                key = f"delta_{mode}"
                if key in changes and f"omega_{mode}" not in changes:
                    if getattr(self, f"omega_{mode}") is not None and changes[key] is not None:
                        changes[f"omega_{mode}"] = self.omega_d + changes[key]
        return dataclasses.replace(self, **changes)

    @property
    def n_b(self) -> float:
        return thermal_occupancy(self.omega_b, self.temperature)

    def to_hz(self) -> dict[str, float]:
        """Frequencies and rates as ordinary frequencies (Hz); other fields unchanged."""
        out = {}
        for name in _FREQUENCY_FIELDS:
            value = getattr(self, name)
            if value is not None:
                out[name] = value / TWO_PI
        for name in ("P_a", "P_c", "P_m", "temperature", "n_spins"):
            out[name] = getattr(self, name)
        return out


def _check_triple(mode, omega, omega_d, delta):
    expected = omega - omega_d
    scale = max(abs(omega), abs(omega_d), abs(delta), 1.0)
    if abs(expected - delta) > CONSISTENCY_RTOL * scale:
        raise ParameterError(
            f"inconsistent detuning for mode {mode}: omega_{mode} - omega_d = {expected!r} "
            f"but delta_{mode} = {delta!r}"
        )


@dataclass(frozen=True)
class DriveConfig:
    direction: Direction
    E_a: float = 0.0
    E_c: float = 0.0
    E_m: float = 0.0

    def __post_init__(self):
        for name in ("E_a", "E_c", "E_m"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ParameterError(f"{name} must be a finite non-negative amplitude, got {value!r}")
        d = Direction(self.direction)
        object.__setattr__(self, "direction", d)
        if d is Direction.FORWARD and self.E_c != 0:
            raise ParameterError("forward drive requires E_c = 0")
        if d is Direction.BACKWARD and self.E_a != 0:
            raise ParameterError("backward drive requires E_a = 0")
        if d is Direction.MAGNON_ONLY and (self.E_a != 0 or self.E_c != 0):
            raise ParameterError("magnon-only drive requires E_a = E_c = 0")

    @classmethod
    def from_params(cls, params: SystemParams, direction, power: Optional[float] = None) -> "DriveConfig":
        """Drive amplitudes from the configured powers.

        ``power`` overrides the probe power on the driven cavity (P_a = P_c = P).
        """
        direction = Direction(direction)
        omega_d = _require_omega_d(params)
        e_m = drive_amplitude(params.P_m, params.kappa_m, omega_d)
        if direction is Direction.FORWARD:
            p = params.P_a if power is None else power
            return cls(direction, E_a=drive_amplitude(p, params.kappa_a, omega_d), E_m=e_m)
        if direction is Direction.BACKWARD:
            p = params.P_c if power is None else power
            return cls(direction, E_c=drive_amplitude(p, params.kappa_c, omega_d), E_m=e_m)
        return cls(direction, E_m=e_m)


def _require_omega_d(params):
    if params.omega_d is None:
        raise ParameterError("omega_d is required to convert drive powers to amplitudes")
    return params.omega_d


def drive_amplitude(power: float, kappa: float, omega_d: float) -> float:
    """Drive amplitude E = sqrt(kappa) * sqrt(P / (hbar * omega_d)) in rad/s."""
    if omega_d <= 0:
        raise ParameterError(f"omega_d must be positive, got {omega_d!r}")
    if power < 0:
        raise ParameterError(f"power must be non-negative, got {power!r}")
    if kappa < 0:
        raise ParameterError(f"kappa must be non-negative, got {kappa!r}")
    return math.sqrt(kappa) * math.sqrt(power / (HBAR * omega_d))


def thermal_occupancy(omega_b: float, temperature: float) -> float:
    """Bose-Einstein occupancy of a mode at ``omega_b`` (rad/s) and ``temperature`` (K)."""
    if omega_b <= 0:
        raise ParameterError(f"omega_b must be positive, got {omega_b!r}")
    if temperature < 0:
        raise ParameterError(f"temperature must be >= 0, got {temperature!r}")
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(HBAR * omega_b / (BOLTZMANN * temperature))


_FREQUENCY_FIELDS = (
    "omega_a", "omega_c", "omega_m", "omega_b", "omega_d",
    "delta_a", "delta_c", "delta_m", "delta_m_tilde",
    "g_ac", "g_cm", "g_mb",
    "kappa_a", "kappa_c", "kappa_m", "kappa_b",
    "kerr_K",
)

# config key stem -> SystemParams field(s)
_FREQUENCY_KEYS = {
    "omega_a": ("omega_a",),
    "omega_c": ("omega_c",),
    "omega_m": ("omega_m",),
    "omega_b": ("omega_b",),
    "omega_d": ("omega_d",),
    "delta_a": ("delta_a",),
    "delta_c": ("delta_c",),
    "delta_m": ("delta_m",),
    "delta_m_tilde": ("delta_m_tilde",),
    "g_ac": ("g_ac",),
    "g_cm": ("g_cm",),
    "g_mb": ("g_mb",),
    "kappa": ("kappa_a", "kappa_c"),
    "kappa_a": ("kappa_a",),
    "kappa_c": ("kappa_c",),
    "kappa_m": ("kappa_m",),
    "kappa_b": ("kappa_b",),
    "kerr": ("kerr_K",),
}

# may be given relative to omega_b
_RATIO_STEMS = ("delta_a", "delta_c", "delta_m", "delta_m_tilde", "g_ac", "g_cm")

_POWER_KEYS = {
    "p_a": ("P_a",),
    "p_c": ("P_c",),
    "p_m": ("P_m",),
    "power": ("P_a", "P_c"),
}


def param_keys() -> frozenset[str]:
    """All keys accepted by :func:`build_params`."""
    keys = {"angular", "b0_oe", "temperature_k", "temperature_mk", "n_spins"}
    for stem in _FREQUENCY_KEYS:
        keys.add(f"{stem}_hz")
    for stem in _RATIO_STEMS:
        keys.add(f"{stem}_over_omega_b")
    for stem in _POWER_KEYS:
        keys.update({f"{stem}_w", f"{stem}_mw"})
    return frozenset(keys)


def build_params(config: Mapping[str, Any]) -> SystemParams:
    """Build :class:`SystemParams` from a flat, unit-suffixed configuration record.

    Parameters
    ----------
    config : mapping
        Keys such as ``omega_b_hz``, ``kappa_hz``, ``g_ac_over_omega_b``,
        ``p_m_mw``, ``temperature_k`` or ``b0_oe``.  ``*_hz`` values are
        ordinary frequencies unless ``angular`` is true.

    Raises
    ------
    ParameterError
        On unknown or missing keys, negative rates, or a detuning that does
        not match ``omega_j - omega_d``.
    """
    unknown = set(config) - param_keys()
    if unknown:
        raise ParameterError(f"unknown parameter key(s): {', '.join(sorted(unknown))}")
    scale = 1.0 if config.get("angular", False) else TWO_PI
    fields: dict[str, float] = {}

    for stem, targets in _FREQUENCY_KEYS.items():
        key = f"{stem}_hz"
        if key in config:
            for target in targets:
                fields[target] = float(config[key]) * scale

    if "b0_oe" in config:
        omega_m = TWO_PI * GYROMAGNETIC_HZ_PER_OE * float(config["b0_oe"])
        if "omega_m" in fields and not math.isclose(fields["omega_m"], omega_m, rel_tol=CONSISTENCY_RTOL):
            raise ParameterError("both b0_oe and omega_m_hz given and they disagree")
        fields["omega_m"] = omega_m

    for stem in _RATIO_STEMS:
        key = f"{stem}_over_omega_b"
        if key in config:
            if "omega_b" not in fields:
                raise ParameterError(f"{key} requires omega_b_hz")
            if f"{stem}_hz" in config:
                raise ParameterError(f"give only one of {stem}_hz and {key}")
            fields[stem] = float(config[key]) * fields["omega_b"]

    for stem, targets in _POWER_KEYS.items():
        for suffix, factor in (("w", 1.0), ("mw", 1e-3)):
            key = f"{stem}_{suffix}"
            if key in config:
                for target in targets:
                    fields[target] = float(config[key]) * factor

    if "temperature_k" in config:
        fields["temperature"] = float(config["temperature_k"])
    if "temperature_mk" in config:
        fields["temperature"] = float(config["temperature_mk"]) * 1e-3
    if "n_spins" in config:
        fields["n_spins"] = float(config["n_spins"])

    # detunings from frequencies, or the drive frequency from a (mode, detuning) pair
    if "omega_d" not in fields:
        for mode in ("a", "c", "m"):
            if f"omega_{mode}" in fields and f"delta_{mode}" in fields:
                fields["omega_d"] = fields[f"omega_{mode}"] - fields[f"delta_{mode}"]
                break
    if "omega_d" in fields:
        for mode in ("a", "c", "m"):
            if f"omega_{mode}" in fields and f"delta_{mode}" not in fields:
                fields[f"delta_{mode}"] = fields[f"omega_{mode}"] - fields["omega_d"]
            elif f"delta_{mode}" in fields and f"omega_{mode}" not in fields and mode != "m":
                fields[f"omega_{mode}"] = fields["omega_d"] + fields[f"delta_{mode}"]
    if "delta_m_tilde" not in fields and "delta_m" in fields:
        fields["delta_m_tilde"] = fields["delta_m"]

    required = ("omega_b", "delta_a", "delta_c", "delta_m_tilde", "g_ac", "g_cm",
                "kappa_a", "kappa_c", "kappa_m", "kappa_b")
    missing = [name for name in required if name not in fields]
    if missing:
        raise ParameterError(f"missing parameter(s): {', '.join(missing)}")
    return SystemParams(**fields)
