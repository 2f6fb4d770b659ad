"""Sanity checks on the linearization: magnon number vs spin number, Kerr smallness."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from magsim.constants import TWO_PI
from magsim.mean_field import SteadyState
from magsim.params import Direction, DriveConfig, SystemParams, drive_amplitude

# "much less than" thresholds on the ratio checked / bound
PASS_RATIO = 0.1
WARN_RATIO = 1.0

# occupancy must stay far below the number of spins; the bound used is 5 N
OCCUPANCY_SPIN_FACTOR = 5.0


class Status(str, enum.Enum):
    PASS = "pass"
    WARN = "warn"
    FAIL = "fail"


def classify(ratio: float) -> Status:
    if ratio < PASS_RATIO:
        return Status.PASS
    if ratio < WARN_RATIO:
        return Status.WARN
    return Status.FAIL


@dataclass(frozen=True)
class ValidationReport:
    direction: Direction
    m_occupancy: float
    simplified_occupancy: float
    occupancy_bound: float
    occupancy_ok: bool
    occupancy_status: Status
    kerr_term: float
    drive_sum: float
    kerr_ok: bool
    kerr_status: Status

    @property
    def flags(self) -> list[str]:
        out = []
        if self.occupancy_status is not Status.PASS:
            out.append(f"occupancy_{self.occupancy_status.value}")
        if self.kerr_status is not Status.PASS:
            out.append(f"kerr_{self.kerr_status.value}")
        return out


def simplified_occupancy(params: SystemParams, drive: DriveConfig, cycle_units: bool = False) -> float:
    """Approximate <m^dag m> for cavities on the red sideband (Delta_a = Delta_c = -omega_b).

    [E_m (w_b^2 - g_ac^2) + E_a g_ac g_cm]^2 / w_b^6 when cavity a is driven,
    with E_c w_b g_cm in place of the probe term when cavity c is driven.
    With ``cycle_units`` the frequencies w_b, g_ac, g_cm enter in Hz while
    the drive amplitudes stay in rad/s.
    """
    scale = 1.0 / TWO_PI if cycle_units else 1.0
    w_b, g_ac, g_cm = params.omega_b * scale, params.g_ac * scale, params.g_cm * scale
    amp = drive.E_m * (w_b**2 - g_ac**2)
    if drive.direction is Direction.FORWARD:
        amp += drive.E_a * g_ac * g_cm
    elif drive.direction is Direction.BACKWARD:
        amp += drive.E_c * w_b * g_cm
    return amp**2 / w_b**6


def magnon_occupancy_check(params: SystemParams, ss: SteadyState, drive: DriveConfig) -> dict:
    occupancy = abs(ss.amp_m) ** 2
    bound = OCCUPANCY_SPIN_FACTOR * params.n_spins
    status = classify(occupancy / bound)
    return {
        "m_occupancy": occupancy,
        "simplified_occupancy": simplified_occupancy(params, drive),
        "occupancy_bound": bound,
        "occupancy_ok": occupancy < bound,
        "occupancy_status": status,
    }


def kerr_check(params: SystemParams, ss: SteadyState, drive: DriveConfig) -> dict:
    kerr_term = params.kerr_K * abs(ss.amp_m) ** 3
    drive_sum = drive.E_a + drive.E_c + drive.E_m
    if drive_sum > 0:
        status = classify(kerr_term / drive_sum)
    else:
        status = Status.PASS if kerr_term == 0 else Status.FAIL
    return {
        "kerr_term": kerr_term,
        "drive_sum": drive_sum,
        "kerr_ok": status is Status.PASS,
        "kerr_status": status,
    }


def validate(params: SystemParams, ss: SteadyState, drive: DriveConfig) -> ValidationReport:
    return ValidationReport(
        direction=drive.direction,
        **magnon_occupancy_check(params, ss, drive),
        **kerr_check(params, ss, drive),
    )


def cycle_unit_estimates(params: SystemParams, power: float) -> dict[str, float]:
    """Occupancy and Kerr estimates with Hz couplings and rad/s drive amplitudes.

    Mirrors the mixed-unit arithmetic behind commonly quoted figures for this
    set-up: the simplified occupancy formula with omega_b, g_ac, g_cm in Hz,
    and the Kerr term K|<m>|^3 with K taken as K/2pi in Hz.
    """
    out = {}
    k_hz = params.kerr_K / TWO_PI
    for direction in (Direction.FORWARD, Direction.BACKWARD):
        drive = DriveConfig.from_params(params, direction, power)
        occ = simplified_occupancy(params, drive, cycle_units=True)
        out[f"occupancy_{direction.suffix}"] = occ
        out[f"kerr_{direction.suffix}"] = k_hz * occ**1.5
        out[f"drive_sum_{direction.suffix}"] = drive.E_a + drive.E_c + drive.E_m
    return out


# (magnon drive power in W, quoted amplitude in rad/s) pairs commonly cited for this set-up
REFERENCE_DRIVES = ((1.85e-3, 4.2e13), (0.189, 3e14))


def reference_drive_table(params: SystemParams) -> list[dict[str, float]]:
    """Compare quoted (power, amplitude) pairs against E = sqrt(kappa_m) sqrt(P / hbar omega_d)."""
    rows = []
    for power, quoted in REFERENCE_DRIVES:
        computed = drive_amplitude(power, params.kappa_m, params.omega_d)
        ratio = computed / quoted
        rows.append({
            "power_w": power,
            "quoted": quoted,
            "computed": computed,
            "ratio": ratio,
            "consistent": abs(ratio - 1.0) < 0.05,
        })
    return rows
