"""Directional transmission coefficients and the isolation ratio."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from magsim.constants import HBAR
from magsim.errors import ParameterError, UndefinedQuantityError
from magsim.mean_field import (
    Method,
    _linear_system,
    steady_state_closed_form,
    steady_state_self_consistent,
)
from magsim.params import Direction, DriveConfig, SystemParams, _require_omega_d


@dataclass(frozen=True)
class TransmissionPoint:
    power: float
    t12: float
    t21: float
    t_iso_db: float


def mean_field(params: SystemParams, drive: DriveConfig, mode=Method.CLOSED_FORM):
    if Method(mode) is Method.CLOSED_FORM:
        return steady_state_closed_form(params, drive)
    return steady_state_self_consistent(params, drive)


def transmission(params: SystemParams, direction, power: float, mode=Method.CLOSED_FORM) -> float:
    """|sqrt(kappa_out) <out> / epsilon_in| for a probe of ``power`` watts.

    Forward probes cavity a and reads cavity c; backward is the reverse.  The
    magnon drive ``params.P_m`` stays on in both cases.
    """
    direction = Direction(direction)
    if direction is Direction.MAGNON_ONLY:
        raise ParameterError("transmission needs a forward or backward probe")
    if power < 0:
        raise ParameterError("power must be non-negative")
    if power == 0:
        raise UndefinedQuantityError("transmission coefficient is undefined at zero probe power")
    omega_d = _require_omega_d(params)
    eps = math.sqrt(power / (HBAR * omega_d))
    drive = DriveConfig.from_params(params, direction, power)
    state = mean_field(params, drive, mode)
    if direction is Direction.FORWARD:
        return math.sqrt(params.kappa_c) * abs(state.amp_c) / eps
    return math.sqrt(params.kappa_a) * abs(state.amp_a) / eps


def ratio_db(forward: float, backward: float) -> float:
    """20 log10(forward / backward) with signed infinities when one side vanishes."""
    if forward == backward:
        return 0.0
    if backward == 0.0:
        return math.inf
    if forward == 0.0:
        return -math.inf
    return 20.0 * math.log10(forward / backward)


def isolation_db(params: SystemParams, power: float, mode=Method.CLOSED_FORM) -> float:
    """Transmission isolation 20 log10(T12 / T21) in dB.

    At zero probe power both coefficients diverge (magnon drive on) or are
    0/0 (magnon drive off); the returned value is their ratio in the limit of
    vanishing, equal probe powers.
    """
    if power < 0:
        raise ParameterError("power must be non-negative")
    if power > 0:
        return ratio_db(
            transmission(params, Direction.FORWARD, power, mode),
            transmission(params, Direction.BACKWARD, power, mode),
        )
    # the drive offset sets the leading order; fall back to the linear probe response without it
    state = mean_field(params, DriveConfig.from_params(params, Direction.MAGNON_ONLY), mode)
    out_fwd = math.sqrt(params.kappa_c) * abs(state.amp_c)
    out_bwd = math.sqrt(params.kappa_a) * abs(state.amp_a)
    if out_fwd > 0 or out_bwd > 0:
        return ratio_db(out_fwd, out_bwd)
    lossless = Method(mode) is Method.CLOSED_FORM
    dc_dea, da_dec = _probe_response_coefficients(params, state.delta_m_tilde_used, lossless)
    resp_fwd = math.sqrt(params.kappa_c) * math.sqrt(params.kappa_a) * abs(dc_dea)
    resp_bwd = math.sqrt(params.kappa_a) * math.sqrt(params.kappa_c) * abs(da_dec)
    return ratio_db(resp_fwd, resp_bwd)


def _probe_response_coefficients(params, delta_m_tilde, lossless):
    if lossless:
        params = params.replace(kappa_a=0.0, kappa_c=0.0, kappa_m=0.0)
    inv = np.linalg.inv(_linear_system(params, delta_m_tilde))
    return inv[1, 0], inv[0, 1]


def transmission_point(params: SystemParams, power: float, mode=Method.CLOSED_FORM) -> TransmissionPoint:
    if power > 0:
        t12 = transmission(params, Direction.FORWARD, power, mode)
        t21 = transmission(params, Direction.BACKWARD, power, mode)
        return TransmissionPoint(power, t12, t21, ratio_db(t12, t21))
    return TransmissionPoint(power, math.nan, math.nan, isolation_db(params, 0.0, mode))
