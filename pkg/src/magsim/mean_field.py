"""Stationary mean-field amplitudes and the directional magnomechanical coupling."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from magsim.errors import ConvergenceError, ParameterError, SingularityError
from magsim.params import Direction, DriveConfig, SystemParams

_SINGULAR_RTOL = 1e-12


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    SELF_CONSISTENT = "self_consistent"


@dataclass(frozen=True)
class SteadyState:
    """Mean amplitudes <a>, <c>, <m>, <b> and the magnon detuning they were evaluated at."""

    amp_a: complex
    amp_c: complex
    amp_m: complex
    amp_b: complex
    delta_m_tilde_used: float
    method: Method
    iterations: int = 0
    history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def magnon_number(self) -> float:
        return abs(self.amp_m) ** 2


@dataclass(frozen=True)
class EffectiveCoupling:
    value: float  # rad/s
    direction: Direction

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ParameterError(f"effective coupling must be finite, got {self.value!r}")
        object.__setattr__(self, "direction", Direction(self.direction))


def _denominator(params: SystemParams, delta_m_tilde: float) -> float:
    d_a, d_c = params.delta_a, params.delta_c
    t1 = params.g_cm**2 * d_a
    t2 = params.g_ac**2 * delta_m_tilde
    t3 = d_a * d_c * delta_m_tilde
    den = t1 + t2 - t3
    scale = abs(t1) + abs(t2) + abs(t3)
    if scale == 0.0 or abs(den) <= _SINGULAR_RTOL * scale:
        raise SingularityError(
            "vanishing denominator g_cm^2*Delta_a + g_ac^2*Delta_m~ - Delta_a*Delta_c*Delta_m~ "
            f"(value {den!r}); the lossless response is resonant here"
        )
    return den


def phonon_amplitude(params: SystemParams, amp_m: complex) -> complex:
    """<b> = -i g_mb |<m>|^2 / (i omega_b + kappa_b)."""
    return -1j * params.g_mb * abs(amp_m) ** 2 / (1j * params.omega_b + params.kappa_b)


def steady_state_closed_form(params: SystemParams, drive: DriveConfig) -> SteadyState:
    """Lossless long-time amplitudes at the supplied effective magnon detuning.

    Valid when all detunings are large compared with the cavity and magnon
    linewidths, which are dropped from the stationary equations.
    """
    g_ac, g_cm = params.g_ac, params.g_cm
    d_a, d_c, d_m = params.delta_a, params.delta_c, params.delta_m_tilde
    e_a, e_c, e_m = drive.E_a, drive.E_c, drive.E_m
    den = _denominator(params, d_m)

    amp_a = 1j * (e_m * g_ac * g_cm - e_a * g_cm**2 - e_c * g_ac * d_m + e_a * d_c * d_m) / den
    amp_c = -1j * (e_m * g_cm * d_a + e_a * g_ac * d_m - e_c * d_a * d_m) / den
    amp_m = -1j * (e_m * g_ac**2 - e_a * g_ac * g_cm + e_c * g_cm * d_a - e_m * d_a * d_c) / den
    amp_b = phonon_amplitude(params, amp_m)
    return SteadyState(amp_a, amp_c, amp_m, amp_b, d_m, Method.CLOSED_FORM)


def _linear_system(params: SystemParams, delta_m_tilde: float) -> np.ndarray:
    # rows: stationary equations for <a>, <c>, <m> written as M x = E
    return np.array(
        [
            [1j * params.delta_a + params.kappa_a, 1j * params.g_ac, 0.0],
            [1j * params.g_ac, 1j * params.delta_c + params.kappa_c, 1j * params.g_cm],
            [0.0, 1j * params.g_cm, 1j * delta_m_tilde + params.kappa_m],
        ],
        dtype=complex,
    )


def _solve_cavity_magnon(params, drive, delta_m_tilde):
    matrix = _linear_system(params, delta_m_tilde)
    rhs = np.array([drive.E_a, drive.E_c, drive.E_m], dtype=complex)
    cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularityError(f"stationary 3x3 system is singular (condition number {cond:.3g})")
    return np.linalg.solve(matrix, rhs)


def stationary_residual(params: SystemParams, drive: DriveConfig, state: SteadyState) -> float:
    """Largest relative residual of the four stationary mean-value equations.

    For self-consistent states the magnon equation uses the detuning implied
    by ``state.amp_b``, so an inconsistent detuning shows up here too.
    """
    a, c, m, b = state.amp_a, state.amp_c, state.amp_m, state.amp_b
    if state.method is Method.SELF_CONSISTENT:
        bare = params.delta_m if params.delta_m is not None else params.delta_m_tilde
        d_m_tilde = bare + params.g_mb * 2.0 * b.real
    else:
        d_m_tilde = state.delta_m_tilde_used
    terms = [
        ((1j * params.delta_a + params.kappa_a) * a, 1j * params.g_ac * c, -drive.E_a),
        ((1j * params.delta_c + params.kappa_c) * c, 1j * params.g_ac * a, 1j * params.g_cm * m, -drive.E_c),
        ((1j * d_m_tilde + params.kappa_m) * m, 1j * params.g_cm * c, -drive.E_m),
        ((1j * params.omega_b + params.kappa_b) * b, 1j * params.g_mb * abs(m) ** 2),
    ]
    worst = 0.0
    for row in terms:
        scale = max(abs(t) for t in row)
        if scale == 0.0:
            continue
        worst = max(worst, abs(sum(row)) / scale)
    return worst


def _shifted_detuning(params, amp_b):
    return params.delta_m + params.g_mb * 2.0 * amp_b.real


def steady_state_self_consistent(
    params: SystemParams,
    drive: DriveConfig,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> SteadyState:
    """Solve the full stationary mean-value equations, damping terms included.

    The effective magnon detuning is found by fixed-point iteration starting
    from the bare detuning ``params.delta_m`` (``delta_m_tilde`` stands in
    when no bare value is configured).  Once successive updates alternate in
    sign, each step is under-relaxed by one half.

    Raises
    ------
    ConvergenceError
        If the detuning has not settled to ``tol`` (relative) after ``max_iter``
        updates.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    if max_iter < 1:
        raise ParameterError("max_iter must be >= 1")
    if params.delta_m is None:
        params = params.replace(delta_m=params.delta_m_tilde)

    scale = max(abs(params.delta_m), params.omega_b, params.kappa_m)
    x = params.delta_m
    relax = 1.0
    prev_step = 0.0
    history = []
    for iteration in range(1, max_iter + 1):
        a, c, m = _solve_cavity_magnon(params, drive, x)
        b = phonon_amplitude(params, m)
        target = _shifted_detuning(params, b)
        step = target - x
        residual = abs(step) / max(abs(target), scale)
        history.append(residual)
        if residual < tol:
            # re-solve at the converged detuning so amplitudes and detuning agree exactly
            a, c, m = _solve_cavity_magnon(params, drive, target)
            b = phonon_amplitude(params, m)
            return SteadyState(complex(a), complex(c), complex(m), complex(b), target,
                               Method.SELF_CONSISTENT, iteration, tuple(history))
        if prev_step * step < 0:
            relax = 0.5
        prev_step = step
        x = x + relax * step
    raise ConvergenceError(
        f"magnon detuning did not converge in {max_iter} iterations (last residual {history[-1]:.3e})",
        last_residual=history[-1],
    )


def effective_coupling(params: SystemParams, drive: DriveConfig) -> EffectiveCoupling:
    """Real directional coupling G_mb = 2 g_mb <m> (phase removed) from the lossless solution.

    Forward driving (cavity a) and backward driving (cavity c) enter the
    numerator with different weights, which is the source of the
    nonreciprocity.
    """
    g_ac, g_cm, g_mb = params.g_ac, params.g_cm, params.g_mb
    d_a, d_c = params.delta_a, params.delta_c
    den = _denominator(params, params.delta_m_tilde)
    e_m = drive.E_m
    base = e_m * g_ac**2 - e_m * d_a * d_c
    if drive.direction is Direction.FORWARD:
        num = base - drive.E_a * g_ac * g_cm
    elif drive.direction is Direction.BACKWARD:
        num = base + drive.E_c * g_cm * d_a
    else:
        num = base
    return EffectiveCoupling(2.0 * g_mb * num / den, drive.direction)


def effective_coupling_from_state(params: SystemParams, state: SteadyState, direction) -> EffectiveCoupling:
    """Coupling magnitude 2 g_mb |<m>| from any steady state, signed like Re(2i g_mb <m>)."""
    g = 2j * params.g_mb * state.amp_m
    sign = -1.0 if g.real < 0 else 1.0
    return EffectiveCoupling(sign * abs(g), direction)
