import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magsim.constants import TWO_PI
from magsim.errors import ConvergenceError, SingularityError
from magsim.mean_field import (
    Method,
    effective_coupling,
    effective_coupling_from_state,
    phonon_amplitude,
    stationary_residual,
    steady_state_closed_form,
    steady_state_self_consistent,
)
from magsim.params import Direction, DriveConfig


def lossless_oracle(p, e_a, e_c, e_m):
    """Stationary mean-value equations with all linewidths dropped, solved densely."""
    m = np.array([
        [1j * p.delta_a, 1j * p.g_ac, 0],
        [1j * p.g_ac, 1j * p.delta_c, 1j * p.g_cm],
        [0, 1j * p.g_cm, 1j * p.delta_m_tilde],
    ])
    return np.linalg.solve(m, np.array([e_a, e_c, e_m], dtype=complex))


def test_zero_drive_gives_zero_amplitudes(fig2_params):
    ss = steady_state_closed_form(fig2_params, DriveConfig(Direction.MAGNON_ONLY))
    assert (ss.amp_a, ss.amp_c, ss.amp_m, ss.amp_b) == (0, 0, 0, 0)


def test_closed_form_matches_dense_lossless_solve(fig3_params):
    drive = DriveConfig(Direction.MAGNON_ONLY, E_m=4.2e13)
    ss = steady_state_closed_form(fig3_params, drive)
    oracle = lossless_oracle(fig3_params, 0.0, 0.0, 4.2e13)
    np.testing.assert_allclose([ss.amp_a, ss.amp_c, ss.amp_m], oracle, rtol=1e-12)
    assert abs(ss.amp_m) == pytest.approx(abs(oracle[2]), rel=1e-12)


@pytest.mark.parametrize("direction", [Direction.FORWARD, Direction.BACKWARD])
def test_closed_form_matches_oracle_with_probe(fig2_params, direction):
    drive = DriveConfig.from_params(fig2_params, direction, power=0.03)
    ss = steady_state_closed_form(fig2_params, drive)
    oracle = lossless_oracle(fig2_params, drive.E_a, drive.E_c, drive.E_m)
    np.testing.assert_allclose([ss.amp_a, ss.amp_c, ss.amp_m], oracle, rtol=1e-11)


def test_impedance_matched_magnon_amplitude_is_reciprocal(fig2_matched):
    e = 3.7e14
    fwd = steady_state_closed_form(fig2_matched, DriveConfig(Direction.FORWARD, E_a=e, E_m=2e14))
    bwd = steady_state_closed_form(fig2_matched, DriveConfig(Direction.BACKWARD, E_c=e, E_m=2e14))
    assert abs(fwd.amp_m) == pytest.approx(abs(bwd.amp_m), rel=1e-14)


def test_phonon_amplitude_formula(fig2_params):
    ss = steady_state_closed_form(fig2_params, DriveConfig.from_params(fig2_params, "forward", 0.05))
    p = fig2_params
    assert abs(ss.amp_b) == pytest.approx(p.g_mb * abs(ss.amp_m) ** 2 / np.hypot(p.omega_b, p.kappa_b), rel=1e-14)
    assert ss.amp_b == phonon_amplitude(p, ss.amp_m)


def test_singular_denominator_raises(fig2_params):
    p = fig2_params
    # choose the magnon detuning that zeroes g_cm^2 D_a + g_ac^2 D_m - D_a D_c D_m
    d_m = -p.g_cm**2 * p.delta_a / (p.g_ac**2 - p.delta_a * p.delta_c)
    with pytest.raises(SingularityError):
        steady_state_closed_form(p.replace(delta_m_tilde=d_m), DriveConfig(Direction.MAGNON_ONLY, E_m=1e13))
    with pytest.raises(SingularityError):
        effective_coupling(p.replace(delta_m_tilde=d_m), DriveConfig(Direction.MAGNON_ONLY, E_m=1e13))


def _random_params(base, rng):
    w = base.omega_b
    return base.replace(
        delta_a=w * rng.uniform(-2, 2), delta_c=w * rng.uniform(-2, 2),
        delta_m_tilde=w * rng.uniform(0.2, 2), g_ac=w * rng.uniform(0.05, 1.5),
        g_cm=w * rng.uniform(0.05, 1.0),
    )


def test_closed_form_is_linear_in_drives(fig2_params, rng):
    checked = 0
    while checked < 50:
        p = _random_params(fig2_params, rng)
        e1 = rng.uniform(0, 1e14, 3)
        e2 = rng.uniform(0, 1e14, 3)
        try:
            parts = []
            for e in (e1, e2, e1 + e2):
                # cavity a and c drives may both be present in this linearity check
                ss_a = steady_state_closed_form(p, DriveConfig(Direction.FORWARD, E_a=e[0], E_m=e[2]))
                ss_c = steady_state_closed_form(p, DriveConfig(Direction.BACKWARD, E_c=e[1]))
                parts.append(np.array([ss_a.amp_a + ss_c.amp_a, ss_a.amp_c + ss_c.amp_c,
                                       ss_a.amp_m + ss_c.amp_m]))
        except SingularityError:
            continue
        scale = np.max(np.abs(parts[2]))
        assert np.max(np.abs(parts[0] + parts[1] - parts[2])) < 1e-12 * scale
        checked += 1


def test_self_consistent_without_backaction_is_one_shot_solve(fig2_params):
    p = fig2_params.replace(g_mb=0.0, delta_m=fig2_params.delta_m_tilde)
    drive = DriveConfig.from_params(p, "forward", 0.01)
    ss = steady_state_self_consistent(p, drive)
    assert ss.delta_m_tilde_used == p.delta_m
    m = np.array([
        [1j * p.delta_a + p.kappa_a, 1j * p.g_ac, 0],
        [1j * p.g_ac, 1j * p.delta_c + p.kappa_c, 1j * p.g_cm],
        [0, 1j * p.g_cm, 1j * p.delta_m + p.kappa_m],
    ])
    oracle = np.linalg.solve(m, [drive.E_a, drive.E_c, drive.E_m])
    np.testing.assert_allclose([ss.amp_a, ss.amp_c, ss.amp_m], oracle, rtol=1e-12)


def test_self_consistent_fig2_point_satisfies_stationary_equations(fig2_params):
    drive = DriveConfig.from_params(fig2_params, "forward", 0.01)
    ss = steady_state_self_consistent(fig2_params, drive)
    assert ss.method is Method.SELF_CONSISTENT
    assert stationary_residual(fig2_params, drive, ss) < 1e-10
    assert ss.iterations == len(ss.history) >= 1
    # detuning and phonon displacement are mutually consistent
    implied = fig2_params.delta_m_tilde + 2 * fig2_params.g_mb * ss.amp_b.real
    assert ss.delta_m_tilde_used == pytest.approx(implied, rel=1e-9)
    assert ss.amp_b == pytest.approx(phonon_amplitude(fig2_params, ss.amp_m), rel=1e-9)


def test_strong_backaction_still_converges(fig2_params):
    # a large single-magnon coupling makes the detuning shift comparable to omega_b
    p = fig2_params.replace(g_mb=TWO_PI * 30.0)
    drive = DriveConfig.from_params(p, "backward", 0.02)
    ss = steady_state_self_consistent(p, drive)
    assert stationary_residual(p, drive, ss) < 1e-9
    assert abs(ss.delta_m_tilde_used - p.delta_m_tilde) > 1e-3 * p.omega_b


def test_self_consistent_reports_non_convergence(fig2_params):
    drive = DriveConfig.from_params(fig2_params, "forward", 0.01)
    with pytest.raises(ConvergenceError) as info:
        steady_state_self_consistent(fig2_params.replace(g_mb=TWO_PI * 30.0), drive, tol=1e-15, max_iter=2)
    assert info.value.last_residual is not None


def _lossless_gap(params, ratio):
    k = ratio * params.omega_b
    p = params.replace(kappa_a=k, kappa_c=k, kappa_m=k)
    drive = DriveConfig(Direction.MAGNON_ONLY, E_m=4.2e13)
    full = steady_state_self_consistent(p, drive)
    closed = steady_state_closed_form(p.replace(delta_m_tilde=full.delta_m_tilde_used), drive)
    return max(abs(x - y) / abs(y) for x, y in (
        (full.amp_a, closed.amp_a), (full.amp_c, closed.amp_c), (full.amp_m, closed.amp_m)))


def test_vanishing_linewidths_recover_closed_form(fig3_params):
    gaps = [_lossless_gap(fig3_params, r) for r in (1e-2, 1e-3, 1e-4)]
    # the gap is first order in kappa / omega_b with a coefficient near 1.1
    assert gaps[1] < 0.01 and gaps[2] < 0.01
    assert gaps[0] < 0.015
    assert gaps[0] / gaps[1] == pytest.approx(10, rel=0.05)
    assert gaps[1] / gaps[2] == pytest.approx(10, rel=0.05)


def test_coupling_is_reciprocal_at_impedance_matching(fig2_matched):
    p = fig2_matched
    fwd = effective_coupling(p, DriveConfig.from_params(p, "forward", 0.1))
    bwd = effective_coupling(p, DriveConfig.from_params(p, "backward", 0.1))
    assert fwd.value == bwd.value or abs(fwd.value - bwd.value) <= 4 * np.finfo(float).eps * abs(fwd.value)


def test_magnon_only_coupling_matches_both_formulas(fig2_params):
    e_m = DriveConfig.from_params(fig2_params, "magnon_only").E_m
    vals = [effective_coupling(fig2_params, DriveConfig(d, E_m=e_m)).value
            for d in (Direction.FORWARD, Direction.BACKWARD, Direction.MAGNON_ONLY)]
    assert vals[0] == vals[1] == vals[2]


def test_fig4_point_couplings_differ(fig4_params):
    fwd = effective_coupling(fig4_params, DriveConfig.from_params(fig4_params, "forward", 0.1))
    bwd = effective_coupling(fig4_params, DriveConfig.from_params(fig4_params, "backward", 0.1))
    assert fwd.direction is Direction.FORWARD
    assert abs(fwd.value - bwd.value) > 0.05 * abs(fwd.value)


def test_coupling_agrees_with_closed_form_amplitude(fig4_params):
    for direction in (Direction.FORWARD, Direction.BACKWARD):
        drive = DriveConfig.from_params(fig4_params, direction, 0.3)
        direct = effective_coupling(fig4_params, drive).value
        ss = steady_state_closed_form(fig4_params, drive)
        via_state = 2j * fig4_params.g_mb * ss.amp_m
        assert via_state.imag == pytest.approx(0, abs=1e-12 * abs(direct))
        assert via_state.real == pytest.approx(direct, rel=1e-12)
        assert effective_coupling_from_state(fig4_params, ss, direction).value == pytest.approx(direct, rel=1e-12)


def test_directional_splitting_is_linear_near_matching(fig2_matched):
    w = fig2_matched.omega_b

    def split(eps):
        p = fig2_matched.replace(g_ac=w * (1 + eps))
        f = effective_coupling(p, DriveConfig.from_params(p, "forward", 0.05)).value
        b = effective_coupling(p, DriveConfig.from_params(p, "backward", 0.05)).value
        return abs(f - b)

    g = effective_coupling(fig2_matched, DriveConfig.from_params(fig2_matched, "forward", 0.05)).value
    assert split(0.0) <= 8 * np.finfo(float).eps * abs(g)
    assert split(2e-6) / split(1e-6) == pytest.approx(2.0, rel=1e-3)
    assert split(-2e-6) / split(-1e-6) == pytest.approx(2.0, rel=1e-3)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 1.5), st.floats(-2.0, 2.0), st.floats(1e-4, 0.5))
def test_phonon_amplitude_modulus_property(g_ratio, d_ratio, power):
    from magsim.scenarios import preset_params
    p = preset_params("fig4")
    p = p.replace(g_ac=g_ratio * p.omega_b, delta_c=d_ratio * p.omega_b)
    try:
        ss = steady_state_closed_form(p, DriveConfig.from_params(p, "forward", power))
    except SingularityError:
        return
    expected = p.g_mb * abs(ss.amp_m) ** 2 / np.sqrt(p.omega_b**2 + p.kappa_b**2)
    assert abs(ss.amp_b) == pytest.approx(expected, rel=1e-13)
