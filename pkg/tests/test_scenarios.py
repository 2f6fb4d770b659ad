import math

import numpy as np
import pytest

from magsim.constants import TWO_PI
from magsim.errors import ParameterError
from magsim.output import to_csv
from magsim.params import Direction
from magsim.scenarios import Axis, SweepSpec, preset, preset_names, preset_params, run_sweep


def test_preset_names():
    assert set(preset_names()) == {"fig2a", "fig2b", "fig2c", "fig2d", "fig3", "fig4", "fig5"}
    with pytest.raises(ParameterError, match="unknown preset"):
        preset("fig6")


def test_fig2b_preset():
    spec = preset("fig2b")
    assert [a.name for a in spec.axes] == ["power"]
    assert spec.axes[0].values[0] == 0.0 and spec.axes[0].values[-1] == pytest.approx(0.2)
    p = spec.base
    assert p.g_ac == pytest.approx(0.32 * p.omega_b)
    assert p.omega_b == pytest.approx(TWO_PI * 10e6)
    assert p.omega_a == pytest.approx(TWO_PI * 10e9)
    assert p.delta_a == p.delta_c == pytest.approx(-p.omega_b)
    assert p.delta_m_tilde == pytest.approx(0.9 * p.omega_b)
    assert p.kappa_a == p.kappa_c == p.kappa_m == pytest.approx(TWO_PI * 1e6)
    assert p.g_cm == pytest.approx(TWO_PI * 3.2e6)
    assert p.P_m == pytest.approx(94.5e-3)
    assert set(spec.directions) == {Direction.FORWARD, Direction.BACKWARD}


def test_fig2a_preset_is_impedance_matched():
    spec = preset("fig2a")
    assert spec.base.g_ac == pytest.approx(spec.base.omega_b)
    assert len(spec.axes[0].values) == 201


def test_fig3_preset():
    spec = preset("fig3")
    assert {"E_ac", "E_cm", "E_mb", "E_ab"} <= set(spec.outputs)
    assert [a.name for a in spec.axes] == ["delta_a", "delta_c"]
    assert spec.shape == (101, 101)
    assert spec.axes[0].values[0] == -2.0 and spec.axes[0].values[-1] == 2.0
    assert spec.fixed_coupling == pytest.approx(TWO_PI * 2.5e6)
    assert spec.base.kappa_b == pytest.approx(TWO_PI * 100)
    assert spec.base.temperature == 0.02
    assert preset("fig3", gmb_2pi_interpretation="text").fixed_coupling == 2.5e6
    with pytest.raises(ParameterError):
        preset("fig3", gmb_2pi_interpretation="neither")


def test_fig4_and_fig5_presets():
    f4 = preset("fig4")
    assert f4.base.g_mb == pytest.approx(TWO_PI * 0.3)
    assert f4.base.kappa_b == pytest.approx(TWO_PI * 100) and f4.base.temperature == 0.02
    assert set(f4.directions) == {Direction.FORWARD, Direction.BACKWARD}
    f5 = preset("fig5")
    assert [a.name for a in f5.axes] == ["temperature"]
    assert f5.axes[0].values[-1] == pytest.approx(0.3) and len(f5.axes[0].values) == 301
    assert f5.base.P_a == f5.base.P_c == 0.5
    assert preset("fig5", overrides={"power_w": 1.0}).base.P_a == 1.0


def test_overrides_replace_defaults_in_any_spelling():
    assert preset_params("fig4", {"p_m_w": 0.2}).P_m == 0.2
    assert preset_params("fig4", {"g_ac_hz": 5e6}).g_ac == pytest.approx(TWO_PI * 5e6)
    assert preset_params("fig4", {"kappa_b_hz": 50}).kappa_b == pytest.approx(TWO_PI * 50)
    angular = preset_params("fig4", {"kappa_b_hz": TWO_PI * 50, "angular": True})
    assert angular.kappa_b == pytest.approx(TWO_PI * 50)
    assert angular.omega_b == pytest.approx(TWO_PI * 10e6)


def test_points_override():
    assert preset("fig4", points=11).shape == (11,)
    assert preset("fig3", points=5).shape == (5, 5)


def test_spec_validation(fig4_params):
    power = Axis.linspace("power", 0, 1, 3)
    with pytest.raises(ParameterError):
        SweepSpec(fig4_params, (), (Direction.FORWARD,), ("E_mb",))
    with pytest.raises(ParameterError):
        SweepSpec(fig4_params, (power,), (Direction.FORWARD,), ())
    with pytest.raises(ParameterError):
        SweepSpec(fig4_params, (power,), (Direction.FORWARD,), ("E_xy",))
    with pytest.raises(ParameterError, match="both"):
        SweepSpec(fig4_params, (power,), (Direction.FORWARD,), ("Tiso_db",))
    with pytest.raises(ParameterError):
        SweepSpec(fig4_params, (power, power), (Direction.FORWARD,), ("E_mb",))
    with pytest.raises(ParameterError, match="monotone"):
        Axis("power", (0.0, 0.2, 0.1))
    with pytest.raises(ParameterError):
        Axis("gamma", (0.0, 1.0))


def test_fig2a_sweep_is_reciprocal():
    result = run_sweep(preset("fig2a"))
    iso = result.column_values("Tiso_db")
    assert len(iso) == 201
    assert all(abs(x) < 1e-9 for x in iso)


def test_record_per_point_and_direction():
    spec = preset("fig4", points=9)
    result = run_sweep(spec)
    assert len(result.records) == 9 * 2
    assert [c for c, _ in result.records[:2]] == [(0.0,), (0.0,)]
    assert [r.direction for _, r in result.records[:2]] == [Direction.FORWARD, Direction.BACKWARD]


def test_unstable_points_have_no_entanglement(fig4_params):
    # at 1 W the impedance-matched coupling exceeds the stability limit
    spec = SweepSpec(fig4_params.replace(P_a=1.0, P_c=1.0), (Axis("g_ac", (0.32, 1.0)),), (Direction.FORWARD,),
                     ("E_mb", "E_ab", "stability_margin", "flags"))
    rows = run_sweep(spec).rows()
    assert rows[0]["stable"] is True and rows[0]["E_mb"] > 0
    assert rows[1]["stable"] is False and rows[1]["margin"] < 0
    assert rows[1]["E_mb"] is None and rows[1]["E_ab"] is None
    assert "unstable" in rows[1]["flags"]


def test_point_errors_are_flagged_not_raised(fig4_params):
    singular = -0.32**2 / (1 - 0.32**2)
    spec = SweepSpec(fig4_params, (Axis("delta_m_tilde", (singular, 0.5, 0.9)),),
                     (Direction.FORWARD, Direction.BACKWARD), ("T12", "T21", "Tiso_db", "E_mb", "flags"))
    rows = run_sweep(spec, parallelism=2).rows()
    assert len(rows) == 3
    assert "singularity" in rows[0]["flags_12"]
    assert rows[0]["E_mb_12"] is None and rows[0]["T12"] is None
    assert rows[2]["E_mb_12"] is not None and rows[2]["flags_12"] == ""


def test_fig3_maps_are_non_negative():
    result = run_sweep(preset("fig3", points=21))
    rows = result.rows()
    assert len(rows) == 21 * 21
    for row in rows:
        for key in ("E_ac", "E_cm", "E_mb", "E_ab"):
            if row["stable"]:
                assert row[key] >= 0
            else:
                assert row[key] is None


def test_fig3_entangled_neighbourhood_of_red_sidebands():
    w = 0.04
    spec = preset("fig3")
    spec = SweepSpec(spec.base, (Axis.linspace("delta_a", -1 - w, -1 + w, 5), Axis.linspace("delta_c", -1 - w, -1 + w, 5)),
                     spec.directions, spec.outputs, fixed_coupling=spec.fixed_coupling)
    for row in run_sweep(spec).rows():
        assert all(row[k] > 0 for k in ("E_ac", "E_cm", "E_mb", "E_ab"))


def test_fig4_one_way_cavity_phonon_entanglement():
    rows = run_sweep(preset("fig4")).rows()
    cut = [r for r in rows if r["E_ab_21"] == 0.0 and r["E_ab_12"] > 0]
    assert cut
    assert all(r["E_ab_iso_db"] == math.inf for r in cut)


def test_fig5_entanglement_dies_out_with_temperature():
    base = preset("fig5")
    spec = SweepSpec(base.base, (Axis.linspace("temperature", 0.0, 4.0, 81),), base.directions, base.outputs)
    rows = run_sweep(spec).rows()
    temps = np.array([r["T_kelvin"] for r in rows])
    for key in ("E_mb_12", "E_mb_21", "E_ab_12", "E_ab_21"):
        e = np.array([r[key] for r in rows])
        peak = int(np.argmax(e))
        assert np.all(np.diff(e[peak:]) <= 1e-12)
        zero = temps[e == 0.0]
        assert zero.size and zero.min() >= 0.1
        assert np.all(e[temps >= zero.min()] == 0.0)


def test_results_independent_of_parallelism():
    spec = preset("fig4", points=41)
    assert to_csv(run_sweep(spec, 1)) == to_csv(run_sweep(spec, 8))
    spec3 = preset("fig3", points=9)
    assert to_csv(run_sweep(spec3, 1)) == to_csv(run_sweep(spec3, 3))


def test_parallelism_must_be_positive():
    with pytest.raises(ParameterError):
        run_sweep(preset("fig2a", points=3), 0)


def test_column_contract():
    assert run_sweep(preset("fig2b", points=3)).columns() == ["P_watts", "T12", "T21", "Tiso_db"]
    cols = run_sweep(preset("fig4", points=3)).columns()
    for name in ("E_mb_12", "E_mb_21", "E_mb_iso_db", "E_ab_12", "E_ab_21", "E_ab_iso_db"):
        assert name in cols
    cols3 = run_sweep(preset("fig3", points=3)).columns()
    assert cols3[:3] == ["delta_a_over_omega_b", "delta_c_over_omega_b", "direction"]
