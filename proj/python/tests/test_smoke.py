import math

import pytest

import casimir_grating as cg


def test_ideal_planar_pin():
    for z in (100e-9, 300e-9, 1e-6):
        p = cg.planar_pressure("perfect", "perfect", z)
        assert p == pytest.approx(cg.ideal_pressure(z), rel=1e-3)
        assert p < 0


def test_real_materials_weaker_than_ideal():
    p = cg.planar_pressure("gold_drude", "si_paper", 200e-9)
    assert 0 < abs(p) < abs(cg.ideal_pressure(200e-9))


def test_epsilon_decreases():
    assert cg.epsilon("gold_drude", 1e13) > cg.epsilon("gold_drude", 1e15) > 1.0
    with pytest.raises(ValueError):
        cg.epsilon("gold_drude", -1.0)


def test_pfa_collapses_on_flat_profile():
    flat = cg.GratingProfile(400e-9, 200e-9, 200e-9, 0.0)
    law = lambda z: -1e-28 / z**4
    assert cg.pfa_corrugated(law, flat, 150e-9) == pytest.approx(law(150e-9), rel=1e-12)
    sample = cg.GratingProfile.measured_sample()
    assert sample.depth == pytest.approx(98e-9)
    assert 0.9 < cg.pfa_share_topbottom(law, sample, 200e-9) < 1.0


def test_grating_flat_limit_and_rho():
    flat = cg.GratingProfile.measured_sample().with_depth(0.0)
    p = cg.grating_pressure(flat, "perfect", "perfect", [300e-9], orders=2)
    assert p[0] == pytest.approx(cg.ideal_pressure(300e-9), rel=1e-3)
    rho = cg.rho_ratio(cg.GratingProfile.measured_sample(), "si_paper", "gold_drude", [150e-9], orders=3,
                       bz_nodes=4, radial_nodes=16, angular_nodes=8)
    assert rho[0] > 1.0


def test_electrostatics():
    assert cg.sphere_plane_force(50e-6, 100e-9, 0.3) == pytest.approx(1.245283006363509e-9, rel=1e-9)
    assert cg.sphere_plane_force(50e-6, 100e-9, 0.0) == 0.0
    sample = cg.GratingProfile.measured_sample()
    e_flat = cg.capacitor_energy(sample.with_depth(0.0), 200e-9, 1.0)
    assert e_flat == pytest.approx(0.5 * 8.8541878128e-12 / 200e-9, rel=1e-3)
    assert cg.corrugated_sphere_gradient(sample, 200e-9, 0.3, 50e-6) < cg.sphere_plane_gradient(50e-6, 200e-9, 0.3)


def test_calibration_round_trip():
    rows = cg.synthesize_sweep([-0.2, 0.1, 0.4], [i * 50e-9 for i in range(12)])
    fit = cg.fit_calibration(rows, -0.499)
    assert fit["c"] == pytest.approx(-614.0, rel=1e-6)
    assert fit["z0"] == pytest.approx(800e-9, rel=1e-6)
    v0, _ = cg.find_residual_voltage(cg.synthesize_sweep([-1.0, -0.5, 0.0, 0.5], [0.0]))
    assert v0 == pytest.approx(-0.499, abs=1e-9)
    with pytest.raises(cg.FitError):
        cg.fit_calibration(rows[:1], -0.499)


def test_pipeline_deterministic():
    text = "[pipeline]\nrecipe = fig3a\n[grid]\nz = 100nm, 200nm, 300nm\n"
    a = cg.run_pipeline(text)
    b = cg.run_pipeline(text)
    assert a["csv"] == b["csv"]
    values = a["curves"][0]["value"]
    assert all(x > y for x, y in zip(values, values[1:]))
    assert "inputs_hash" in a["metadata"]
    with pytest.raises(ValueError):
        cg.run_pipeline("[pipeline]\nrecipe = fig3a\n[grid]\nz = 100nm\n[sphere]\nradios = 1um\n")
