import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from movant.channel import (PathComponent, Scenario, ScenarioConfig, build_channel, direction,
                            field_response, generate_scenario, large_scale_gains)
from movant.errors import ConfigError, InfeasibleLayout
from movant.geometry import AntennaLayout, Box, DualScale, ElementGlobal, planar_offsets
from movant.patterns import Directional38901

LAM = 0.1


def one_path(az=0.0, el=0.0, g=1.0 + 0j):
    return Scenario(LAM, ((PathComponent(az, el, g),),))


def test_deterministic_and_seed_sensitive():
    cfg = ScenarioConfig()
    a, b = generate_scenario(cfg, 7), generate_scenario(cfg, 7)
    assert a.dumps() == b.dumps()
    assert a.dumps() != generate_scenario(cfg, 8).dumps()


def test_frozen_draw():
    # first path of seed 0, recorded once and cross-checked against a bare Philox stream
    p = generate_scenario(ScenarioConfig(), 0).users[0][0]
    assert p.azimuth_deg == pytest.approx(-174.93586716036683, abs=1e-12)
    assert p.elevation_deg == pytest.approx(-24.077716943508708, abs=1e-12)
    assert p.gain == pytest.approx(0.24695936490580234 + 0.3468264322020154j, abs=1e-12)
    g = np.random.Generator(np.random.Philox(np.random.SeedSequence(0)))
    assert g.uniform(-180, 180, size=(4, 5))[0, 0] == p.azimuth_deg


def test_sector_and_counts():
    cfg = ScenarioConfig(n_users=3, n_paths=7, elevation_range=(-30, 10))
    sc = generate_scenario(cfg, 1)
    assert sc.n_users == 3 and all(len(p) == 7 for p in sc.users)
    for paths in sc.users:
        for p in paths:
            assert -180 <= p.azimuth_deg <= 180 and -30 <= p.elevation_deg <= 10
            assert abs(np.linalg.norm(p.direction) - 1) < 1e-12


@pytest.mark.parametrize("kw", [{"n_users": 0}, {"n_paths": 0}, {"noise_power": 0.0}])
def test_config_errors(kw):
    with pytest.raises(ConfigError):
        generate_scenario(ScenarioConfig(**kw), 0)


def test_unit_average_power():
    cfg = ScenarioConfig(n_users=4, n_paths=5)
    lay = AntennaLayout.from_euler(planar_offsets(2, 2, LAM / 2), wavelength=LAM)
    acc = 0.0
    n = 10_000
    for s in range(n):
        H = build_channel(lay, generate_scenario(cfg, s))
        acc += np.mean(np.sum(np.abs(H) ** 2, axis=1)) / 4
    assert abs(acc / n - 1) < 0.02


def test_dump_load_round_trip(tmp_path):
    sc = generate_scenario(ScenarioConfig(), 3)
    path = tmp_path / "s.json"
    sc.dump(path)
    back = Scenario.load(path)
    assert back.dumps() == sc.dumps()
    lay = AntennaLayout.from_euler(planar_offsets(2, 2, LAM / 2), wavelength=LAM)
    assert np.array_equal(build_channel(lay, back), build_channel(lay, sc))


def test_field_response_examples():
    p = PathComponent(0.0, 0.0, 1.0)
    lay = AntennaLayout.from_euler([[LAM / 2, 0, 0], [0, 0, 0]], wavelength=LAM)
    assert np.isclose(field_response(lay, p, 0), -1.0)
    assert field_response(lay, PathComponent(33.0, 12.0, 1.0), 1) == 1 + 0j
    d = lay.with_pattern(Directional38901())
    back = PathComponent(180.0, 0.0, 1.0)
    assert np.isclose(abs(field_response(d, back, 1)), np.sqrt(10 ** -2.2))


def test_single_element_single_path():
    beta = 0.3 - 0.4j
    lay = AntennaLayout.from_euler([[0, 0, 0]], wavelength=LAM)
    assert np.allclose(build_channel(lay, one_path(g=beta)), [[beta]])


def test_broadside_pair_equal():
    lay = AntennaLayout.from_euler([[0, 0, 0], [LAM / 2, 0, 0]], wavelength=LAM)
    H = build_channel(lay, one_path(az=90.0, g=0.7j))
    assert np.isclose(H[0, 0], H[0, 1])


def test_matches_elementwise_sum():
    sc = generate_scenario(ScenarioConfig(), 11)
    rng = np.random.default_rng(0)
    pos = planar_offsets(2, 2, LAM) + rng.normal(scale=0.01, size=(4, 3))
    ang = rng.uniform(-1, 1, size=(4, 3))
    lay = AntennaLayout.from_euler(pos, ang, LAM, pattern=Directional38901())
    H = build_channel(lay, sc)
    ref = np.array([[sum(p.gain * field_response(lay, p, n) for p in paths) for n in range(4)]
                    for paths in sc.users])
    assert np.allclose(H, ref, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.tuples(*[st.floats(-1, 1)] * 3), st.floats(-180, 180), st.floats(-60, 60))
def test_translation_is_a_row_phase_for_one_path(t, az, el):
    lay = AntennaLayout.from_euler(planar_offsets(2, 2, LAM / 2), wavelength=LAM)
    sc = one_path(az, el, 0.5 + 0.5j)
    H0 = build_channel(lay, sc)
    H1 = build_channel(lay.with_positions(lay.positions + np.array(t)), sc)
    assert np.allclose(np.abs(H1), np.abs(H0))
    phase = H1 / H0
    assert np.allclose(phase, phase[0, 0])


def test_omni_frobenius_invariant_to_rotation():
    sc = generate_scenario(ScenarioConfig(), 2)
    rng = np.random.default_rng(4)
    pos = planar_offsets(2, 2, LAM / 2)
    base = np.linalg.norm(build_channel(AntennaLayout.from_euler(pos, wavelength=LAM), sc))
    for _ in range(10):
        lay = AntennaLayout.from_euler(pos, rng.uniform(-3, 3, (4, 3)), LAM)
        assert np.linalg.norm(build_channel(lay, sc)) == pytest.approx(base, rel=1e-14)


def test_infeasible_layout_raises():
    lay = AntennaLayout.from_euler([[0, 0, 0], [LAM / 4, 0, 0]], wavelength=LAM)
    with pytest.raises(InfeasibleLayout):
        build_channel(lay, one_path())
    assert build_channel(lay, one_path(), check=False).shape == (1, 2)


def test_inactive_columns_are_zero():
    lay = AntennaLayout.from_euler([[0, 0, 0], [LAM, 0, 0]], wavelength=LAM, active=[True, False])
    H = build_channel(lay, one_path())
    assert H[0, 1] == 0 and H[0, 0] != 0


def test_fading_along_a_sweep():
    # multipath gives both peaks and dips over a one-wavelength sweep
    cfg = ScenarioConfig(n_users=1, n_paths=5)
    hits = 0
    for s in range(50):
        sc = generate_scenario(cfg, s)
        xs = np.linspace(0, LAM, 101)
        p = [abs(build_channel(AntennaLayout.from_euler([[x, 0, 0]], wavelength=LAM), sc)[0, 0]) ** 2
             for x in xs]
        hits += 10 * np.log10(max(p) / min(p)) > 3
    assert hits >= 45


def test_dual_scale_gain_law():
    sc = one_path(az=0.0, el=0.0)
    spec = DualScale(ElementGlobal(1, Box.centered((LAM, LAM, LAM)), LAM))
    near = spec.decode([50.0, 0, 0, 0, 0, 0])    # user at 100 m along +x, platform halfway
    g = large_scale_gains(near, sc)
    assert g[0] == pytest.approx(0.5 ** (-1.4))
    H = build_channel(near, sc)
    assert abs(H[0, 0]) == pytest.approx(0.5 ** (-1.4))
    assert large_scale_gains(AntennaLayout.from_euler([[0, 0, 0]], wavelength=LAM), sc)[0] == 1.0


def test_direction_helper():
    assert np.allclose(direction(90.0, 0.0), [0, 1, 0], atol=1e-15)
    assert np.allclose(direction(0.0, 90.0), [0, 0, 1], atol=1e-15)
