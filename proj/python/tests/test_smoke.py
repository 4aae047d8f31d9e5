import math

import numpy as np
import pytest

import mfctune


def test_builtin_names():
    assert mfctune.builtin_names() == ["fig4", "fig5", "fig6", "fig7", "linsolve3"]


def test_controller_step_closed_form():
    params = mfctune.ControllerParams(kp=1.0, ki=0.01, k_alpha=0.0, k_beta=40.0, dt=1e-5)
    state = mfctune.controller_new(params, psi0=2.0)
    for _ in range(100):
        state, u = mfctune.controller_step(state, params, y_ref=0.1, y_meas=0.0)
    assert state.k == 100
    assert u == pytest.approx(2.0 * 0.01 * 0.1 * 100 * 1e-5, rel=1e-12)


def test_invalid_gain_raises():
    with pytest.raises(mfctune.InvalidParams):
        mfctune.ControllerParams(kp=-1.0, ki=0.01, k_alpha=0.0, k_beta=0.0, dt=1e-5)
    assert issubclass(mfctune.Divergence, mfctune.Error)


def test_filter_step_is_rk4():
    f = mfctune.FirstOrderFilter(tau=1e-5).step(1.0, 1e-5)
    assert f.state == pytest.approx(0.625, rel=1e-14)


def test_forward_and_mask():
    net = mfctune.FeedforwardNet.default_topology()
    assert net.weight_count == 7 and net.input_count == 2
    net.set_weight(0, 1.7)
    net.set_weight(4, 1.0)
    assert net.weights[0] == 1.0
    assert net.forward([0.5, 0.0]) == pytest.approx(math.tanh(math.tanh(0.5)), rel=1e-14)
    net.set_mask(0, False)
    assert net.forward([0.5, 0.0]) == 0.0
    with pytest.raises(mfctune.IndexOutOfRange):
        net.set_weight(7, 0.0)


def test_fig4_tracks_reference():
    scenario = mfctune.builtin_scenarios()[0]
    trace = mfctune.train_online(scenario)
    assert trace["w"].shape == (scenario.horizon, 7)
    tail = trace["y"][-scenario.horizon // 5 :]
    assert np.max(np.abs(tail - 0.55)) < 0.01
    assert np.all(trace["w"][:, 6] == 0.0)
    assert np.all(np.abs(trace["w"]) <= 1.0)


def test_custom_events_from_python():
    scenario = mfctune.builtin_scenarios()[0]
    scenario.horizon = 8000
    scenario.events = scenario.events + [mfctune.ScenarioEvent(4000, mfctune.SetReference(0.3))]
    segments = mfctune.settling(scenario, 0.01)
    assert len(segments) == 2
    assert all(s["settled"] for s in segments)


def test_linear_solver():
    base = mfctune.ControllerParams(kp=1e-3, ki=10.0, k_alpha=1000.0, k_beta=40.0, dt=1e-5)
    a = [[3.0, 0.5, 8.0], [4.0, 7.0, 4.5], [1.0, 9.0, 3.0]]
    b = [7.95, 6.30, 3.80]
    res = mfctune.solve_linear(a, b, mfctune.stagger_params(base, 3, 0.5), horizon=20000)
    assert res["converged"]
    np.testing.assert_allclose(res["x"][-1], np.linalg.solve(a, b), atol=1e-2)


def test_config_round_trip_and_run():
    text = mfctune.normalize_config("builtin: fig4\nhorizon: 3000\n")
    assert mfctune.normalize_config(text) == text
    trace = mfctune.run_config(text)
    assert len(trace["k"]) == 3000
    with pytest.raises(mfctune.ValidationError):
        mfctune.run_config("builtin: fig4\ncontroller: {kp: -1}\n")


def test_cli_exit_codes(capsys):
    assert mfctune.cli(["list"]) == 0
    assert "linsolve3" in capsys.readouterr().out
    assert mfctune.cli(["run", "missing.cfg"]) == 4
