import numpy as np
import pytest

from cgbound.errors import InfeasibleFitError, InputDataError
from cgbound.mads import Evaluation, MinimizeResult, SearchConfig, minimize


def quadratic_1d(x):
    return (x[0] - 3.0) ** 2


def test_active_constraint():
    cfg = SearchConfig(initial_point=[5.0], initial_mesh=[1.0], min_mesh=1e-6)
    res = minimize(quadratic_1d, lambda x: x[0] >= 4.0, cfg)
    assert res.point[0] == pytest.approx(4.0, abs=1e-5)
    assert res.stop_reason == "mesh"


def test_sphere_unconstrained():
    cfg = SearchConfig(initial_point=[1.0, 1.0], initial_mesh=[0.5, 0.5], budget=500)
    res = minimize(lambda x: float(x[0] ** 2 + x[1] ** 2), lambda x: True, cfg)
    assert res.value < 1e-8
    assert res.evaluations <= 500


def test_returned_point_is_feasible():
    cfg = SearchConfig(initial_point=[2.0, 2.0], initial_mesh=[0.5, 0.5], seed=3)
    res = minimize(
        lambda x: float((x[0] - 1) ** 2 + x[1] ** 2),
        lambda x: x[0] + x[1] >= 1.5,
        cfg,
    )
    assert res.point[0] + res.point[1] >= 1.5


def test_determinism():
    def run():
        cfg = SearchConfig(initial_point=[1.3, -0.7], initial_mesh=[0.4, 0.4], seed=11, budget=300)
        return minimize(lambda x: float(np.sum(x**2)), lambda x: True, cfg)

    a, b = run(), run()
    assert len(a.trace) == len(b.trace)
    for ea, eb in zip(a.trace, b.trace):
        assert np.array_equal(ea.point, eb.point)
        assert ea.value == eb.value and ea.mesh == eb.mesh


def test_monotone_incumbent():
    cfg = SearchConfig(initial_point=[4.0, -4.0], initial_mesh=[1.0, 1.0], seed=5, budget=400)
    res = minimize(lambda x: float(np.sum(x**2)), lambda x: True, cfg)
    feas = np.array([ev.value for ev in res.trace if ev.feasible])
    running = np.minimum.accumulate(feas)
    assert np.all(np.diff(running) <= 0)
    assert running[-1] == res.value  # returned value is the best feasible seen


def test_feasibility_restoration():
    # start infeasible; the outward poll phase must find the feasible region
    cfg = SearchConfig(initial_point=[0.0], initial_mesh=[0.5], seed=1, budget=2000)
    res = minimize(quadratic_1d, lambda x: x[0] >= 4.0, cfg)
    assert res.point[0] >= 4.0
    assert res.point[0] == pytest.approx(4.0, abs=1e-4)


def test_restoration_budget_exhausted():
    cfg = SearchConfig(initial_point=[0.0], initial_mesh=[0.5], budget=20)
    with pytest.raises(InfeasibleFitError):
        minimize(quadratic_1d, lambda x: False, cfg)


def test_lower_bounds_respected():
    cfg = SearchConfig(
        initial_point=[2.0], initial_mesh=[1.0], lower_bounds=[0.5], seed=2
    )
    res = minimize(lambda x: float(x[0] ** 2), lambda x: True, cfg)
    assert res.point[0] >= 0.5
    assert res.point[0] == pytest.approx(0.5, abs=1e-5)
    for ev in res.trace:
        assert ev.point[0] >= 0.5


def test_config_validation():
    with pytest.raises(InputDataError):
        SearchConfig(initial_point=[0.0], initial_mesh=[1.0], budget=0)
    with pytest.raises(InputDataError):
        SearchConfig(initial_point=[0.0], initial_mesh=[1e-6], min_mesh=1e-5)


def test_trace_csv(tmp_path):
    cfg = SearchConfig(initial_point=[1.0], initial_mesh=[0.5], budget=50)
    res = minimize(quadratic_1d, lambda x: True, cfg)
    out = tmp_path / "trace.csv"
    res.trace_to_csv(out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "iteration,x0,value,feasible,mesh"
    assert len(lines) == len(res.trace) + 1
