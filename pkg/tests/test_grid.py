import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from egf import InvalidArgumentError, SensorGrid, make_disk_grid, make_interval_grid, make_square_grid


@given(
    a=st.floats(-5, 5),
    length=st.floats(0.1, 10),
    n=st.integers(3, 400),
    c0=st.floats(-3, 3),
    c1=st.floats(-3, 3),
)
def test_trapezoid_weights_integrate_linear_functions_exactly(a, length, n, c0, c1):
    b = a + length
    g = make_interval_grid(a, b, n)
    approx = g.weights @ (c0 + c1 * g.x)
    exact = c0 * (b - a) + c1 * (b * b - a * a) / 2
    assert approx == pytest.approx(exact, rel=1e-10, abs=1e-10)


def test_interval_grid_layout():
    g = make_interval_grid(0.0, 1.0, 2000)
    assert g.size == 2000 and g.dim == 1
    assert g.x[0] == 0.0 and g.x[-1] == 1.0
    assert g.weights[0] == pytest.approx(g.weights[1] / 2)
    g.check()


def test_disk_grid_sensor_count_and_area():
    g = make_disk_grid(0.05)
    assert 1200 <= g.size <= 1300
    assert np.all(g.contains())
    assert g.weights.sum() == pytest.approx(np.pi, rel=0.03)
    g.check()


def test_disk_grid_is_symmetric_under_reflection():
    g = make_disk_grid(0.1)
    pts = {tuple(np.round(p, 12)) for p in g.points}
    assert pts == {tuple(np.round(-p, 12)) for p in g.points}
    assert pts == {tuple(np.round(p[::-1], 12)) for p in g.points}


def test_square_grid_is_tensor_trapezoid():
    g = make_square_grid(11)
    assert g.size == 121
    assert g.weights.sum() == pytest.approx(1.0)
    x, y = g.points.T
    # exact for bilinear integrands
    assert g.weights @ (x * y) == pytest.approx(0.25)
    g.check(rtol=0.01)


def test_points_are_read_only():
    g = make_interval_grid(0.0, 1.0, 10)
    with pytest.raises(ValueError):
        g.points[0, 0] = 5.0
    with pytest.raises(ValueError):
        g.weights[0] = 5.0


@pytest.mark.parametrize(
    "make",
    [
        lambda: make_interval_grid(0.0, 1.0, 2),
        lambda: make_interval_grid(1.0, 0.0, 10),
        lambda: make_disk_grid(0.0),
        lambda: make_disk_grid(0.7),
        lambda: make_square_grid(2),
        lambda: SensorGrid(np.zeros(3), np.array([1.0, 0.0, 1.0])),
        lambda: SensorGrid(np.zeros(3), np.ones(2)),
        lambda: SensorGrid(np.zeros(3), np.ones(3), domain="torus"),
    ],
)
def test_invalid_grids_are_rejected(make):
    with pytest.raises(InvalidArgumentError):
        make()


def test_check_flags_points_outside_domain():
    g = SensorGrid(np.array([0.0, 0.5, 2.0]), np.ones(3) / 3, "interval", (0.0, 1.0))
    with pytest.raises(InvalidArgumentError):
        g.check()


@settings(max_examples=30)
@given(st.integers(3, 60), st.integers(0, 2**31 - 1))
def test_norm_matches_inner(n, seed):
    g = make_interval_grid(-1.0, 2.0, n)
    u = np.random.default_rng(seed).standard_normal((n, 3))
    assert np.allclose(g.norm(u) ** 2, g.inner(u, u))
    assert g.inner(u[:, 0], u[:, 1]) == pytest.approx(g.inner(u[:, 1], u[:, 0]))


def test_same_as_compares_contents():
    assert make_interval_grid(0, 1, 50).same_as(make_interval_grid(0, 1, 50))
    assert not make_interval_grid(0, 1, 50).same_as(make_interval_grid(0, 1, 51))
