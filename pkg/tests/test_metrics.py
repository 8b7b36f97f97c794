import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from bergkern import gauge as G
from bergkern import geometry as geo
from bergkern import metrics as M
from bergkern import teich_model as tm


def test_unit_ball_volume_values():
    assert M.unit_ball_volume(4) == pytest.approx(math.pi ** 2 / 2, rel=1e-14)
    assert M.unit_ball_volume(6) == pytest.approx(math.pi ** 3 / 6, rel=1e-14)


def test_kobayashi_origin():
    assert M.kobayashi_origin(geo.ball(2), [3, 4]) == pytest.approx(5.0)
    assert M.kobayashi_origin(geo.polydisc([1, 1]), [1, 1j]) == 1.0
    with pytest.raises(M.MetricError):
        M.kobayashi_origin(geo.disk(), [1], base=[0.2])


@pytest.mark.parametrize("p,v,expected,tol", [(0, 1, 1.0, 1e-6), (0.3, 1, 1 / 0.91, 1e-3)])
def test_azukawa_disk(p, v, expected, tol):
    A = M.azukawa(M.disk_green, [p], [v])
    assert A.value == pytest.approx(expected, rel=tol)
    assert A.spread >= 0 and len(A.ts) == 3


def test_azukawa_disk_example_t_sequence():
    A = M.azukawa(M.disk_green, [0], [1], [1e-2, 1e-3, 1e-4])
    assert A.value == pytest.approx(1.0, abs=1e-6)


def test_azukawa_polydisc_diagonal():
    A = M.azukawa(M.balanced_green(geo.polydisc([1, 1])), [0, 0], [1, 1])
    assert A.value == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("spec", [geo.ball(2), geo.polydisc([1, 1]), geo.nonconvex_example()])
def test_azukawa_equals_gauge_random_directions(spec):
    rng = np.random.default_rng(8)
    for _ in range(50):
        u = rng.standard_normal(2 * spec.dim)
        v = u[:spec.dim] + 1j * u[spec.dim:]
        A = M.azukawa(M.balanced_green(spec), np.zeros(spec.dim), v)
        assert abs(A.value - geo.gauge_eval(spec, v)) <= 1e-3 * geo.gauge_eval(spec, v)


def test_azukawa_rejects_moved_pole():
    with pytest.raises(M.MetricError):
        M.azukawa(M.balanced_green(geo.ball(2)), [0.1, 0], [1, 0])
    with pytest.raises(M.MetricError):
        M.azukawa(M.disk_green, [0], [1], [0.0, 1e-3])


@pytest.mark.parametrize("z", [0, 0.5, 0.3 - 0.6j])
def test_disk_model_indicatrix_volume(z):
    assert M.indicatrix_volume(M.disk_model_indicatrix(z)).value == pytest.approx(
        math.pi * (1 - abs(z) ** 2) ** 2, rel=1e-14)


def test_busemann_densities():
    assert M.busemann_density(M.disk_model_indicatrix(0)).value == pytest.approx(1.0)
    assert M.busemann_density(M.disk_model_indicatrix(0.5)).value == pytest.approx(0.75 ** -2)
    assert M.busemann_density(M.origin_indicatrix(geo.polydisc([1, 1]))).value == pytest.approx(0.5)
    assert M.indicatrix_volume(M.origin_indicatrix(geo.polydisc([1, 1]))).value == pytest.approx(math.pi ** 2)


@pytest.mark.parametrize("spec", [geo.ball(2), geo.nonconvex_example()])
def test_busemann_identity_monte_carlo(spec):
    ind = M.origin_indicatrix(spec)
    mu = M.busemann_density(ind, "monte-carlo", 400_000, seed=2)
    V = M.indicatrix_volume(ind).value
    eps = M.unit_ball_volume(2 * spec.dim)
    assert abs(mu.value * V - eps) <= 3 * mu.std_error * V


def test_sandwich_checks():
    for spec in (geo.polydisc([1, 1]), geo.nonconvex_example(), geo.Balanced(G.Scale(2.0, G.polydisc_gauge([1, 1])), 2)):
        rep = M.indicatrix_sandwich_check(spec)
        assert rep.passed
        assert all(m.value >= -1e-9 for m in rep.margins)


def test_regions():
    assert M.parse_region("rect:0,1,0,2") == M.Rect(0, 1, 0, 2)
    assert M.parse_region("disk:0.5,0.1,0") == M.Circle(0.5, 0.1 + 0j)
    with pytest.raises(M.MetricError):
        M.parse_region("square:1")


def test_hausdorff_euclidean_calibration():
    est = M.hausdorff_cover(M.euclidean_distance, M.Rect(0, 1, 0, 1), 1e-2)
    assert est.value == pytest.approx(1.0, rel=0.05)
    assert est.n_cells >= 100


def test_hausdorff_scaling():
    est = M.hausdorff_estimate(M.scaled_distance(2.0), M.Rect(0, 1, 0, 1), 1e-2)
    assert est == pytest.approx(4.0, rel=0.05)


def test_hausdorff_disk_model():
    est = M.hausdorff_estimate(tm.teich_distance_many, M.Circle(math.tanh(1.0)), 1e-2)
    area = integrate.quad(lambda r: 2 * math.pi * r / (1 - r * r) ** 2, 0, math.tanh(1.0))[0]
    assert area == pytest.approx(math.pi * math.sinh(1.0) ** 2, rel=1e-12)
    assert est == pytest.approx(area, rel=0.10)


def test_hausdorff_too_coarse():
    with pytest.raises(M.CoverTooCoarse):
        M.hausdorff_cover(M.euclidean_distance, M.Rect(0, 1, 0, 1), 0.5, initial=2)
    with pytest.raises(M.MetricError):
        M.hausdorff_cover(M.euclidean_distance, M.Rect(0, 1, 0, 1), 0.0)


@given(c=st.floats(0.5, 3))
def test_hausdorff_quadratic_scaling(c):
    a = M.hausdorff_estimate(M.scaled_distance(c), M.Rect(0, 1, 0, 1), 0.05 * c)
    assert a == pytest.approx(c * c, rel=0.05)
