import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bergkern import bergman as B
from bergkern import geometry as geo
from bergkern import green as gr

# log|(0.6 - 0.3) / (1 - 0.18)|; the quotient is 0.3 / 0.82
GREEN_03_06 = math.log(0.3 / 0.82)


def test_green_balanced_examples():
    assert gr.green_balanced(geo.disk(), [0.5]) == pytest.approx(math.log(0.5), abs=1e-15)
    assert gr.green_balanced(geo.polydisc([1, 1]), [0.5, 0.2]) == pytest.approx(math.log(0.5), abs=1e-15)
    assert gr.green_balanced(geo.nonconvex_example(), [0, 0]) == -math.inf
    with pytest.raises(gr.GreenError):
        gr.green_balanced(geo.disk(), [1.2])


def test_green_disk_examples():
    assert gr.green_disk(0, 0.5) == pytest.approx(math.log(0.5), abs=1e-15)
    assert gr.green_disk(0.3, 0.3) == -math.inf
    assert gr.green_disk(0.3, 0.6) == pytest.approx(GREEN_03_06, abs=1e-14)
    assert gr.green_disk(0.3, 0.6) == pytest.approx(-1.0055218656020977, abs=1e-12)
    with pytest.raises(gr.GreenError):
        gr.green_disk(1.0, 0.2)


@pytest.mark.parametrize("spec", [geo.disk(), geo.ball(2), geo.polydisc([1, 1]), geo.nonconvex_example()])
def test_negativity_on_random_points(spec):
    rng = np.random.default_rng(1)
    u = rng.standard_normal((1000, 2 * spec.dim))
    z = u[:, :spec.dim] + 1j * u[:, spec.dim:]
    z = z / geo.gauge_eval_many(spec, z)[:, None] * rng.uniform(0.001, 0.999, (1000, 1))
    assert all(gr.green_balanced(spec, p) < 0 for p in z)


@given(lam=st.floats(0.1, 10), x=st.floats(-0.7, 0.7), y=st.floats(-0.7, 0.7))
def test_dilation_invariance(lam, x, y):
    spec = geo.nonconvex_example()
    z = np.array([x, 1j * y]) * 0.6
    if not np.any(z):
        return
    assert gr.green_balanced(geo.dilate(spec, lam), lam * z) == pytest.approx(
        gr.green_balanced(spec, z), abs=1e-12)


def test_sublevel_volumes():
    assert gr.sublevel_volume(geo.disk(), 2).value == pytest.approx(math.pi * math.exp(-4), rel=1e-14)
    assert gr.sublevel_volume(geo.polydisc([1, 1]), 1).value == pytest.approx(math.pi ** 2 * math.exp(-4), rel=1e-14)
    with pytest.raises(gr.GreenError):
        gr.sublevel_volume(geo.disk(), 0)


@given(w=st.floats(-0.9, 0.9), a=st.floats(0.1, 5))
def test_disk_sublevel_is_mobius_image(w, a):
    # image of |u| < eps under u -> (u + w)/(1 + w u): radius eps (1 - w^2) / (1 - w^2 eps^2)
    eps = math.exp(-a)
    r = eps * (1 - w * w) / (1 - w * w * eps * eps)
    assert gr.disk_sublevel_volume(w, a).value == pytest.approx(math.pi * r * r, rel=1e-12)


def test_disk_sublevel_monte_carlo():
    v = gr.disk_sublevel_volume(0.3, 1.0, "monte-carlo", 400_000, seed=4)
    assert abs(v.value - gr.disk_sublevel_volume(0.3, 1.0).value) <= 4 * v.std_error


def test_asymptotic_limit_exact_paths():
    s = gr.asymptotic_limit([1, 2, 3, 4, 5], spec=geo.disk())
    assert np.allclose(s.scaled, math.pi, rtol=1e-14)
    s = gr.asymptotic_limit([1, 2, 3], spec=geo.polydisc([1, 1]))
    assert np.allclose(s.scaled, math.pi ** 2, rtol=1e-14)
    s = gr.asymptotic_limit([2, 3, 4, 6, 8], pole=0.3)
    assert s.extrapolated == pytest.approx(math.pi * 0.91 ** 2, rel=1e-6)
    assert abs(s.raw_limit - math.pi * 0.91 ** 2) < abs(s.scaled[0] - math.pi * 0.91 ** 2)
    assert any("e^{+2Na}" in n for n in s.notes)


def test_asymptotic_limit_monte_carlo_pole():
    s = gr.asymptotic_limit([2, 3, 4], pole=0.3, estimator="monte-carlo", n=1_000_000, seed=9)
    assert abs(s.extrapolated - math.pi * 0.91 ** 2) <= 3 * s.extrapolated_error


def test_asymptotic_limit_validation():
    with pytest.raises(gr.GreenError):
        gr.asymptotic_limit([1], spec=geo.disk())
    with pytest.raises(gr.GreenError):
        gr.asymptotic_limit([2, 1], spec=geo.disk())
    with pytest.raises(gr.GreenError):
        gr.asymptotic_limit([1, 2], spec=geo.ball(2), pole=0.1)


@pytest.mark.parametrize("a", [1, 2, 3])
def test_blocki_equality_at_balanced_origins(a):
    assert gr.blocki_lower_bound(geo.disk(), [0], a).value == pytest.approx(1 / math.pi, rel=1e-14)
    assert gr.blocki_lower_bound(geo.polydisc([1, 1]), [0, 0], a).value == pytest.approx(1 / math.pi ** 2, rel=1e-14)


@given(w=st.floats(-0.95, 0.95), a=st.floats(0.05, 6))
def test_blocki_soundness_on_disk(w, a):
    lb = gr.blocki_lower_bound(geo.disk(), [w], a)
    assert lb.value <= B.exact_kernel(geo.disk(), w).density * (1 + 1e-12)


def test_blocki_monte_carlo_soundness():
    spec = geo.nonconvex_example()
    lb = gr.blocki_lower_bound(spec, [0, 0], 2, "monte-carlo", 400_000, seed=3)
    K = B.reinhardt_kernel(spec, [0, 0], 0).density
    assert lb.value <= K + 3 * lb.std_error


def test_blocki_errors():
    with pytest.raises(gr.GreenError):
        gr.blocki_lower_bound(geo.disk(), [0], 0)
    with pytest.raises(gr.GreenError):
        gr.blocki_lower_bound(geo.ball(2), [0.1, 0], 1)
