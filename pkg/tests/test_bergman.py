import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import factorial

from bergkern import bergman as B
from bergkern import geometry as geo

K_DISK_HALF = 1 / (math.pi * 0.75 ** 2)  # 0.565884...


def disk_series(z, terms=4000):
    k = np.arange(terms)
    return float(np.sum((k + 1) / math.pi * abs(z) ** (2 * k)))


def ball_series(z, degree=120):
    """Sum of |z^a|^2 / ||z^a||^2 with ||z^a||^2 = pi^N a! / (N + |a|)! on the unit ball."""
    z = np.abs(np.asarray(z))
    N = z.size
    total = 0.0
    for a in B.multi_indices(N, degree):
        norm2 = math.pi ** N * np.prod(factorial(a)) / math.factorial(N + int(a.sum()))
        total += float(np.prod(z ** (2 * a))) / norm2
    return total


def test_closed_form_values():
    assert B.exact_kernel(geo.disk(), 0).density == pytest.approx(0.3183099, abs=5e-8)
    assert B.exact_kernel(geo.polydisc([1, 1]), [0, 0]).density == pytest.approx(0.1013212, abs=5e-8)
    assert B.exact_kernel(geo.HalfPlane(), 1j).density == pytest.approx(1 / (4 * math.pi), rel=1e-15)
    assert B.exact_kernel(geo.disk(), 0.5).density == pytest.approx(K_DISK_HALF, rel=1e-15)


@pytest.mark.parametrize("z", [0.0, 0.5, 0.3 + 0.4j, -0.9])
def test_disk_closed_form_matches_series(z):
    assert B.exact_kernel(geo.disk(), z).density == pytest.approx(disk_series(z), rel=1e-12)


@pytest.mark.parametrize("z", [[0.3, 0.0], [0.2, 0.1j], [0.0, 0.5]])
def test_ball_closed_form_matches_series(z):
    assert B.exact_kernel(geo.ball(2), z).density == pytest.approx(ball_series(z), rel=1e-10)


def test_ball_example_value():
    assert B.exact_kernel(geo.ball(2), [0.3, 0]).density == pytest.approx(2 / math.pi ** 2 / 0.91 ** 3, rel=1e-14)


def test_reinhardt_disk_example():
    kv = B.reinhardt_kernel(geo.disk(), 0.5, 12)
    assert kv.method == "reinhardt-series" and kv.degree == 12
    assert abs(kv.density - K_DISK_HALF) < 1e-4


@pytest.mark.parametrize("spec", [geo.disk(), geo.ball(2), geo.polydisc([1, 1])])
def test_reinhardt_oracle_random_points(spec):
    rng = np.random.default_rng(42)
    for _ in range(20):
        u = rng.standard_normal(2 * spec.dim)
        z = (u[:spec.dim] + 1j * u[spec.dim:]) / np.linalg.norm(u) * rng.random() ** (1 / (2 * spec.dim))
        z = 0.9 * z / max(geo.gauge_eval(spec, z), 1.0)
        kv = B.reinhardt_kernel(spec, z, 12)
        exact = B.exact_kernel(spec, z).density
        assert abs(kv.density - exact) <= max(1e-4, kv.err_est)


def test_reinhardt_nonconvex_origin_is_inverse_volume():
    spec = geo.nonconvex_example()
    kv = B.reinhardt_kernel(spec, [0, 0], 0)
    assert kv.density == pytest.approx(1 / geo.nonconvex_example_volume(), rel=1e-10)


@given(r=st.floats(0, 0.95))
def test_series_increases_with_degree(r):
    vals = [B.reinhardt_kernel(geo.nonconvex_example(), [r / 2, r / 3], d).density for d in (0, 2, 4, 8)]
    assert all(b >= a * (1 - 1e-12) for a, b in zip(vals, vals[1:]))


@given(lam=st.floats(0.2, 5), x=st.floats(-0.6, 0.6), y=st.floats(-0.6, 0.6))
def test_scaling_law_named_models(lam, x, y):
    for spec, z in [(geo.disk(), np.array([x + 0.3j * y])), (geo.ball(2), np.array([x, 1j * y])),
                    (geo.polydisc([1, 2]), np.array([x, y]))]:
        lhs = B.exact_kernel(geo.dilate(spec, lam), lam * z).density
        rhs = lam ** (-2 * spec.dim) * B.exact_kernel(spec, z).density
        assert lhs == pytest.approx(rhs, rel=1e-12)


@given(x=st.floats(-0.6, 0.6), y=st.floats(-0.6, 0.6))
def test_positivity(x, y):
    for spec in (geo.disk(), geo.ball(2), geo.polydisc([1, 1]), geo.nonconvex_example()):
        z = np.array([x, y])[: spec.dim] * 0.5
        assert B.kernel_density(spec, z).density > 0


def test_gram_disk_origin():
    kv = B.gram_kernel(geo.disk(), 0, 6, B.QuadSpec("mc", 1_000_000, 0))
    assert kv.method == "gram" and kv.std_error > 0
    assert kv.density == pytest.approx(1 / math.pi, rel=0.02)


def test_gram_ball_point():
    kv = B.gram_kernel(geo.ball(2), [0.3, 0], 8, B.QuadSpec("mc", 1_000_000, 1))
    assert kv.density == pytest.approx(2 / math.pi ** 2 / 0.91 ** 3, rel=0.02)


@pytest.mark.parametrize("spec,z", [(geo.polydisc([1, 1]), [0.2, 0.1]), (geo.ball(2), [0.3, 0.2j]),
                                    (geo.disk(), [0.2]), (geo.ball(3), [0.3, 0.2j, 0.1])])
def test_gram_tensor_matches_closed_form(spec, z):
    exact = B.exact_kernel(spec, z).density
    kv = B.gram_kernel(spec, z, 6, B.QuadSpec("tensor"))
    assert kv.density == pytest.approx(exact, rel=1e-3)
    assert abs(kv.density - exact) <= kv.err_est
    coarse = B.gram_kernel(spec, z, 6, B.QuadSpec("tensor", order=24))
    assert abs(coarse.density - exact) <= coarse.err_est


def test_gram_nonconvex_origin():
    kv = B.gram_kernel(geo.nonconvex_example(), [0, 0], 6, B.QuadSpec("mc", 1_000_000, 2))
    assert kv.density == pytest.approx(1 / geo.nonconvex_example_volume(), rel=0.02)


def test_gram_deterministic():
    q = B.QuadSpec("mc", 200_000, 5)
    B.build_gram_factor.cache_clear()
    a = B.gram_kernel(geo.ball(2), [0.1, 0.2], 4, q)
    B.build_gram_factor.cache_clear()
    assert B.gram_kernel(geo.ball(2), [0.1, 0.2], 4, q) == a


def test_gram_degree_reduction_error():
    with pytest.raises(B.GramDegreeError) as info:
        B.gram_kernel(geo.ball(2), [0, 0], 14, B.QuadSpec("mc", 60, 0))
    assert info.value.requested == 14 and 0 <= info.value.usable < 14


def test_kernel_value_invariants():
    with pytest.raises(B.KernelError):
        B.KernelValue(-1.0, "exact", 0, 0.0)
    with pytest.raises(B.KernelError):
        B.KernelValue(1.0, "exact", 0, 0.1)
    with pytest.raises(B.KernelError):
        B.KernelValue(1.0, "gram", 0, 0.0)
    with pytest.raises(B.KernelError):
        B.exact_kernel(geo.nonconvex_example(), [0, 0])
    with pytest.raises(B.KernelError):
        B.exact_kernel(geo.disk(), 1.0)


@pytest.mark.parametrize("name,z,param", [("disk-automorphism", 0, 0.5), ("cayley", 0, None),
                                          ("affine", 0.3 + 0.2j, 2), ("identity", 0.4, None),
                                          ("disk-automorphism", 0.1 - 0.7j, 0.2 + 0.6j), ("cayley", 0.9j, None)])
def test_transformation_law(name, z, param):
    rep = B.transformation_check(name, z, param=param)
    assert rep.passed and rep.worst_margin >= -1e-12


def test_transformation_unknown_map():
    with pytest.raises(B.KernelError):
        B.transformation_check("shear", 0)


def test_monotonicity_examples():
    rep = B.monotonicity_check(geo.dilate(geo.disk(), 0.5), geo.disk(), 0)
    assert rep.passed
    assert rep.quantity("K_inner") == pytest.approx(4 / math.pi) and rep.quantity("K_outer") == pytest.approx(1 / math.pi)
    rep = B.monotonicity_check(geo.polydisc([1, 1]), geo.dilate(geo.polydisc([1, 1]), 2), [0, 0])
    assert rep.quantity("K_outer") == pytest.approx(1 / (16 * math.pi ** 2))
    assert B.monotonicity_check(geo.nonconvex_example(), geo.polydisc([1, 1]), [0.1, 0.2]).passed
    with pytest.raises(B.KernelError):
        B.monotonicity_check(geo.disk(), geo.disk(0.5), 0)
