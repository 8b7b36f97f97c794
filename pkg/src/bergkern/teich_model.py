"""The one-dimensional model: the unit disk with its Kobayashi metric.

Every object of the kernel/volume comparison is explicit here:
distance ``arctanh`` of the pseudo-hyperbolic distance, Finsler norm
``|v| / (1 - |z|^2)``, Green function ``log tanh d``, kernel
``1 / (pi (1 - |z|^2)^2)`` and Busemann density ``(1 - |z|^2)^-2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from . import bergman
from . import geometry as geo
from . import green as gr
from . import metrics
from .reports import CheckReport, ReportBuilder


class ModelError(ValueError):
    pass


def _interior(*zs) -> None:
    for z in zs:
        if not abs(complex(z)) < 1:
            raise ModelError(f"{z} is not in the open unit disk")


def teich_distance_many(z, w) -> np.ndarray:
    """Vectorized distance; ``nan`` outside the disk."""
    z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
    x = 2 * np.abs(z - w) ** 2 / ((1 - np.abs(z) ** 2) * (1 - np.abs(w) ** 2))
    x = np.where((np.abs(z) < 1) & (np.abs(w) < 1), x, np.nan)
    # cosh(2d) = 1 + x, written with log1p for accuracy near the diagonal
    return 0.5 * np.log1p(x + np.sqrt(x * (x + 2)))


def teich_distance(z, w) -> float:
    _interior(z, w)
    return float(teich_distance_many(complex(z), complex(w)))


def k0(z, w) -> float:
    """``tanh`` of the distance."""
    return math.tanh(teich_distance(z, w))


def finsler_norm(z, v) -> float:
    _interior(z)
    return abs(complex(v)) / (1 - abs(complex(z)) ** 2)


def mobius(a: complex, theta: float = 0.0):
    """Disk automorphism ``z -> e^{i theta} (z - a) / (1 - conj(a) z)``."""
    a = complex(a)
    _interior(a)
    rot = complex(math.cos(theta), math.sin(theta))
    return lambda z: rot * (z - a) / (1 - a.conjugate() * z)


def green_equals_log_k0_check(pairs: Iterable[tuple[complex, complex]], tol: float = 1e-12) -> CheckReport:
    """Green function of the disk against ``log tanh`` of the distance, pair by pair."""
    pairs = [(complex(z), complex(w)) for z, w in pairs]
    b = ReportBuilder("green_identity", "Green function equals log tanh of the invariant distance",
                      {"pairs": [[[z.real, z.imag], [w.real, w.imag]] for z, w in pairs]}, tol)
    for i, (z, w) in enumerate(pairs):
        if z == w:
            raise ModelError("points of a pair must differ")
        b.q(f"green_{i}", gr.green_disk(w, z))
        b.q(f"log_k0_{i}", math.log(k0(z, w)))
        b.close(f"diff_{i}", f"green_{i}", f"log_k0_{i}")
    return b.build()


@dataclass(frozen=True)
class PathSpec:
    """Holomorphic polynomial disk ``phi(t) = sum c_k t^k``; ``c_0`` is the base point."""
    coefficients: tuple[complex, ...]

    def __post_init__(self):
        if len(self.coefficients) < 2:
            raise ModelError("a path needs a base point and a velocity")
        _interior(self.coefficients[0])

    @property
    def base(self) -> complex:
        return complex(self.coefficients[0])

    @property
    def velocity(self) -> complex:
        return complex(self.coefficients[1])

    @property
    def is_radial_from_origin(self) -> bool:
        return self.base == 0 and all(c == 0 for c in self.coefficients[2:])

    def __call__(self, t):
        return P.polyval(t, np.array(self.coefficients, dtype=complex))


def expansion_check(path: PathSpec, t_list: Sequence[float], ratio_tol: float = 1e-3,
                    fit_slack: float = 0.1, tol: float = 1e-12) -> CheckReport:
    """First-order expansion ``k0(x, phi(t)) = t F_x(v) + O(t^2)``.

    Reports the least-squares coefficient ``c`` of ``e(t) ~ c t^2``.  Margins:
    ``e/t <= ratio_tol`` at the smallest t, ``e(t) <= (1 + fit_slack) c t^2``
    on the three smallest t, and ``e = 0`` for linear paths from the origin.
    """
    ts = [float(t) for t in t_list]
    if len(ts) < 3 or any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise ModelError("t_list must hold at least three strictly decreasing positive values")
    b = ReportBuilder("expansion", "Tanh of the distance along a holomorphic disk is first-order t F(v)",
                      {"coefficients": [[c.real, c.imag] for c in map(complex, path.coefficients)],
                       "t_list": ts, "ratio_tol": ratio_tol, "fit_slack": fit_slack}, tol)
    F = finsler_norm(path.base, path.velocity)
    errs = []
    for i, t in enumerate(ts):
        x = complex(path(t))
        if not abs(x) < 1:
            raise ModelError(f"path exits the disk at t={t}")
        e = abs(k0(path.base, x) - t * F)
        errs.append(e)
        b.q(f"e_{i}", e)
    t_arr, e_arr = np.array(ts), np.array(errs)
    c = float(np.sum(e_arr * t_arr ** 2) / np.sum(t_arr ** 4))
    b.q("fitted_c", c)
    last = len(ts) - 1
    b.q("ratio_tol_t", ratio_tol * ts[last])
    b.at_least("first_order", "ratio_tol_t", f"e_{last}", scale="ratio_tol_t")
    for i in range(len(ts) - 3, len(ts)):
        b.q(f"fit_bound_{i}", (1 + fit_slack) * c * ts[i] ** 2)
        b.margin(f"second_order_{i}", [(1, f"fit_bound_{i}"), (-1, f"e_{i}")])
    if path.is_radial_from_origin:
        for i in range(len(ts)):
            b.q(f"t_{i}", ts[i])
            b.margin(f"exact_{i}", [(-1, f"e_{i}")], scale=f"t_{i}")
    return b.build()


def theorem_comparison_check(points: Iterable[complex], tol: float = 1e-12) -> CheckReport:
    """Kernel between ``1/eps_2`` and ``3^2/eps_2`` times the Busemann density.

    The kernel comes from the Bergman closed form, the Busemann density from
    the indicatrix volume; in this model the lower bound is an equality.
    """
    points = [complex(z) for z in points]
    factor = 3 ** 2
    b = ReportBuilder("theorem_comparison", "Bergman kernel against the Busemann density in the disk model",
                      {"points": [[z.real, z.imag] for z in points], "upper_constant": factor}, tol)
    eps = metrics.unit_ball_volume(2)
    for i, z in enumerate(points):
        _interior(z)
        K = bergman.exact_kernel(geo.disk(), z).density
        mu = metrics.busemann_density(metrics.disk_model_indicatrix(z)).value
        b.q(f"K_{i}", K)
        b.q(f"lower_{i}", mu / eps)
        b.q(f"upper_{i}", factor * mu / eps)
        b.close(f"lower_equality_{i}", f"K_{i}", f"lower_{i}", scale=f"K_{i}")
        b.margin(f"upper_factor_{i}", [(1, f"upper_{i}"), (-factor, f"K_{i}")], scale=f"K_{i}", absolute=True)
        b.at_least(f"upper_{i}", f"upper_{i}", f"K_{i}", scale=f"K_{i}")
    return b.build()


@dataclass(frozen=True)
class GrowthResult:
    radii: tuple[float, ...]
    exact: tuple[float, ...]
    quadrature: tuple[float, ...]
    quad_errors: tuple[float, ...]
    rate: float


def kernel_ball_mass(R: float) -> tuple[float, float]:
    """``int_{B(0,R)} K dV`` by quadrature in geodesic polar coordinates."""
    if R < 0:
        raise ModelError("radius must be nonnegative")
    if R == 0:
        return 0.0, 0.0

    def integrand(s):
        r = math.tanh(s)
        return 2 * math.pi * bergman.exact_kernel(geo.disk(), r).density * r / math.cosh(s) ** 2

    val, err = integrate.quad(integrand, 0.0, R, epsabs=0.0, epsrel=1e-12, limit=200)
    return val, err


def ball_volume_growth(R_list: Sequence[float]) -> GrowthResult:
    """Kernel mass of invariant balls, ``sinh^2 R`` exactly, and the fitted exponential rate."""
    R = [float(r) for r in R_list]
    if any(b <= a for a, b in zip(R, R[1:])) or any(r < 0 for r in R):
        raise ModelError("radii must be nonnegative and increasing")
    exact = [math.sinh(r) ** 2 for r in R]
    quad = [kernel_ball_mass(r) for r in R]
    pos = [(r, q) for r, (q, _) in zip(R, quad) if q > 0]
    rate = float(np.polyfit([r for r, _ in pos], [math.log(q) for _, q in pos], 1)[0]) if len(pos) >= 2 else math.nan
    return GrowthResult(tuple(R), tuple(exact), tuple(q for q, _ in quad), tuple(e for _, e in quad), rate)
