"""Invariant Finsler metrics, indicatrices, Busemann densities and a covering estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import gauge as G
from . import geometry as geo
from . import green as gr
from . import sampling
from .geometry import unit_ball_volume
from .reports import CheckReport, ReportBuilder

__all__ = [
    "unit_ball_volume", "FinslerIndicatrix", "BusemannDensity", "kobayashi_origin",
    "origin_indicatrix", "disk_model_indicatrix", "azukawa", "indicatrix_volume",
    "busemann_density", "indicatrix_sandwich_check", "Rect", "Circle", "hausdorff_cover",
    "hausdorff_estimate",
]


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class FinslerIndicatrix:
    """Unit ball ``{v : F_x(v) <= 1}`` of a metric at ``base``, with ``F_x`` a gauge."""
    base: geo.CPoint
    norm: G.Gauge
    dim: int

    def __post_init__(self):
        G.validate(self.norm, self.dim)
        if self.base.dim != self.dim:
            raise geo.DimensionError("base point and tangent space dimensions differ")

    def domain(self) -> geo.DomainSpec:
        return geo.canonicalize(geo.Balanced(self.norm, self.dim))

    def __call__(self, v) -> float:
        return float(G.evaluate(self.norm, geo.as_point(v, self.dim)))


@dataclass(frozen=True)
class BusemannDensity:
    value: float
    epsilon: float
    indicatrix_volume: geo.VolumeEstimate

    @property
    def std_error(self) -> float:
        v = self.indicatrix_volume
        return self.value * v.std_error / v.value


def kobayashi_origin(spec, v, base=None) -> float:
    """Kobayashi norm of ``v`` at the origin of a balanced pseudoconvex domain: ``m(v)``."""
    if base is not None and np.any(geo.as_point(base, spec.dim) != 0):
        raise MetricError("closed form only at the origin of a balanced domain")
    return geo.gauge_eval(spec, v)


def origin_indicatrix(spec) -> FinslerIndicatrix:
    return FinslerIndicatrix(geo.CPoint((0j,) * spec.dim), geo.canonical_gauge(spec), spec.dim)


def disk_model_indicatrix(z) -> FinslerIndicatrix:
    """Indicatrix of ``|v| / (1 - |z|^2)`` on the unit disk: the disk of radius ``1 - |z|^2``."""
    z = complex(z)
    if abs(z) >= 1:
        raise MetricError("base point must lie in the open unit disk")
    return FinslerIndicatrix(geo.CPoint((z,)), G.Abs(0, 1.0 - abs(z) ** 2), 1)


@dataclass(frozen=True)
class AzukawaValue:
    value: float
    spread: float
    ts: tuple[float, ...]
    ratios: tuple[float, ...]

    def __float__(self) -> float:
        return self.value


DEFAULT_TS = tuple(10.0 ** -k for k in range(3, 9))


def azukawa(green: Callable[[np.ndarray, np.ndarray], float], p, v,
            t_sequence: Sequence[float] = DEFAULT_TS, keep: int = 3) -> AzukawaValue:
    """Numerical limsup of ``exp(g(p, p + t v)) / t`` over the ``keep`` smallest ``t``.

    ``spread`` is the max-min range over those samples; a large spread flags
    that the limit has not settled.
    """
    ts = sorted(float(t) for t in t_sequence)
    if not ts or ts[0] <= 0:
        raise MetricError("t values must be positive")
    ts = ts[:keep]
    p = geo.as_point(p)
    v = geo.as_point(v, p.shape[0])
    ratios = []
    for t in ts:
        try:
            g = green(p, p + t * v)
        except (gr.GreenError, geo.DomainError) as exc:
            raise MetricError(f"path leaves the domain at t={t}: {exc}") from None
        ratios.append(math.exp(g) / t)
    return AzukawaValue(max(ratios), max(ratios) - min(ratios), tuple(ts), tuple(ratios))


def balanced_green(spec) -> Callable:
    """Green oracle with pole at the origin of a balanced domain."""
    def g(p, z):
        if np.any(p != 0):
            raise MetricError("balanced Green oracle only has its pole at the origin")
        return gr.green_balanced(spec, z)
    return g


def disk_green(p, z) -> float:
    return gr.green_disk(complex(p[0]), complex(z[0]))


def indicatrix_volume(ind: FinslerIndicatrix, estimator: str = "auto", n: int = 200_000,
                      seed: int = 0) -> geo.VolumeEstimate:
    return geo.volume(ind.domain(), estimator, n, seed)


def busemann_density(ind: FinslerIndicatrix, estimator: str = "auto", n: int = 200_000,
                     seed: int = 0, volume: geo.VolumeEstimate | None = None) -> BusemannDensity:
    """Coefficient of the Busemann volume form: ``eps_2N / V(indicatrix)``."""
    vol = indicatrix_volume(ind, estimator, n, seed) if volume is None else volume
    if not vol.value > 0:
        raise MetricError("indicatrix volume vanished")
    eps = unit_ball_volume(2 * ind.dim)
    return BusemannDensity(eps / vol.value, eps, vol)


def indicatrix_sandwich_check(spec, n_directions: int = 10_000, seed: int = 0,
                              tol: float = 1e-9) -> CheckReport:
    """Check ``r B <= {F_0 <= 1} <= R B`` on fresh unit directions."""
    r, R = geo.sandwich_radii(spec, 4096, seed)
    b = ReportBuilder("sandwich", "Indicatrix at the origin lies between two Euclidean balls",
                      {"domain": geo.spec_to_dict(spec), "n_directions": n_directions}, tol, seed)
    b.q("r", r)
    b.q("R", R)
    rng = sampling.chunk_rng(seed, sampling.STREAM_PROBE, 0)
    u = sampling.uniform_sphere(rng, n_directions, 2 * spec.dim)
    u = u[:, :spec.dim] + 1j * u[:, spec.dim:]
    m = geo.gauge_eval_many(spec, u)
    b.q("max_gauge", float(m.max()))
    b.q("inv_min_gauge", float(1.0 / m.min()))
    b.q("one", 1.0)
    # r u is inside: r * max m <= 1 ; boundary points u/m(u) have norm 1/m(u) <= R
    b.q("r_times_max_gauge", r * float(m.max()))
    b.at_least("inner_ball", "one", "r_times_max_gauge")
    b.at_least("outer_ball", "R", "inv_min_gauge", scale="R")
    return b.build()


# ---------------------------------------------------------------- covering estimator


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    def bbox(self):
        return self.x0, self.x1, self.y0, self.y1

    def contains(self, z: np.ndarray) -> np.ndarray:
        return (z.real >= self.x0) & (z.real <= self.x1) & (z.imag >= self.y0) & (z.imag <= self.y1)

    def meets(self, c: np.ndarray, h: float) -> np.ndarray:
        return ((c.real + h / 2 >= self.x0) & (c.real - h / 2 <= self.x1)
                & (c.imag + h / 2 >= self.y0) & (c.imag - h / 2 <= self.y1))


@dataclass(frozen=True)
class Circle:
    """Closed disk ``|z - center| <= radius``."""
    radius: float
    center: complex = 0j

    def bbox(self):
        c, r = self.center, self.radius
        return c.real - r, c.real + r, c.imag - r, c.imag + r

    def contains(self, z: np.ndarray) -> np.ndarray:
        return np.abs(z - self.center) <= self.radius

    def meets(self, c: np.ndarray, h: float) -> np.ndarray:
        d = c - self.center
        dx = np.maximum(np.abs(d.real) - h / 2, 0.0)
        dy = np.maximum(np.abs(d.imag) - h / 2, 0.0)
        return np.hypot(dx, dy) <= self.radius


def parse_region(text: str):
    kind, _, rest = text.partition(":")
    vals = [float(x) for x in rest.split(",")] if rest else []
    if kind == "rect" and len(vals) == 4:
        return Rect(*vals)
    if kind == "disk" and len(vals) in (1, 3):
        return Circle(vals[0], complex(vals[1], vals[2]) if len(vals) == 3 else 0j)
    raise MetricError(f"cannot parse region {text!r}; use rect:x0,x1,y0,y1 or disk:r[,cx,cy]")


@dataclass(frozen=True)
class CoverEstimate:
    value: float
    n_cells: int
    max_level: int
    delta: float


class CoverTooCoarse(MetricError):
    pass


def hausdorff_cover(distance: Callable, region, delta: float, min_cells: int = 100,
                    initial: int = 32, max_level: int = 24, max_cells: int = 5_000_000) -> CoverEstimate:
    """Two-dimensional Hausdorff measure by an adaptive cover with chart squares.

    Squares are split until both diagonals have metric length at most
    ``delta``.  Each accepted square whose center lies in the region adds
    ``(d1^2 + d2^2) / 4``, which equals its area when the metric is
    Euclidean.  The calibration is exact for metrics that are locally a
    multiple of the Euclidean one.
    """
    if not delta > 0:
        raise MetricError("delta must be positive")
    x0, x1, y0, y1 = region.bbox()
    side = max(x1 - x0, y1 - y0)
    h = side / initial
    ii, jj = np.meshgrid(np.arange(initial), np.arange(initial), indexing="ij")
    centers = (x0 + (ii.ravel() + 0.5) * h) + 1j * (y0 + (jj.ravel() + 0.5) * h)
    total, n_cells, level = 0.0, 0, 0
    diag1, diag2 = 0.5 * (1 + 1j), 0.5 * (1 - 1j)
    while centers.size:
        if level > max_level or centers.size > max_cells:
            raise MetricError("cover refinement did not terminate; is the region inside the model?")
        centers = centers[region.meets(centers, h)]
        with np.errstate(invalid="ignore", divide="ignore"):
            d1 = np.asarray(distance(centers - h * diag1, centers + h * diag1), dtype=float)
            d2 = np.asarray(distance(centers - h * diag2, centers + h * diag2), dtype=float)
        ok = np.isfinite(d1) & np.isfinite(d2) & (np.maximum(d1, d2) <= delta)
        keep = ok & region.contains(centers)
        total += math.fsum(((d1[keep] ** 2 + d2[keep] ** 2) / 4).tolist())
        n_cells += int(keep.sum())
        rest = centers[~ok]
        h /= 2
        q = h / 2
        centers = np.concatenate([rest + q * (sx + 1j * sy) for sx in (-1, 1) for sy in (-1, 1)])
        level += 1
    if n_cells < min_cells:
        raise CoverTooCoarse(f"delta={delta} gives only {n_cells} cover elements (< {min_cells}); "
                             "decrease delta")
    return CoverEstimate(total, n_cells, level, delta)


def hausdorff_estimate(distance: Callable, region, delta: float, **kw) -> float:
    return hausdorff_cover(distance, region, delta, **kw).value


def euclidean_distance(z, w):
    return np.abs(np.asarray(z) - np.asarray(w))


def scaled_distance(factor: float) -> Callable:
    return lambda z, w: factor * euclidean_distance(z, w)
