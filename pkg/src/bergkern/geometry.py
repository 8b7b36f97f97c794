"""Bounded domains in C^N: named models, gauge-described balanced domains and products.

Volumes are Euclidean 2N-volumes.  Three estimators are available: closed
forms for the named models, an angular quadrature that exploits the
Reinhardt symmetry of every gauge domain, and bounding-box Monte Carlo.
"""

from __future__ import annotations

import functools
import json
import math
import os
from dataclasses import dataclass
from typing import Any, NamedTuple, Sequence, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, optimize
from scipy.special import gammaln

from . import gauge as G
from . import sampling


class DomainError(ValueError):
    pass


class DimensionError(DomainError):
    pass


class VolumeError(DomainError):
    pass


class InvalidGaugeError(G.GaugeError):
    pass


# ---------------------------------------------------------------- points


@dataclass(frozen=True)
class CPoint:
    coords: tuple[complex, ...]

    def __post_init__(self):
        if not self.coords:
            raise DimensionError("a point needs at least one coordinate")
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in self.coords):
            raise DomainError("point coordinates must be finite")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def to_list(self) -> list[list[float]]:
        return [[c.real, c.imag] for c in self.coords]

    @classmethod
    def from_list(cls, data) -> "CPoint":
        return cls(tuple(complex(float(re), float(im)) for re, im in data))


def as_point(z, dim: int | None = None) -> np.ndarray:
    """Coerce a scalar, sequence or :class:`CPoint` to a 1-D complex array."""
    if isinstance(z, CPoint):
        arr = np.array(z.coords, dtype=complex)
    else:
        arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if arr.ndim != 1:
        raise DimensionError("a point must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise DomainError("point coordinates must be finite")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"point has {arr.shape[0]} coordinates, domain has dimension {dim}")
    return arr


# ---------------------------------------------------------------- domains


@dataclass(frozen=True)
class Disk:
    radius: float = 1.0

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Ball:
    n: int
    radius: float = 1.0

    @property
    def dim(self) -> int:
        return self.n


@dataclass(frozen=True)
class Polydisc:
    radii: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.radii)


@dataclass(frozen=True)
class HalfPlane:
    """Upper half-plane ``Im z > 0``; unbounded, exact-kernel use only."""

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Balanced:
    gauge: G.Gauge
    n: int

    def __post_init__(self):
        G.validate(self.gauge, self.n)

    @property
    def dim(self) -> int:
        return self.n


@dataclass(frozen=True)
class Product:
    first: "DomainSpec"
    second: "DomainSpec"

    @property
    def dim(self) -> int:
        return self.first.dim + self.second.dim


DomainSpec = Union[Disk, Ball, Polydisc, HalfPlane, Balanced, Product]


def _check_positive(x: float, what: str) -> float:
    x = float(x)
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"{what} must be positive and finite")
    return x


def disk(radius: float = 1.0) -> Disk:
    return Disk(_check_positive(radius, "radius"))


def ball(n: int, radius: float = 1.0) -> Ball:
    if n < 1:
        raise DimensionError("dimension must be positive")
    return Ball(int(n), _check_positive(radius, "radius"))


def polydisc(radii: Sequence[float]) -> Polydisc:
    if len(radii) < 1:
        raise DimensionError("polydisc needs at least one radius")
    return Polydisc(tuple(_check_positive(r, "radius") for r in radii))


def nonconvex_example() -> Balanced:
    """``max(|z1|, |z2|, 2 sqrt|z1 z2|) < 1``: balanced, pseudoconvex, not convex."""
    g = G.Max((G.Abs(0), G.Abs(1), G.Scale(2.0, G.GeoMean((0.5, 0.5), (G.Abs(0), G.Abs(1))))))
    return Balanced(g, 2)


def nonconvex_example_volume() -> float:
    # (2 pi)^2 * int s1 s2 over {s1<1, s2<1, s1 s2<1/4} = pi^2 (1/16 + log(4)/8)
    return math.pi ** 2 * (1.0 / 16.0 + math.log(4.0) / 8.0)


def is_bounded(spec: DomainSpec) -> bool:
    if isinstance(spec, HalfPlane):
        return False
    if isinstance(spec, Product):
        return is_bounded(spec.first) and is_bounded(spec.second)
    return True


def _shift(g: G.Gauge, k: int) -> G.Gauge:
    if isinstance(g, G.Abs):
        return G.Abs(g.index + k, g.radius)
    if isinstance(g, G.Scale):
        return G.Scale(g.factor, _shift(g.arg, k))
    if isinstance(g, G.PNorm):
        return G.PNorm(g.p, g.weights, tuple(_shift(a, k) for a in g.args))
    if isinstance(g, G.Max):
        return G.Max(tuple(_shift(a, k) for a in g.args))
    return G.GeoMean(g.exponents, tuple(_shift(a, k) for a in g.args))


def has_gauge(spec: DomainSpec) -> bool:
    if isinstance(spec, HalfPlane):
        return False
    if isinstance(spec, Product):
        return has_gauge(spec.first) and has_gauge(spec.second)
    return True


def canonical_gauge(spec: DomainSpec) -> G.Gauge:
    """The Minkowski gauge of a balanced spec (named models included)."""
    if isinstance(spec, Disk):
        return G.disk_gauge(spec.radius)
    if isinstance(spec, Ball):
        return G.ball_gauge(spec.n, spec.radius)
    if isinstance(spec, Polydisc):
        return G.polydisc_gauge(spec.radii)
    if isinstance(spec, Balanced):
        return spec.gauge
    if isinstance(spec, Product):
        return G.Max((canonical_gauge(spec.first), _shift(canonical_gauge(spec.second), spec.first.dim)))
    raise DomainError(f"{kind_of(spec)} has no canonical gauge")


def canonicalize(spec: DomainSpec) -> DomainSpec:
    """Recognize gauge specs that are really a disk, ball or polydisc."""
    if not isinstance(spec, Balanced):
        return spec
    named = _named_from_gauge(spec.gauge, spec.n)
    return named if named is not None else spec


def _named_from_gauge(g: G.Gauge, n: int) -> DomainSpec | None:
    if isinstance(g, G.Scale):
        inner = _named_from_gauge(g.arg, n)
        return None if inner is None else dilate(inner, 1.0 / g.factor)
    if isinstance(g, G.Abs) and n == 1 and g.index == 0:
        return Disk(g.radius)
    leaves = getattr(g, "args", ())
    if not all(isinstance(a, G.Abs) for a in leaves) or sorted(a.index for a in leaves) != list(range(n)):
        return None
    if isinstance(g, G.Max):
        radii = [0.0] * n
        for a in leaves:
            radii[a.index] = a.radius
        return Polydisc(tuple(radii))
    if isinstance(g, G.PNorm) and g.p == 2.0:
        eff = {a.radius / math.sqrt(w) for w, a in zip(g.weights, leaves)}
        if len(eff) == 1:
            return Ball(n, eff.pop())
    return None


def kind_of(spec: DomainSpec) -> str:
    return {Disk: "disk", Ball: "ball", Polydisc: "polydisc", HalfPlane: "halfplane",
            Balanced: "balanced", Product: "product"}[type(spec)]


# ---------------------------------------------------------------- evaluation


def gauge_eval(spec: DomainSpec, z) -> float:
    """Minkowski gauge ``m(z)``; ``z`` lies in the domain iff ``m(z) < 1``."""
    if isinstance(spec, HalfPlane):
        raise DomainError("the half-plane is not balanced and has no gauge")
    pt = as_point(z, spec.dim)
    return float(G.evaluate(canonical_gauge(spec), pt))


def gauge_eval_many(spec: DomainSpec, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != spec.dim:
        raise DimensionError(f"points have {z.shape[-1]} coordinates, domain has dimension {spec.dim}")
    return G.evaluate(canonical_gauge(spec), z)


def contains_many(spec: DomainSpec, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != spec.dim:
        raise DimensionError(f"points have {z.shape[-1]} coordinates, domain has dimension {spec.dim}")
    if isinstance(spec, HalfPlane):
        return z[..., 0].imag > 0
    if isinstance(spec, Product):
        k = spec.first.dim
        return contains_many(spec.first, z[..., :k]) & contains_many(spec.second, z[..., k:])
    return G.evaluate(canonical_gauge(spec), z) < 1.0


def contains(spec: DomainSpec, z) -> bool:
    """Open-domain membership: boundary points are outside."""
    return bool(contains_many(spec, as_point(z, spec.dim)[None, :])[0])


def dilate(spec: DomainSpec, lam: float) -> DomainSpec:
    """The domain ``lam * spec``; gauge becomes ``m / lam``."""
    lam = float(lam)
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError("dilation factor must be positive")
    if lam == 1.0:
        return spec
    if isinstance(spec, Disk):
        return Disk(spec.radius * lam)
    if isinstance(spec, Ball):
        return Ball(spec.n, spec.radius * lam)
    if isinstance(spec, Polydisc):
        return Polydisc(tuple(r * lam for r in spec.radii))
    if isinstance(spec, Balanced):
        return Balanced(G.scaled(spec.gauge, 1.0 / lam), spec.n)
    if isinstance(spec, Product):
        return Product(dilate(spec.first, lam), dilate(spec.second, lam))
    raise DomainError("the half-plane cannot be dilated about a center")


# ---------------------------------------------------------------- radii


class SandwichRadii(NamedTuple):
    r: float
    R: float


def _positive_orthant_directions(n: int, seed: int, dim: int) -> np.ndarray:
    rng = sampling.chunk_rng(seed, sampling.STREAM_DIRECTIONS, 0)
    u = sampling.uniform_sphere(rng, n, 2 * dim)
    return np.hypot(u[:, :dim], u[:, dim:])


def _diagonal_directions(dim: int) -> np.ndarray:
    rows = []
    for mask in range(1, 2 ** dim):
        idx = [j for j in range(dim) if mask >> j & 1]
        row = np.zeros(dim)
        row[idx] = 1.0 / math.sqrt(len(idx))
        rows.append(row)
    return np.array(rows)


@functools.lru_cache(maxsize=256)
def sandwich_radii(spec: DomainSpec, n_directions: int = 4096, seed: int = 0) -> SandwichRadii:
    """Radii with ``r B`` inside and ``R B`` around the domain.

    Named models and products of them are exact.  For gauge domains the
    gauge is sampled on ``n_directions`` uniform unit directions plus the
    coordinate diagonals, then the extremes are polished by a local search.
    """
    if n_directions < 1:
        raise DomainError("need at least one direction")
    if isinstance(spec, Disk):
        return SandwichRadii(spec.radius, spec.radius)
    if isinstance(spec, Ball):
        return SandwichRadii(spec.radius, spec.radius)
    if isinstance(spec, Polydisc):
        return SandwichRadii(min(spec.radii), math.sqrt(sum(r * r for r in spec.radii)))
    if isinstance(spec, Product):
        a = sandwich_radii(spec.first, n_directions, seed)
        b = sandwich_radii(spec.second, n_directions, seed)
        return SandwichRadii(min(a.r, b.r), math.hypot(a.R, b.R))
    if isinstance(spec, HalfPlane):
        raise DomainError("the half-plane is unbounded")

    g, n = spec.gauge, spec.n
    dirs = np.vstack([_diagonal_directions(n), _positive_orthant_directions(n_directions, seed, n)])
    m = G.evaluate_moduli(g, dirs)
    if not np.all(np.isfinite(m)) or np.any(m <= 0):
        raise InvalidGaugeError("gauge is nonpositive or non-finite on a unit direction")
    lo, hi = float(m.min()), float(m.max())
    if n > 1:
        def on_sphere(x):
            x = np.abs(x)
            return x / np.linalg.norm(x)

        for sign, start in ((1.0, dirs[np.argmin(m)]), (-1.0, dirs[np.argmax(m)])):
            res = optimize.minimize(lambda x: sign * float(G.evaluate_moduli(g, on_sphere(x))),
                                    start, method="Nelder-Mead",
                                    options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
            val = float(G.evaluate_moduli(g, on_sphere(res.x)))
            lo, hi = (min(lo, val), hi) if sign > 0 else (lo, max(hi, val))
    return SandwichRadii(1.0 / hi, 1.0 / lo)


def outer_radius(spec: DomainSpec) -> float:
    if not is_bounded(spec):
        raise VolumeError("domain is unbounded")
    return sandwich_radii(spec).R


# ---------------------------------------------------------------- quadrature


def _composite_gl(panels: int, order: int = 8) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    edges = np.linspace(0.0, math.pi / 2, panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    weights = (0.5 * (b - a) * w).ravel()
    return nodes, weights


def _hyperspherical_grid(dim: int, panels: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = _composite_gl(panels)
    mesh = np.meshgrid(*([nodes] * (dim - 1)), indexing="ij")
    wmesh = np.meshgrid(*([weights] * (dim - 1)), indexing="ij")
    phis = [m.ravel() for m in mesh]
    w = np.prod([m.ravel() for m in wmesh], axis=0)
    omega = np.empty((phis[0].size, dim))
    sin_prod = np.ones_like(phis[0])
    for i, phi in enumerate(phis):
        omega[:, i] = sin_prod * np.cos(phi)
        w = w * np.sin(phi) ** (dim - 2 - i)
        sin_prod = sin_prod * np.sin(phi)
    omega[:, -1] = sin_prod
    return omega, w


def _moment_integrand(g: G.Gauge, omega: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    # prod omega_j^(2 a_j + 1) * m(omega)^-(2N + 2|a|), one row per alpha
    dim = omega.shape[-1]
    with np.errstate(divide="ignore"):
        log_om = np.log(omega)
    log_m = np.log(G.evaluate_moduli(g, omega))
    powers = 2 * alphas + 1
    expo = log_om @ powers.T - log_m[:, None] * (2 * dim + 2 * alphas.sum(axis=1))[None, :]
    return np.exp(expo).T


def reinhardt_moments(g: G.Gauge, dim: int, alphas, panels: int | None = None):
    """``c_alpha = int_Omega |z^alpha|^2 dV`` for the gauge domain ``{g < 1}``.

    Reduces to an integral over the positive orthant of S^(dim-1):
    ``c_alpha = (2pi)^N / (2N + 2|alpha|) * int prod w_j^(2a_j+1) g(w)^-(2N+2|alpha|) dw``.
    Returns ``(values, abs_errors)``.
    """
    alphas = np.atleast_2d(np.asarray(alphas, dtype=int))
    if alphas.shape[1] != dim:
        raise DimensionError("multi-index length must equal the dimension")
    total = alphas.sum(axis=1)
    pref = (2 * math.pi) ** dim / (2 * dim + 2 * total)
    if dim == 1:
        m1 = float(G.evaluate_moduli(g, np.ones((1, 1)))[0])
        vals = pref * m1 ** (-(2 + 2 * total.astype(float)))
        return vals, np.zeros_like(vals)
    if dim == 2:
        # crude fixed-grid pass, then an adaptive pass on the normalized integrands
        nodes, weights = _composite_gl(panels or 64)
        om = np.stack([np.cos(nodes), np.sin(nodes)], axis=1)
        crude = _moment_integrand(g, om, alphas) @ weights
        crude = np.where(crude > 0, crude, 1.0)

        def f(phi):
            return _moment_integrand(g, np.array([[math.cos(phi), math.sin(phi)]]), alphas)[:, 0] / crude

        res, err = integrate.quad_vec(f, 0.0, math.pi / 2, epsabs=1e-14, epsrel=1e-12, norm="max", limit=2000)
        return pref * res * crude, pref * np.maximum(err, 1e-15 * np.abs(res)) * crude
    panels = panels or max(4, int(round(96 / (dim - 1))))
    fine = coarse = None
    for p in (panels, panels // 2):
        om, w = _hyperspherical_grid(dim, p)
        val = np.array([_moment_integrand(g, om, a[None, :])[0] @ w for a in alphas])
        if fine is None:
            fine = val
        else:
            coarse = val
    err = np.maximum(np.abs(fine - coarse), 1e-15 * np.abs(fine))
    return pref * fine, pref * err


# ---------------------------------------------------------------- volume

ESTIMATORS = ("exact", "sphere-quadrature", "monte-carlo")


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    std_error: float
    n_samples: int
    method: str
    seed: int

    def __post_init__(self):
        if self.method not in ESTIMATORS:
            raise VolumeError(f"unknown estimator {self.method!r}")
        if self.value < 0 or self.std_error < 0:
            raise VolumeError("volume and its error must be nonnegative")
        if (self.std_error == 0) != (self.method == "exact"):
            raise VolumeError("std_error vanishes exactly for closed-form volumes")

    def scaled(self, factor: float) -> "VolumeEstimate":
        return VolumeEstimate(self.value * factor, self.std_error * factor,
                              self.n_samples, self.method, self.seed)


def unit_ball_volume(n: int) -> float:
    """Volume of the Euclidean unit ball of R^n."""
    if n < 1:
        raise ValueError("dimension must be positive")
    return math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1.0))


def exact_volume(spec: DomainSpec) -> float | None:
    spec = canonicalize(spec)
    if isinstance(spec, Disk):
        return math.pi * spec.radius ** 2
    if isinstance(spec, Ball):
        return unit_ball_volume(2 * spec.n) * spec.radius ** (2 * spec.n)
    if isinstance(spec, Polydisc):
        return math.prod(math.pi * r * r for r in spec.radii)
    if isinstance(spec, Product):
        a, b = exact_volume(spec.first), exact_volume(spec.second)
        return None if a is None or b is None else a * b
    return None


def _mc_volume(spec: DomainSpec, n: int, seed: int) -> VolumeEstimate:
    dim = spec.dim
    half = 1.01 * outer_radius(spec)

    def count(rng, size, _):
        x = rng.uniform(-half, half, (size, 2 * dim))
        return int(contains_many(spec, x[:, :dim] + 1j * x[:, dim:]).sum())

    hits = sum(sampling.map_chunks(count, n, seed, sampling.STREAM_VOLUME))
    box = (2 * half) ** (2 * dim)
    p = hits / n
    se = box * math.sqrt(max(p * (1 - p), 1.0 / n) / n)
    return VolumeEstimate(box * p, se, n, "monte-carlo", seed)


def volume(spec: DomainSpec, estimator: str = "auto", n: int = 200_000, seed: int = 0) -> VolumeEstimate:
    """Euclidean volume of a bounded domain.

    ``estimator`` is one of ``exact``, ``sphere-quadrature``, ``monte-carlo``
    or ``auto`` (exact when a closed form exists, otherwise quadrature).
    """
    if n <= 0:
        raise VolumeError("sample count must be positive")
    if not is_bounded(spec):
        raise VolumeError("domain is unbounded")
    if estimator == "auto":
        estimator = "exact" if exact_volume(spec) is not None else "sphere-quadrature"
    if estimator == "exact":
        v = exact_volume(spec)
        if v is None:
            raise VolumeError(f"no closed-form volume for {kind_of(spec)} domain")
        return VolumeEstimate(v, 0.0, 0, "exact", seed)
    if estimator == "sphere-quadrature":
        g = canonical_gauge(spec)
        vals, errs = reinhardt_moments(g, spec.dim, np.zeros((1, spec.dim), dtype=int))
        return VolumeEstimate(float(vals[0]), max(float(errs[0]), 1e-15 * float(vals[0])),
                              _quad_nodes(spec.dim), "sphere-quadrature", seed)
    if estimator == "monte-carlo":
        return _mc_volume(spec, n, seed)
    raise VolumeError(f"unknown estimator {estimator!r}")


def _quad_nodes(dim: int) -> int:
    return 1 if dim == 1 else 512 if dim == 2 else 8 * max(4, int(round(96 / (dim - 1))))


# ---------------------------------------------------------------- JSON


def spec_to_dict(spec: DomainSpec) -> dict[str, Any]:
    kind = kind_of(spec)
    out: dict[str, Any] = {"kind": kind, "dim": spec.dim}
    if isinstance(spec, (Disk, Ball)):
        out["radius"] = spec.radius
    elif isinstance(spec, Polydisc):
        out["radii"] = list(spec.radii)
    elif isinstance(spec, Balanced):
        out["gauge"] = G.to_dict(spec.gauge)
    elif isinstance(spec, Product):
        out["factors"] = [spec_to_dict(spec.first), spec_to_dict(spec.second)]
    return out


def spec_from_dict(d: dict[str, Any]) -> DomainSpec:
    if not isinstance(d, dict) or "kind" not in d:
        raise DomainError("domain spec must be an object with a 'kind' key")
    kind = d["kind"]
    try:
        if kind == "disk":
            spec: DomainSpec = disk(d.get("radius", 1.0))
        elif kind == "ball":
            spec = ball(int(d["dim"]), d.get("radius", 1.0))
        elif kind == "polydisc":
            spec = polydisc([float(r) for r in d["radii"]])
        elif kind == "halfplane":
            spec = HalfPlane()
        elif kind == "balanced":
            spec = Balanced(G.from_dict(d["gauge"]), int(d["dim"]))
        elif kind == "product":
            a, b = d["factors"]
            spec = Product(spec_from_dict(a), spec_from_dict(b))
        else:
            raise DomainError(f"unknown domain kind {kind!r}")
    except KeyError as exc:
        raise DomainError(f"domain spec of kind {kind!r} is missing {exc}") from None
    if "dim" in d and int(d["dim"]) != spec.dim:
        raise DimensionError(f"declared dim {d['dim']} does not match {kind} of dimension {spec.dim}")
    return spec


def dumps(spec: DomainSpec) -> str:
    return json.dumps(spec_to_dict(spec), sort_keys=True)


def loads(text: str) -> DomainSpec:
    return spec_from_dict(json.loads(text))


def parse_domain(arg: str) -> DomainSpec:
    """Domain from a shorthand, inline JSON or a JSON file path.

    Shorthands: ``disk``, ``disk:R``, ``ball:N``, ``ball:N:R``,
    ``polydisc:r1,r2,...``, ``halfplane``, ``nonconvex``.
    """
    arg = arg.strip()
    if arg.startswith("{"):
        return loads(arg)
    if os.path.isfile(arg):
        with open(arg) as fh:
            return loads(fh.read())
    name, _, rest = arg.partition(":")
    try:
        if name == "disk":
            return disk(float(rest) if rest else 1.0)
        if name == "ball":
            parts = rest.split(":")
            return ball(int(parts[0]), float(parts[1]) if len(parts) > 1 else 1.0)
        if name == "polydisc":
            return polydisc([float(r) for r in rest.split(",")])
        if name == "halfplane":
            return HalfPlane()
        if name == "nonconvex":
            return nonconvex_example()
    except ValueError as exc:
        raise DomainError(f"cannot parse domain {arg!r}: {exc}") from None
    raise DomainError(f"unknown domain {arg!r}")
