"""Pluricomplex Green functions, sublevel-set volumes and the kernel lower bound.

For a balanced pseudoconvex domain with gauge ``m`` the Green function with
pole at the origin is ``log m``.  On the unit disk any pole is handled by
Moebius transport.  Nothing here solves a Monge-Ampere problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from . import sampling


class GreenError(ValueError):
    pass


def green_balanced(spec, z) -> float:
    """``g(0, z) = log m(z)``; ``-inf`` exactly at the pole."""
    pt = geo.as_point(z, spec.dim)
    if not geo.contains(spec, pt):
        raise GreenError("point is outside the domain")
    m = geo.gauge_eval(spec, pt)
    return -math.inf if m == 0.0 else math.log(m)


def _pseudo_hyperbolic(w: complex, z):
    return np.abs((z - w) / (1 - np.conj(w) * z))


def green_disk(w, z) -> float:
    """Green function of the unit disk with pole ``w``: ``log |(z - w) / (1 - conj(w) z)|``."""
    w, z = complex(w), complex(z)
    if abs(w) >= 1 or abs(z) >= 1:
        raise GreenError("pole and point must lie in the open unit disk")
    k = float(_pseudo_hyperbolic(w, z))
    return -math.inf if k == 0.0 else math.log(k)


def sublevel_volume(spec, a: float, estimator: str = "auto", n: int = 200_000,
                    seed: int = 0) -> geo.VolumeEstimate:
    """Volume of ``{g(0, .) < -a}`` = ``e^{-a} * domain``, i.e. ``e^{-2Na} V(domain)``."""
    if not a > 0:
        raise GreenError("depth a must be positive")
    return geo.volume(spec, estimator, n, seed).scaled(math.exp(-2 * spec.dim * a))


def disk_sublevel_volume(w, a: float, estimator: str = "exact", n: int = 200_000,
                         seed: int = 0) -> geo.VolumeEstimate:
    """Area of ``{z in D : g_D(w, z) < -a}``.

    ``exact`` uses that the set is the Moebius image of ``|u| < e^-a``, a
    Euclidean disk of radius ``e^-a (1-|w|^2) / (1 - |w|^2 e^-2a)``.
    ``monte-carlo`` samples a box around ``w`` and tests the Green function.
    """
    if not a > 0:
        raise GreenError("depth a must be positive")
    w = complex(w)
    if abs(w) >= 1:
        raise GreenError("pole must lie in the open unit disk")
    eps = math.exp(-a)
    s = abs(w) ** 2
    if estimator == "exact":
        rho = eps * (1 - s) / (1 - s * eps * eps)
        return geo.VolumeEstimate(math.pi * rho * rho, 0.0, 0, "exact", seed)
    if estimator != "monte-carlo":
        raise GreenError(f"unknown estimator {estimator!r}")
    half = eps * (1 - s) / (1 - abs(w) * eps)

    def count(rng, size, _):
        x = rng.uniform(-half, half, (size, 2))
        z = w + x[:, 0] + 1j * x[:, 1]
        inside = np.abs(z) < 1
        with np.errstate(divide="ignore"):
            g = np.log(_pseudo_hyperbolic(w, z))
        return int(np.sum(inside & (g < -a)))

    hits = sum(sampling.map_chunks(count, n, seed, sampling.STREAM_SUBLEVEL))
    box = (2 * half) ** 2
    p = hits / n
    se = box * math.sqrt(max(p * (1 - p), 1.0 / n) / n)
    return geo.VolumeEstimate(box * p, se, n, "monte-carlo", seed)


@dataclass
class SublevelSeries:
    depths: list[float]
    volumes: list[geo.VolumeEstimate]
    scaled: list[float]
    scaled_errors: list[float]
    dim: int
    extrapolated: float = math.nan
    extrapolated_error: float = math.nan
    notes: list[str] = field(default_factory=list)

    @property
    def raw_limit(self) -> float:
        return self.scaled[-1]


def richardson(depths, values, errors) -> tuple[float, float]:
    """Remove a first-order ``C e^-a`` term using the last two depths."""
    (a1, a2), (s1, s2), (e1, e2) = depths[-2:], values[-2:], errors[-2:]
    rho = math.exp(-(a2 - a1))
    lim = (s2 - rho * s1) / (1 - rho)
    err = math.hypot(e2, rho * e1) / (1 - rho)
    return lim, err


def asymptotic_limit(depths, spec=None, pole=None, estimator: str = "auto",
                     n: int = 1_000_000, seed: int = 0) -> SublevelSeries:
    """Scaled sublevel volumes ``e^{2Na} V({g < -a})`` and their extrapolated limit.

    With ``pole`` given the domain is the unit disk and the Green function is
    the Moebius one; otherwise ``spec`` is balanced with pole at the origin.
    """
    depths = [float(a) for a in depths]
    if len(depths) < 2 or any(b <= a for a, b in zip(depths, depths[1:])):
        raise GreenError("need at least two strictly increasing depths")
    if pole is not None:
        if spec is not None and spec != geo.disk():
            raise GreenError("movable poles are supported on the unit disk only")
        est = "exact" if estimator == "auto" else estimator
        vols = [disk_sublevel_volume(pole, a, est, n, sampling.derive_seed(seed, i))
                for i, a in enumerate(depths)]
        dim = 1
    else:
        if spec is None:
            raise GreenError("need a balanced domain or a disk pole")
        vols = [sublevel_volume(spec, a, estimator, n, sampling.derive_seed(seed, i))
                for i, a in enumerate(depths)]
        dim = spec.dim
    scaled = [v.value * math.exp(2 * dim * a) for v, a in zip(vols, depths)]
    errs = [v.std_error * math.exp(2 * dim * a) for v, a in zip(vols, depths)]
    series = SublevelSeries(depths, vols, scaled, errs, dim)
    series.extrapolated, series.extrapolated_error = richardson(depths, scaled, errs)
    series.notes.append("sublevel volumes are normalized by e^{+2Na}, the factor under which "
                        "they converge to the indicatrix volume")
    return series


@dataclass(frozen=True)
class LowerBound:
    value: float
    std_error: float

    def __float__(self) -> float:
        return self.value


def blocki_lower_bound(spec, z, a: float, estimator: str = "auto", n: int = 1_000_000,
                       seed: int = 0) -> LowerBound:
    """``1 / (e^{2Na} V({g(z, .) < -a}))``, a lower bound for the Bergman kernel at ``z``."""
    if not a > 0:
        raise GreenError("depth a must be positive")
    pt = geo.as_point(z, spec.dim)
    if not geo.contains(spec, pt):
        raise GreenError("point is outside the domain")
    if np.all(pt == 0) and geo.has_gauge(spec):
        vol = sublevel_volume(spec, a, estimator, n, seed)
    elif spec == geo.disk():
        vol = disk_sublevel_volume(complex(pt[0]), a, "exact" if estimator == "auto" else estimator, n, seed)
    else:
        raise GreenError("no Green function available for this pole")
    if not vol.value > 0:
        raise GreenError("sublevel volume vanished")
    scaled = math.exp(2 * spec.dim * a) * vol.value
    value = 1.0 / scaled
    return LowerBound(value, value * vol.std_error / vol.value)
