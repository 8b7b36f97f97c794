"""Minkowski gauges of balanced domains as a closed expression tree.

A gauge is built from leaves ``|z_j| / r_j`` and the combinators weighted
p-norm, max, weighted geometric mean and positive scalar multiple.  Each
combinator keeps the result positively homogeneous of degree one and keeps
``log m`` plurisubharmonic, so ``{m < 1}`` is a balanced pseudoconvex domain.

Since every leaf only sees moduli, all gauges here describe complete
Reinhardt domains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np


class GaugeError(ValueError):
    """Malformed or degenerate gauge expression."""


@dataclass(frozen=True)
class Abs:
    index: int
    radius: float = 1.0

    def __post_init__(self):
        if self.index < 0:
            raise GaugeError("coordinate index must be nonnegative")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise GaugeError("leaf radius must be positive and finite")


@dataclass(frozen=True)
class PNorm:
    p: float
    weights: tuple[float, ...]
    args: tuple["Gauge", ...]

    def __post_init__(self):
        if not (self.p >= 1 and math.isfinite(self.p)):
            raise GaugeError("p-norm exponent must be finite and >= 1")
        if len(self.weights) != len(self.args) or not self.args:
            raise GaugeError("p-norm needs one positive weight per argument")
        if any(not (w > 0) for w in self.weights):
            raise GaugeError("p-norm weights must be positive")


@dataclass(frozen=True)
class Max:
    args: tuple["Gauge", ...]

    def __post_init__(self):
        if not self.args:
            raise GaugeError("max needs at least one argument")


@dataclass(frozen=True)
class GeoMean:
    exponents: tuple[float, ...]
    args: tuple["Gauge", ...]

    def __post_init__(self):
        if len(self.exponents) != len(self.args) or not self.args:
            raise GaugeError("geometric mean needs one exponent per argument")
        if any(not (e > 0) for e in self.exponents):
            raise GaugeError("geometric-mean exponents must be positive")
        if abs(sum(self.exponents) - 1.0) > 1e-12:
            raise GaugeError("geometric-mean exponents must sum to 1")


@dataclass(frozen=True)
class Scale:
    factor: float
    arg: "Gauge"

    def __post_init__(self):
        if not (self.factor > 0 and math.isfinite(self.factor)):
            raise GaugeError("scale factor must be positive and finite")


Gauge = Union[Abs, PNorm, Max, GeoMean, Scale]


def evaluate_moduli(g: Gauge, s: np.ndarray) -> np.ndarray:
    """Evaluate on an array of coordinate moduli with trailing axis N."""
    if isinstance(g, Abs):
        return s[..., g.index] / g.radius
    if isinstance(g, PNorm):
        acc = sum(w * evaluate_moduli(a, s) ** g.p for w, a in zip(g.weights, g.args))
        return acc ** (1.0 / g.p)
    if isinstance(g, Max):
        out = evaluate_moduli(g.args[0], s)
        for a in g.args[1:]:
            out = np.maximum(out, evaluate_moduli(a, s))
        return out
    if isinstance(g, GeoMean):
        out = 1.0
        for e, a in zip(g.exponents, g.args):
            out = out * evaluate_moduli(a, s) ** e
        return out
    if isinstance(g, Scale):
        return g.factor * evaluate_moduli(g.arg, s)
    raise GaugeError(f"unknown gauge node {g!r}")


def evaluate(g: Gauge, z) -> np.ndarray:
    """Gauge of complex points ``z`` (trailing axis N)."""
    return evaluate_moduli(g, np.abs(np.asarray(z, dtype=complex)))


def max_index(g: Gauge) -> int:
    if isinstance(g, Abs):
        return g.index
    if isinstance(g, Scale):
        return max_index(g.arg)
    return max(max_index(a) for a in g.args)


def _forced_zero(g: Gauge) -> frozenset[int]:
    # Coordinates that must vanish wherever this node vanishes.
    if isinstance(g, Abs):
        return frozenset({g.index})
    if isinstance(g, Scale):
        return _forced_zero(g.arg)
    parts = [_forced_zero(a) for a in g.args]
    if isinstance(g, GeoMean):
        return frozenset.intersection(*parts)
    return frozenset.union(*parts)


def validate(g: Gauge, dim: int) -> None:
    """Raise unless ``g`` is a positive definite gauge on C^dim."""
    if max_index(g) >= dim:
        raise GaugeError(f"gauge refers to coordinate {max_index(g)} but dim is {dim}")
    missing = set(range(dim)) - _forced_zero(g)
    if missing:
        raise GaugeError(f"gauge can vanish away from the origin (free coordinates {sorted(missing)})")


def scaled(g: Gauge, factor: float) -> Gauge:
    """``factor * g``, merging nested scale nodes."""
    if isinstance(g, Scale):
        return Scale(g.factor * factor, g.arg)
    return Scale(factor, g)


def disk_gauge(radius: float = 1.0) -> Gauge:
    return Abs(0, radius)


def ball_gauge(dim: int, radius: float = 1.0) -> Gauge:
    return PNorm(2.0, (1.0,) * dim, tuple(Abs(j, radius) for j in range(dim)))


def polydisc_gauge(radii) -> Gauge:
    return Max(tuple(Abs(j, float(r)) for j, r in enumerate(radii)))


def to_dict(g: Gauge) -> dict[str, Any]:
    if isinstance(g, Abs):
        return {"op": "abs", "index": g.index, "radius": g.radius}
    if isinstance(g, PNorm):
        return {"op": "pnorm", "p": g.p, "weights": list(g.weights),
                "args": [to_dict(a) for a in g.args]}
    if isinstance(g, Max):
        return {"op": "max", "args": [to_dict(a) for a in g.args]}
    if isinstance(g, GeoMean):
        return {"op": "geomean", "exponents": list(g.exponents),
                "args": [to_dict(a) for a in g.args]}
    if isinstance(g, Scale):
        return {"op": "scale", "factor": g.factor, "arg": to_dict(g.arg)}
    raise GaugeError(f"unknown gauge node {g!r}")


def from_dict(d: dict[str, Any]) -> Gauge:
    if not isinstance(d, dict) or "op" not in d:
        raise GaugeError(f"gauge node must be an object with an 'op' key: {d!r}")
    op = d["op"]
    try:
        if op == "abs":
            return Abs(int(d["index"]), float(d.get("radius", 1.0)))
        if op == "pnorm":
            return PNorm(float(d["p"]), tuple(float(w) for w in d["weights"]),
                         tuple(from_dict(a) for a in d["args"]))
        if op == "max":
            return Max(tuple(from_dict(a) for a in d["args"]))
        if op == "geomean":
            return GeoMean(tuple(float(e) for e in d["exponents"]),
                           tuple(from_dict(a) for a in d["args"]))
        if op == "scale":
            return Scale(float(d["factor"]), from_dict(d["arg"]))
    except KeyError as exc:
        raise GaugeError(f"gauge node {op!r} is missing field {exc}") from None
    raise GaugeError(f"unknown gauge op {op!r}")


def is_convex(g: Gauge) -> bool:
    """Sufficient test: p-norms, maxima and scalings of leaves are convex."""
    if isinstance(g, Abs):
        return True
    if isinstance(g, GeoMean):
        return False
    if isinstance(g, Scale):
        return is_convex(g.arg)
    return all(is_convex(a) for a in g.args)
