"""Named numerical checks, suite configuration and the suite runner.

Every check takes a parameter mapping, a seed and a tolerance and returns a
:class:`CheckReport`.  A suite is a JSON document listing checks; each check
gets its own seed derived from the global seed, its name and its position.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import integrate

from . import bergman
from . import geometry as geo
from . import gauge as G
from . import green as gr
from . import metrics
from . import sampling
from . import serialization
from . import teich_model as tm
from .reports import CheckReport, ReportBuilder

DEFAULT_SEED = 20240917


class SuiteConfigError(ValueError):
    """Malformed suite document or check parameters."""


# ---------------------------------------------------------------- parameter helpers


def parse_complex(x) -> complex:
    """A number, a ``[re, im]`` pair or a string such as ``"0.3+0.1j"``."""
    if isinstance(x, bool):
        raise SuiteConfigError(f"not a complex number: {x!r}")
    if isinstance(x, (int, float, complex)):
        return complex(x)
    if isinstance(x, str):
        try:
            return complex(x.replace(" ", "").replace("i", "j"))
        except ValueError:
            raise SuiteConfigError(f"not a complex number: {x!r}") from None
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(float(x[0]), float(x[1]))
    raise SuiteConfigError(f"not a complex number: {x!r}")


def parse_point(x) -> np.ndarray:
    """A point is a list of coordinates; a bare scalar is a point of C^1."""
    if isinstance(x, (list, tuple)):
        return np.array([parse_complex(c) for c in x], dtype=complex)
    return np.array([parse_complex(x)], dtype=complex)


def point_json(pt) -> list[list[float]]:
    return [[float(c.real), float(c.imag)] for c in np.atleast_1d(np.asarray(pt, dtype=complex))]


def parse_spec(x):
    try:
        if isinstance(x, str):
            return geo.parse_domain(x)
        if isinstance(x, dict):
            return geo.spec_from_dict(x)
    except (geo.DomainError, G.GaugeError, KeyError, TypeError) as exc:
        raise SuiteConfigError(f"bad domain {x!r}: {exc}") from None
    raise SuiteConfigError(f"a domain is a shorthand string or an object, got {x!r}")


def _sigma(*errs: float) -> float:
    return math.sqrt(sum(e * e for e in errs))


def _random_disk_points(rng: np.random.Generator, n: int, rmax: float) -> np.ndarray:
    r = rmax * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


def _quad(p: dict) -> bergman.QuadSpec:
    return bergman.QuadSpec(p.get("quadrature", "mc"), int(p.get("samples", 4_000_000)),
                            int(p.get("quad_seed", 0)), int(p.get("order", 48)))


# ---------------------------------------------------------------- checks


def check_kernel_oracle(p: dict, seed: int, tol: float) -> CheckReport:
    """Series or Gram kernel against the closed form at listed points.

    Passes when each absolute error is at most ``err_est + tol``.
    """
    spec = parse_spec(p.get("domain", "disk"))
    method = p.get("method", "reinhardt")
    degree = p.get("degree", 12)
    points = [parse_point(z) for z in p.get("points", [0.5])]
    b = ReportBuilder("kernel_oracle", "Approximate Bergman kernel agrees with its closed form",
                      {"domain": geo.spec_to_dict(spec), "method": method, "degree": degree,
                       "points": [point_json(z) for z in points]}, tol, seed)
    for i, z in enumerate(points):
        approx = bergman.kernel_density(spec, z, method, degree, _quad(p))
        exact = bergman.exact_kernel(spec, z)
        b.q(f"approx_{i}", approx.density, approx.err_est)
        b.q(f"exact_{i}", exact.density)
        b.q(f"err_est_{i}", approx.err_est)
        b.q(f"abs_error_{i}", abs(approx.density - exact.density))
        # the tolerance absorbs errors up to tol; beyond that the estimate must cover them
        b.margin(f"covered_{i}", [(1, f"err_est_{i}"), (-1, f"abs_error_{i}")])
    return b.build()


def check_transformation(p: dict, seed: int, tol: float) -> CheckReport:
    cases = p.get("cases", [{"map": m} for m in bergman.MAPS])
    b = ReportBuilder("transformation", "Bergman kernel transformation law under biholomorphisms",
                      {"cases": cases}, tol, seed)
    for i, case in enumerate(cases):
        src = parse_spec(case["source"]) if "source" in case else None
        param = parse_complex(case["param"]) if case.get("param") is not None else None
        z = parse_point(case.get("point", [[0.3, 0.2]]))
        b.absorb(bergman.transformation_check(case["map"], z, src, param, tol), f"{i}_{case['map']}")
    return b.build()


DEFAULT_NESTED = [
    {"inner": "disk:0.5", "outer": "disk", "point": [0.2]},
    {"inner": "disk", "outer": "disk", "point": [0.4]},
    {"inner": "polydisc:1,1", "outer": "polydisc:2,2", "point": [0.3, 0.1]},
    {"inner": "ball:2", "outer": "polydisc:1,1", "point": [0.3, 0.2]},
    {"inner": "nonconvex", "outer": "polydisc:1,1", "point": [0.1, 0.05]},
    {"inner": "ball:2", "outer": "ball:2:2", "point": [0.1, 0.3]},
]


def check_monotonicity(p: dict, seed: int, tol: float) -> CheckReport:
    pairs = p.get("pairs", DEFAULT_NESTED)
    b = ReportBuilder("monotonicity", "Bergman kernel decreases along nested domains",
                      {"pairs": pairs}, tol, seed)
    for i, pair in enumerate(pairs):
        rep = bergman.monotonicity_check(parse_spec(pair["inner"]), parse_spec(pair["outer"]),
                                         parse_point(pair["point"]), tol,
                                         pair.get("method", "auto"), pair.get("degree"))
        b.absorb(rep, f"pair_{i}")
    return b.build()


def check_green_identity(p: dict, seed: int, tol: float) -> CheckReport:
    n = int(p.get("n_pairs", 100))
    rng = np.random.default_rng(seed)
    zs = _random_disk_points(rng, n, float(p.get("rmax", 0.95)))
    ws = _random_disk_points(rng, n, float(p.get("rmax", 0.95)))
    rep = tm.green_equals_log_k0_check(zip(zs, ws), tol)
    rep.seed = seed
    return rep


def check_theorem_comparison(p: dict, seed: int, tol: float) -> CheckReport:
    n = int(p.get("n_points", 100))
    rng = np.random.default_rng(seed)
    rep = tm.theorem_comparison_check(_random_disk_points(rng, n, float(p.get("rmax", 0.95))), tol)
    rep.seed = seed
    return rep


def check_comparison_mechanism(p: dict, seed: int, tol: float) -> CheckReport:
    """At the origin of a convex balanced domain: ``K(0) = mu/eps`` and ``K(0) <= 3^{2N} mu/eps``."""
    spec = parse_spec(p.get("domain", "disk"))
    if not geo.has_gauge(spec) or not G.is_convex(geo.canonical_gauge(spec)):
        raise SuiteConfigError("the comparison mechanism needs a convex balanced domain")
    N = spec.dim
    b = ReportBuilder("comparison_mechanism",
                      "At the origin of a convex balanced domain the kernel equals the Busemann "
                      "density over eps_2N and is at most 3^2N times it",
                      {"domain": geo.spec_to_dict(spec)}, tol, seed)
    K = bergman.kernel_density(spec, np.zeros(N), p.get("method", "auto"), p.get("degree"))
    mu = metrics.busemann_density(metrics.origin_indicatrix(spec), p.get("estimator", "auto"),
                                  int(p.get("samples", 200_000)), seed)
    eps = mu.epsilon
    factor = 3.0 ** (2 * N)
    b.q("K0", K.density, K.err_est)
    b.q("lower", mu.value / eps, mu.std_error / eps)
    b.q("upper", factor * mu.value / eps, factor * mu.std_error / eps)
    b.q("err_allowance", K.err_est + mu.std_error / eps)
    b.margin("lower_equality", [(1, "K0"), (-1, "lower")], scale="K0", absolute=True)
    b.at_least("upper_bound", "upper", "K0", scale="K0")
    b.note(f"upper bound slack factor is 3^{2 * N} = {factor:g}")
    return b.build()


def check_balanced_identity(p: dict, seed: int, tol: float) -> CheckReport:
    """``K(0) V = 1`` for a balanced domain."""
    spec = parse_spec(p.get("domain", "disk"))
    if not geo.has_gauge(spec):
        raise SuiteConfigError("balanced identity needs a balanced domain")
    b = ReportBuilder("balanced_identity", "At the origin of a balanced domain the kernel is 1/volume",
                      {"domain": geo.spec_to_dict(spec), "method": p.get("method", "auto"),
                       "degree": p.get("degree"), "samples": p.get("samples")}, tol, seed)
    K = bergman.kernel_density(spec, np.zeros(spec.dim), p.get("method", "auto"),
                               p.get("degree"), _quad(p))
    V = geo.volume(spec, p.get("estimator", "auto"), int(p.get("volume_samples", 200_000)), seed)
    b.q("K0", K.density, K.std_error or K.err_est)
    b.q("volume", V.value, V.std_error)
    b.q("product", K.density * V.value,
        K.density * V.value * _sigma((K.std_error or K.err_est) / K.density, V.std_error / V.value))
    b.q("one", 1.0)
    b.close("product_minus_one", "product", "one")
    if K.method != "exact":
        b.note(f"kernel method {K.method}, degree {K.degree}")
    return b.build()


def check_blocki(p: dict, seed: int, tol: float) -> CheckReport:
    """Lower bound ``1/(e^{2Na} V(sublevel))`` against the kernel.

    ``mode``: ``equality`` (relative), ``bound`` (relative, one-sided) or
    ``sigma`` (one-sided, in units of the combined standard error).
    """
    spec = parse_spec(p.get("domain", "disk"))
    z = parse_point(p.get("point", [0.0] * spec.dim))
    depths = [float(a) for a in p.get("depths", [1.0, 2.0, 3.0])]
    mode = p.get("mode", "equality")
    if mode not in ("equality", "bound", "sigma"):
        raise SuiteConfigError(f"unknown blocki mode {mode!r}")
    b = ReportBuilder("blocki", "Sublevel volumes of the Green function bound the kernel from below",
                      {"domain": geo.spec_to_dict(spec), "point": point_json(z), "depths": depths,
                       "mode": mode, "method": p.get("method", "auto")}, tol, seed)
    K = bergman.kernel_density(spec, z, p.get("method", "auto"), p.get("degree"), _quad(p))
    b.q("K", K.density, K.std_error or K.err_est)
    for i, a in enumerate(depths):
        lb = gr.blocki_lower_bound(spec, z, a, p.get("estimator", "auto"),
                                   int(p.get("sublevel_samples", 1_000_000)), sampling.derive_seed(seed, i))
        b.q(f"lower_{i}", lb.value, lb.std_error)
        if mode == "equality":
            b.close(f"equality_{i}", "K", f"lower_{i}", scale="K")
        elif mode == "bound":
            b.at_least(f"bound_{i}", "K", f"lower_{i}", scale="K")
        else:
            b.q(f"sigma_{i}", _sigma(K.std_error or K.err_est, lb.std_error))
            b.at_least(f"bound_{i}", "K", f"lower_{i}", scale=f"sigma_{i}")
    return b.build()


def _indicatrix_limit(spec, pole) -> geo.VolumeEstimate:
    if pole is not None:
        return metrics.indicatrix_volume(metrics.disk_model_indicatrix(pole))
    return metrics.indicatrix_volume(metrics.origin_indicatrix(spec))


def check_sublevel_limit(p: dict, seed: int, tol: float) -> CheckReport:
    """Scaled sublevel volumes ``e^{2Na} V({g < -a})`` tend to the indicatrix volume.

    With an exact estimator every depth is compared (relative).  With Monte
    Carlo the Richardson-extrapolated limit is compared in sigma units.
    """
    pole = parse_complex(p["pole"]) if p.get("pole") is not None else None
    spec = geo.disk() if pole is not None else parse_spec(p.get("domain", "disk"))
    depths = [float(a) for a in p.get("depths", [1.0, 2.0, 3.0])]
    estimator = p.get("estimator", "auto")
    series = gr.asymptotic_limit(depths, None if pole is not None else spec, pole, estimator,
                                 int(p.get("samples", 1_000_000)), seed)
    L = _indicatrix_limit(spec, pole)
    b = ReportBuilder("sublevel_limit", "Scaled Green sublevel volumes converge to the indicatrix volume",
                      {"domain": geo.spec_to_dict(spec), "pole": None if pole is None else [pole.real, pole.imag],
                       "depths": depths, "estimator": estimator}, tol, seed)
    b.q("indicatrix_volume", L.value, L.std_error)
    for i, a in enumerate(depths):
        b.q(f"scaled_{i}", series.scaled[i], series.scaled_errors[i])
    stochastic = any(e > 0 for e in series.scaled_errors)
    if not stochastic:
        for i in range(len(depths)):
            b.close(f"depth_{i}", f"scaled_{i}", "indicatrix_volume", scale="indicatrix_volume")
    else:
        b.q("extrapolated", series.extrapolated, series.extrapolated_error)
        b.q("sigma_extrapolated", _sigma(series.extrapolated_error, L.std_error))
        b.close("extrapolated_sigmas", "extrapolated", "indicatrix_volume", scale="sigma_extrapolated")
    b.notes.extend(series.notes)
    return b.build()


def _azukawa_setup(p: dict):
    pole = parse_complex(p["pole"]) if p.get("pole") is not None else None
    if pole is not None:
        spec = geo.disk()
        return spec, np.array([pole]), metrics.disk_green, lambda v: tm.finsler_norm(pole, v[0])
    spec = parse_spec(p.get("domain", "ball:2"))
    return spec, np.zeros(spec.dim), metrics.balanced_green(spec), lambda v: metrics.kobayashi_origin(spec, v)


def check_azukawa(p: dict, seed: int, tol: float) -> CheckReport:
    """Numerical Azukawa limsup against the Kobayashi norm on random directions (relative)."""
    spec, base, green_fn, reference = _azukawa_setup(p)
    n = int(p.get("n_directions", 50))
    ts = [float(t) for t in p.get("t_sequence", metrics.DEFAULT_TS)]
    b = ReportBuilder("azukawa", "Azukawa indicatrix agrees with the Kobayashi indicatrix",
                      {"domain": geo.spec_to_dict(spec), "base": point_json(base),
                       "n_directions": n, "t_sequence": ts}, tol, seed)
    rng = sampling.chunk_rng(seed, sampling.STREAM_DIRECTIONS, 0)
    u = sampling.uniform_sphere(rng, n, 2 * spec.dim)
    dirs = u[:, :spec.dim] + 1j * u[:, spec.dim:]
    for i, v in enumerate(dirs):
        A = metrics.azukawa(green_fn, base, v, ts)
        b.q(f"azukawa_{i}", A.value, A.spread)
        b.q(f"kobayashi_{i}", reference(v))
        b.close(f"rel_{i}", f"azukawa_{i}", f"kobayashi_{i}", scale=f"kobayashi_{i}")
    return b.build()


def check_sandwich(p: dict, seed: int, tol: float) -> CheckReport:
    domains = p.get("domains", ["disk", "ball:2", "polydisc:1,1", "nonconvex"])
    b = ReportBuilder("sandwich", "Indicatrices lie between two Euclidean balls",
                      {"domains": domains, "n_directions": p.get("n_directions", 10_000)}, tol, seed)
    for i, d in enumerate(domains):
        rep = metrics.indicatrix_sandwich_check(parse_spec(d), int(p.get("n_directions", 10_000)),
                                                sampling.derive_seed(seed, i), tol)
        b.absorb(rep, f"domain_{i}")
    return b.build()


DEFAULT_PATHS = [
    {"coefficients": [0, 1]},
    {"coefficients": [0, [0.6, 0.8]]},
    {"coefficients": [0.3, 1]},
    {"coefficients": [[0.2, -0.4], [0.5, 0.5], 2]},
]


def check_expansion(p: dict, seed: int, tol: float) -> CheckReport:
    paths = p.get("paths", DEFAULT_PATHS)
    ts = [float(t) for t in p.get("t_list", [1e-1, 1e-2, 1e-3, 1e-4])]
    b = ReportBuilder("expansion", "First-order expansion of tanh of the distance along holomorphic disks",
                      {"paths": paths, "t_list": ts}, tol, seed)
    for i, path in enumerate(paths):
        coeffs = tuple(parse_complex(c) for c in path["coefficients"])
        rep = tm.expansion_check(tm.PathSpec(coeffs), path.get("t_list", ts),
                                 float(p.get("ratio_tol", 1e-3)), float(p.get("fit_slack", 0.1)), tol)
        b.absorb(rep, f"path_{i}")
    return b.build()


def _busemann_area(region, mu: Callable[[float], float]) -> float:
    """Integral of a radial density over a region centered at the origin."""
    if isinstance(region, metrics.Circle) and region.center == 0:
        val, _ = integrate.quad(lambda r: 2 * math.pi * r * mu(r), 0.0, region.radius,
                                epsabs=0.0, epsrel=1e-12)
        return val
    x0, x1, y0, y1 = region.bbox()
    val, _ = integrate.dblquad(lambda y, x: mu(math.hypot(x, y)), x0, x1, y0, y1, epsabs=0.0, epsrel=1e-10)
    return val


def _model_distance(model: str):
    if model == "disk":
        return tm.teich_distance_many, lambda r: metrics.busemann_density(
            metrics.disk_model_indicatrix(r)).value
    if model == "euclidean":
        return metrics.euclidean_distance, lambda r: 1.0
    if model.startswith("scaled:"):
        c = float(model.split(":", 1)[1])
        return metrics.scaled_distance(c), lambda r: c * c
    raise SuiteConfigError(f"unknown metric model {model!r}")


def check_hausdorff(p: dict, seed: int, tol: float) -> CheckReport:
    """Covering estimate of the two-dimensional Hausdorff measure against the Busemann area (relative)."""
    model = p.get("model", "disk")
    region_text = p.get("region", f"disk:{math.tanh(1.0)!r}")
    delta = float(p.get("delta", 1e-2))
    region = metrics.parse_region(region_text)
    dist, mu = _model_distance(model)
    b = ReportBuilder("hausdorff", "Hausdorff measure of the invariant metric equals its Busemann area",
                      {"model": model, "region": region_text, "delta": delta}, tol, seed)
    cover = metrics.hausdorff_cover(dist, region, delta)
    b.q("hausdorff", cover.value)
    b.q("busemann_area", _busemann_area(region, mu))
    b.q("n_cells", cover.n_cells)
    b.close("relative_error", "hausdorff", "busemann_area", scale="busemann_area")
    return b.build()


def check_volume_growth(p: dict, seed: int, tol: float) -> CheckReport:
    """Kernel mass of invariant balls in the disk model: quadrature against ``sinh^2 R``, rate against 2."""
    radii = [float(r) for r in p.get("radii", [1, 2, 3, 4, 5])]
    fit = [float(r) for r in p.get("fit_radii", [3, 4, 5])]
    b = ReportBuilder("volume_growth", "Kernel volume of invariant balls grows like exp(2R)",
                      {"radii": radii, "fit_radii": fit}, tol, seed)
    res = tm.ball_volume_growth(radii)
    for i, (e, q, qe) in enumerate(zip(res.exact, res.quadrature, res.quad_errors)):
        b.q(f"exact_{i}", e)
        b.q(f"quadrature_{i}", q, qe)
        b.close(f"quadrature_{i}", f"quadrature_{i}", f"exact_{i}", scale=f"exact_{i}")
    b.q("rate", tm.ball_volume_growth(fit).rate)
    b.q("expected_rate", 2.0)
    b.close("rate", "rate", "expected_rate", scale="expected_rate")
    return b.build()


def check_volume_consistency(p: dict, seed: int, tol: float) -> CheckReport:
    """Monte Carlo volume against the deterministic estimator, in sigma units."""
    spec = parse_spec(p.get("domain", "nonconvex"))
    b = ReportBuilder("volume_consistency", "Independent volume estimators agree",
                      {"domain": geo.spec_to_dict(spec), "samples": p.get("samples", 1_000_000)}, tol, seed)
    mc = geo.volume(spec, "monte-carlo", int(p.get("samples", 1_000_000)), seed)
    ref = geo.volume(spec, p.get("reference", "auto"))
    b.q("monte_carlo", mc.value, mc.std_error)
    b.q("reference", ref.value, ref.std_error)
    b.q("sigma", _sigma(mc.std_error, ref.std_error))
    b.close("sigmas", "monte_carlo", "reference", scale="sigma")
    return b.build()


def check_busemann_chain(p: dict, seed: int, tol: float) -> CheckReport:
    """Busemann density at the origin over ``eps_2N`` against the series kernel at the origin (sigmas)."""
    spec = parse_spec(p.get("domain", "nonconvex"))
    b = ReportBuilder("busemann_chain", "Busemann density over eps_2N equals 1/volume equals the kernel "
                      "at the origin of a balanced domain",
                      {"domain": geo.spec_to_dict(spec), "samples": p.get("samples", 1_000_000)}, tol, seed)
    mu = metrics.busemann_density(metrics.origin_indicatrix(spec), "monte-carlo",
                                  int(p.get("samples", 1_000_000)), seed)
    K = bergman.kernel_density(spec, np.zeros(spec.dim), "reinhardt", 0)
    b.q("busemann_over_eps", mu.value / mu.epsilon, mu.std_error / mu.epsilon)
    b.q("busemann_times_volume", mu.value * mu.indicatrix_volume.value)
    b.q("epsilon", mu.epsilon)
    b.q("K0", K.density, K.err_est)
    b.q("sigma", _sigma(mu.std_error / mu.epsilon, K.err_est))
    b.close("chain_sigmas", "busemann_over_eps", "K0", scale="sigma")
    b.close("identity", "busemann_times_volume", "epsilon", scale="sigma")
    return b.build()


@dataclass(frozen=True)
class CheckSpec:
    fn: Callable[[dict, int, float], CheckReport]
    params: frozenset[str]
    tolerance: float


_Q = {"quadrature", "samples", "quad_seed", "order"}

REGISTRY: dict[str, CheckSpec] = {
    "kernel_oracle": CheckSpec(check_kernel_oracle, frozenset({"domain", "method", "degree", "points"} | _Q), 1e-4),
    "transformation": CheckSpec(check_transformation, frozenset({"cases"}), 1e-6),
    "monotonicity": CheckSpec(check_monotonicity, frozenset({"pairs"}), 1e-6),
    "green_identity": CheckSpec(check_green_identity, frozenset({"n_pairs", "rmax"}), 1e-12),
    "theorem_comparison": CheckSpec(check_theorem_comparison, frozenset({"n_points", "rmax"}), 1e-12),
    "comparison_mechanism": CheckSpec(check_comparison_mechanism,
                                      frozenset({"domain", "method", "degree", "estimator", "samples"}), 1e-12),
    "balanced_identity": CheckSpec(check_balanced_identity,
                                   frozenset({"domain", "method", "degree", "estimator", "volume_samples"} | _Q),
                                   1e-12),
    "blocki": CheckSpec(check_blocki, frozenset({"domain", "point", "depths", "mode", "method", "degree",
                                                 "estimator", "sublevel_samples"} | _Q), 1e-9),
    "sublevel_limit": CheckSpec(check_sublevel_limit,
                                frozenset({"domain", "pole", "depths", "estimator", "samples"}), 1e-12),
    "azukawa": CheckSpec(check_azukawa, frozenset({"domain", "pole", "n_directions", "t_sequence"}), 1e-3),
    "sandwich": CheckSpec(check_sandwich, frozenset({"domains", "n_directions"}), 1e-9),
    "expansion": CheckSpec(check_expansion, frozenset({"paths", "t_list", "ratio_tol", "fit_slack"}), 1e-12),
    "hausdorff": CheckSpec(check_hausdorff, frozenset({"model", "region", "delta"}), 0.10),
    "volume_growth": CheckSpec(check_volume_growth, frozenset({"radii", "fit_radii"}), 0.01),
    "volume_consistency": CheckSpec(check_volume_consistency, frozenset({"domain", "samples", "reference"}), 3.0),
    "busemann_chain": CheckSpec(check_busemann_chain, frozenset({"domain", "samples"}), 3.0),
}


# ---------------------------------------------------------------- suites


@dataclass(frozen=True)
class CheckEntry:
    name: str
    params: dict[str, Any]
    tolerance: float


@dataclass
class SuiteConfig:
    seed: int = DEFAULT_SEED
    checks: list[CheckEntry] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {"seed": self.seed,
                "checks": [{"name": c.name, "params": c.params, "tolerance": c.tolerance} for c in self.checks]}


def _entry(raw: Any, index: int, overrides: dict[str, float]) -> CheckEntry:
    if not isinstance(raw, dict) or "name" not in raw:
        raise SuiteConfigError(f"check #{index} must be an object with a 'name'")
    extra = set(raw) - {"name", "params", "tolerance"}
    if extra:
        raise SuiteConfigError(f"check #{index} has unknown keys {sorted(extra)}")
    name = raw["name"]
    if name not in REGISTRY:
        raise SuiteConfigError(f"unknown check {name!r}; known checks: {', '.join(sorted(REGISTRY))}")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise SuiteConfigError(f"params of check #{index} must be an object")
    bad = set(params) - REGISTRY[name].params
    if bad:
        raise SuiteConfigError(f"check {name!r} does not accept parameters {sorted(bad)}")
    tol = overrides.get(name, raw.get("tolerance", REGISTRY[name].tolerance))
    try:
        tol = float(tol)
    except (TypeError, ValueError):
        raise SuiteConfigError(f"tolerance of check #{index} is not a number") from None
    if not (tol >= 0 and math.isfinite(tol)):
        raise SuiteConfigError(f"tolerance of check #{index} must be finite and nonnegative")
    return CheckEntry(name, params, tol)


def parse_suite(doc: Any, seed: int | None = None, overrides: dict[str, float] | None = None) -> SuiteConfig:
    """Validate a suite document; unknown checks or parameters are rejected here, before running."""
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(REGISTRY)
    if unknown:
        raise SuiteConfigError(f"tolerance overrides name unknown checks {sorted(unknown)}")
    if not isinstance(doc, dict):
        raise SuiteConfigError("a suite is a JSON object")
    extra = set(doc) - {"seed", "checks"}
    if extra:
        raise SuiteConfigError(f"unknown suite keys {sorted(extra)}")
    checks = doc.get("checks", [])
    if not isinstance(checks, list):
        raise SuiteConfigError("'checks' must be a list")
    s = doc.get("seed", DEFAULT_SEED) if seed is None else seed
    if isinstance(s, bool) or not isinstance(s, int) or s < 0:
        raise SuiteConfigError("seed must be a nonnegative integer")
    return SuiteConfig(s, [_entry(c, i, overrides) for i, c in enumerate(checks)])


def load_suite(path_or_name: str, seed: int | None = None,
               overrides: dict[str, float] | None = None) -> SuiteConfig:
    if path_or_name == "default":
        return parse_suite(default_suite_document(), seed, overrides)
    try:
        with open(path_or_name) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SuiteConfigError(f"cannot read suite {path_or_name!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SuiteConfigError(f"suite {path_or_name!r} is not valid JSON: {exc}") from None
    return parse_suite(doc, seed, overrides)


def default_suite_document() -> dict[str, Any]:
    """Every claim exercised once, sized to run in a few minutes on one core."""
    mc = {"quadrature": "mc", "samples": 4_000_000, "degree": 6}
    return {"seed": DEFAULT_SEED, "checks": [
        {"name": "kernel_oracle", "params": {"domain": "disk", "points": [0.5, [[0.1, 0.6]], -0.8]}},
        {"name": "kernel_oracle", "params": {"domain": "ball:2", "points": [[0.3, 0.1], [0, 0.5]]}},
        {"name": "transformation"},
        {"name": "transformation", "params": {"cases": [
            {"map": "affine", "source": "ball:2", "param": 3, "point": [0.2, 0.3]},
            {"map": "affine", "source": "polydisc:1,2", "param": [0, 0.5], "point": [0.5, 1.5]}]}},
        {"name": "monotonicity"},
        {"name": "green_identity"},
        {"name": "theorem_comparison"},
        {"name": "comparison_mechanism", "params": {"domain": "disk"}},
        {"name": "comparison_mechanism", "params": {"domain": "polydisc:1,1"}},
        {"name": "comparison_mechanism", "params": {"domain": "ball:2"}},
        {"name": "balanced_identity", "params": {"domain": "disk"}},
        {"name": "balanced_identity", "params": {"domain": "ball:2"}},
        {"name": "balanced_identity", "params": {"domain": "polydisc:1,1"}},
        {"name": "balanced_identity", "params": dict(domain="nonconvex", method="gram", **mc), "tolerance": 0.02},
        {"name": "blocki", "params": {"domain": "disk", "depths": [1, 2, 3]}},
        {"name": "blocki", "params": {"domain": "polydisc:1,1", "depths": [1, 2, 3]}},
        {"name": "blocki", "params": {"domain": "disk", "point": [0.3], "depths": [1, 2, 3], "mode": "bound"},
         "tolerance": 0.0},
        {"name": "blocki", "params": dict(domain="nonconvex", depths=[1, 2], mode="sigma", method="gram", **mc),
         "tolerance": 3.0},
        {"name": "sublevel_limit", "params": {"domain": "disk", "depths": [1, 2, 3]}},
        {"name": "sublevel_limit", "params": {"domain": "polydisc:1,1", "depths": [1, 2, 3]}},
        {"name": "sublevel_limit", "params": {"pole": 0.3, "depths": [2, 3, 4], "estimator": "monte-carlo",
                                              "samples": 1_000_000}, "tolerance": 3.0},
        {"name": "azukawa", "params": {"domain": "ball:2"}},
        {"name": "azukawa", "params": {"domain": "polydisc:1,1"}},
        {"name": "azukawa", "params": {"domain": "nonconvex"}},
        {"name": "azukawa", "params": {"pole": [0.3, 0.2], "n_directions": 20}},
        {"name": "sandwich"},
        {"name": "expansion"},
        {"name": "hausdorff", "params": {"model": "euclidean", "region": "rect:0,1,0,1", "delta": 0.01},
         "tolerance": 0.05},
        {"name": "hausdorff", "params": {"model": "scaled:2", "region": "rect:0,1,0,1", "delta": 0.02},
         "tolerance": 0.05},
        {"name": "hausdorff"},
        {"name": "volume_growth"},
        {"name": "volume_consistency", "params": {"domain": "nonconvex"}},
        {"name": "busemann_chain", "params": {"domain": "nonconvex"}},
    ]}


def check_seed(global_seed: int, name: str, index: int) -> int:
    """Stable per-check seed, independent of Python's hash randomization."""
    h = hashlib.sha256(f"{global_seed}:{name}:{index}".encode()).digest()
    return int.from_bytes(h[:8], "little") & ((1 << 63) - 1)


@dataclass
class SuiteResult:
    config: SuiteConfig
    reports: list[CheckReport]
    runtime_ms: int

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def n_failed(self) -> int:
        return sum(not r.passed for r in self.reports)


def _error_report(entry: CheckEntry, seed: int, exc: Exception) -> CheckReport:
    b = ReportBuilder(entry.name, "check raised an error", {"params": entry.params}, entry.tolerance, seed)
    b.fail(f"error: {type(exc).__name__}: {exc}")
    return b.build()


def run_check(entry: CheckEntry, seed: int) -> CheckReport:
    try:
        rep = REGISTRY[entry.name].fn(entry.params, seed, entry.tolerance)
    except (ValueError, ArithmeticError, KeyError, TypeError) as exc:
        return _error_report(entry, seed, exc)
    rep.seed = seed
    return rep


def run_suite(config: SuiteConfig, progress: Callable[[int, CheckReport], None] | None = None) -> SuiteResult:
    t0 = time.perf_counter()
    reports = []
    for i, entry in enumerate(config.checks):
        rep = run_check(entry, check_seed(config.seed, entry.name, i))
        reports.append(rep)
        if progress is not None:
            progress(i, rep)
    return SuiteResult(config, reports, int(round(1000 * (time.perf_counter() - t0))))


def summary_rows(result: SuiteResult) -> list[dict[str, Any]]:
    return [{"index": i, "name": r.name, "passed": r.passed, "worst_margin": r.worst_margin,
             "tolerance": r.tolerance, "n_margins": len(r.margins), "seed": r.seed}
            for i, r in enumerate(result.reports)]


def write_outputs(result: SuiteResult, out_dir: str) -> list[str]:
    """One JSON file per check plus ``summary.json`` and ``summary.csv``; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for i, rep in enumerate(result.reports):
        path = os.path.join(out_dir, f"{i:02d}_{rep.name}.json")
        serialization.write_json(path, rep.to_dict())
        paths.append(path)
    doc = serialization.report_document(result.config.to_dict(), [r.to_dict() for r in result.reports],
                                        result.runtime_ms)
    path = os.path.join(out_dir, "summary.json")
    serialization.write_json(path, doc)
    paths.append(path)
    path = os.path.join(out_dir, "summary.csv")
    rows = summary_rows(result)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["index", "name", "passed", "worst_margin", "tolerance",
                                           "n_margins", "seed"])
        w.writeheader()
        for row in rows:
            w.writerow({**row, "worst_margin": serialization.fmt(row["worst_margin"])})
    paths.append(path)
    return paths
