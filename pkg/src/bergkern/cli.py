"""Command-line entry point: ``bergkern kernel|green|metric|verify|report``.

Exit status is 0 on success, 1 when a verification check fails and 2 on
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import bergman
from . import geometry as geo
from . import gauge as G
from . import green as gr
from . import metrics
from . import sampling
from . import serialization
from . import teich_model as tm
from . import verifier
from ._version import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def default_seed() -> int:
    env = os.environ.get("BERGKERN_SEED")
    if env is None or env == "":
        return verifier.DEFAULT_SEED
    try:
        seed = int(env)
    except ValueError:
        raise UsageError(f"BERGKERN_SEED must be an integer, got {env!r}") from None
    if seed < 0:
        raise UsageError("BERGKERN_SEED must be nonnegative")
    return seed


def parse_point_arg(text: str, dim: int | None = None) -> np.ndarray:
    """Comma-separated complex coordinates such as ``0.3,0.1+0.2j``."""
    try:
        pt = np.array([complex(c.strip().replace("i", "j")) for c in text.split(",")], dtype=complex)
    except ValueError:
        raise UsageError(f"cannot parse point {text!r}; use comma-separated complex numbers") from None
    if dim is not None and pt.shape[0] != dim:
        raise UsageError(f"point has {pt.shape[0]} coordinates, domain has dimension {dim}")
    return pt


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}") from None


def _emit(record: dict[str, Any], out: str | None, human: str) -> None:
    """Human summary to stdout, or machine output to stdout (json/csv) or a file."""
    if out in (None, ""):
        print(human)
        return
    if out == "json":
        sys.stdout.write(serialization.dumps(record))
        return
    if out == "csv":
        sys.stdout.write(serialization.csv_text([record]))
        return
    ext = os.path.splitext(out)[1].lower()
    if ext not in (".json", ".csv"):
        raise UsageError("--out takes json, csv or a path ending in .json or .csv")
    text = serialization.dumps(record) if ext == ".json" else serialization.csv_text([record])
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    print(human)


def _num(x: float):
    return x if math.isfinite(x) else serialization.fmt(x)


# ---------------------------------------------------------------- subcommands


def cmd_kernel(args) -> int:
    spec = geo.parse_domain(args.domain)
    z = parse_point_arg(args.point, spec.dim)
    quad = bergman.QuadSpec(args.quadrature, args.samples, args.seed)
    kv = bergman.kernel_density(spec, z, args.method, args.degree, quad)
    record = {"domain": geo.spec_to_dict(spec), "point": verifier.point_json(z), "density": kv.density,
              "method": kv.method, "degree": kv.degree, "err_est": kv.err_est, "std_error": kv.std_error,
              "seed": args.seed}
    human = f"{kv.density:.7g}\n  method={kv.method} degree={kv.degree} err_est={kv.err_est:.3g}"
    _emit(record, args.out, human)
    return EXIT_OK


def cmd_green(args) -> int:
    spec = geo.parse_domain(args.domain)
    pole = parse_point_arg(args.pole, spec.dim) if args.pole else np.zeros(spec.dim, dtype=complex)
    at_origin = bool(np.all(pole == 0))
    if not at_origin and spec != geo.disk():
        raise UsageError("poles away from the origin are supported on the unit disk only")
    if not at_origin and not geo.has_gauge(spec):
        raise UsageError("domain has no gauge")
    if (args.point is None) == (args.depths is None):
        raise UsageError("give exactly one of --point and --depths")
    if args.point is not None:
        z = parse_point_arg(args.point, spec.dim)
        if np.array_equal(z, pole) and not args.allow_pole:
            print("error: the point is the pole, where the Green function is -inf; "
                  "pass --allow-pole to emit it", file=sys.stderr)
            return EXIT_USAGE
        g = gr.green_balanced(spec, z) if at_origin else gr.green_disk(complex(pole[0]), complex(z[0]))
        record = {"domain": geo.spec_to_dict(spec), "pole": verifier.point_json(pole),
                  "point": verifier.point_json(z), "green": _num(g)}
        _emit(record, args.out, serialization.fmt(g) if not math.isfinite(g) else f"{g:.10g}")
        return EXIT_OK
    depths = _floats(args.depths, "depths")
    series = gr.asymptotic_limit(depths, None if not at_origin else spec,
                                 None if at_origin else complex(pole[0]),
                                 args.estimator, args.samples, args.seed)
    record = {"domain": geo.spec_to_dict(spec), "pole": verifier.point_json(pole), "depths": depths,
              "scaled": list(series.scaled), "scaled_errors": list(series.scaled_errors),
              "raw_limit": series.raw_limit, "extrapolated": series.extrapolated,
              "extrapolated_error": series.extrapolated_error, "notes": series.notes, "seed": args.seed}
    lines = [f"a={a:g}  e^(2Na) V = {s:.10g} +/- {e:.2g}"
             for a, s, e in zip(depths, series.scaled, series.scaled_errors)]
    lines.append(f"extrapolated limit {series.extrapolated:.10g} +/- {series.extrapolated_error:.2g}")
    _emit(record, args.out, "\n".join(lines))
    return EXIT_OK


def _metric_distance(model: str):
    if model == "disk":
        return tm.teich_distance_many
    if model == "euclidean":
        return metrics.euclidean_distance
    if model.startswith("scaled:"):
        return metrics.scaled_distance(float(model.split(":", 1)[1]))
    raise UsageError(f"unknown model {model!r}; use disk, euclidean or scaled:<c>")


def cmd_metric(args) -> int:
    if args.hausdorff:
        if not args.region:
            raise UsageError("--hausdorff needs --region")
        cover = metrics.hausdorff_cover(_metric_distance(args.model or "disk"),
                                        metrics.parse_region(args.region), args.delta)
        record = {"model": args.model or "disk", "region": args.region, "delta": args.delta,
                  "hausdorff": cover.value, "n_cells": cover.n_cells, "levels": cover.max_level}
        _emit(record, args.out, f"{cover.value:.10g}  ({cover.n_cells} cells)")
        return EXIT_OK
    if args.model not in (None, "disk"):
        raise UsageError("only the disk model has a pointwise Finsler metric")
    if args.model == "disk" and args.domain:
        raise UsageError("give --model or --domain, not both")
    if args.model == "disk":
        p = parse_point_arg(args.point or "0", 1)
        ind = metrics.disk_model_indicatrix(complex(p[0]))
        spec_d: dict[str, Any] = {"model": "disk"}
    elif args.domain:
        spec = geo.parse_domain(args.domain)
        p = parse_point_arg(args.point or ",".join(["0"] * spec.dim), spec.dim)
        if np.any(p != 0):
            raise UsageError("for balanced domains the metric is available at the origin only")
        ind = metrics.origin_indicatrix(spec)
        spec_d = {"domain": geo.spec_to_dict(spec)}
    else:
        raise UsageError("give --model disk or --domain")
    record = {**spec_d, "point": verifier.point_json(p)}
    chosen = [x for x in ("vector", "indicatrix_volume", "busemann") if getattr(args, x)]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --vector, --indicatrix-volume, --busemann, --hausdorff")
    if args.vector:
        v = parse_point_arg(args.vector, ind.dim)
        record["vector"] = verifier.point_json(v)
        record["norm"] = ind(v)
        human = f"{record['norm']:.10g}"
    else:
        vol = metrics.indicatrix_volume(ind, args.estimator, args.samples, args.seed)
        record["indicatrix_volume"] = vol.value
        record["indicatrix_volume_std_error"] = vol.std_error
        human = f"indicatrix volume {vol.value:.10g}"
        if args.busemann:
            mu = metrics.busemann_density(ind, volume=vol)
            record["busemann_density"] = mu.value
            record["busemann_std_error"] = mu.std_error
            human = f"{mu.value:.10g}\n  {human}"
    _emit(record, args.out, human)
    return EXIT_OK


def _parse_overrides(text: str | None) -> dict[str, float]:
    if not text:
        return {}
    if text.strip().startswith("{"):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--tol-overrides is not valid JSON: {exc}") from None
        items = d.items() if isinstance(d, dict) else []
    else:
        items = [kv.split("=", 1) for kv in text.split(",") if kv]
        if any(len(kv) != 2 for kv in items):
            raise UsageError("--tol-overrides takes name=tol,name=tol or a JSON object")
    try:
        return {str(k).strip(): float(v) for k, v in items}
    except ValueError:
        raise UsageError("tolerance overrides must be numbers") from None


def cmd_verify(args) -> int:
    seed = args.seed if args.seed_given else None
    config = verifier.load_suite(args.suite, seed, _parse_overrides(args.tol_overrides))

    def progress(i, rep):
        status = "PASS" if rep.passed else "FAIL"
        print(f"[{i + 1:>2}/{len(config.checks)}] {status} {rep.name:<22} worst margin "
              f"{rep.worst_margin:+.3e} (tol {rep.tolerance:g}, {rep.runtime_ms} ms)")

    result = verifier.run_suite(config, progress)
    verifier.write_outputs(result, args.out or "bergkern-verify")
    print(f"{len(result.reports) - result.n_failed}/{len(result.reports)} checks passed; "
          f"outputs in {args.out or 'bergkern-verify'}")
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_report(args) -> int:
    from . import figures

    only = args.figures.split(",") if args.figures else None
    if only:
        unknown = set(only) - set(figures.FIGURES)
        if unknown:
            raise UsageError(f"unknown figures {sorted(unknown)}; known: {', '.join(figures.FIGURES)}")
    out = args.out or "bergkern-report"
    paths = figures.build_report(out, args.seed, args.samples, only)
    for p in paths:
        print(p)
    return EXIT_OK


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default: $BERGKERN_SEED or fixed)")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    common.add_argument("--out", default=None, help="json, csv, or an output path")

    p = _Parser(prog="bergkern", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"bergkern {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("kernel", parents=[common], help="Bergman kernel density at a point")
    k.add_argument("--domain", required=True, help="shorthand, inline JSON or JSON file")
    k.add_argument("--point", required=True, help="comma-separated complex coordinates")
    k.add_argument("--method", default="auto", choices=["auto", "exact", "reinhardt", "gram"])
    k.add_argument("--degree", type=int, default=None)
    k.add_argument("--samples", type=int, default=1_000_000)
    k.add_argument("--quadrature", default="mc", choices=["mc", "tensor"])
    k.set_defaults(func=cmd_kernel)

    g = sub.add_parser("green", parents=[common], help="Green function values and sublevel volumes")
    g.add_argument("--domain", required=True)
    g.add_argument("--pole", default=None, help="pole (default: origin; unit disk for other poles)")
    g.add_argument("--point", default=None)
    g.add_argument("--depths", default=None, help="comma-separated depths a > 0")
    g.add_argument("--samples", type=int, default=1_000_000)
    g.add_argument("--estimator", default="auto", choices=["auto", "exact", "sphere-quadrature", "monte-carlo"])
    g.add_argument("--allow-pole", action="store_true", help="emit -inf at the pole instead of failing")
    g.set_defaults(func=cmd_green)

    m = sub.add_parser("metric", parents=[common], help="Kobayashi norms, indicatrices, Busemann and Hausdorff")
    m.add_argument("--domain", default=None)
    m.add_argument("--model", default=None, help="disk, euclidean or scaled:<c>")
    m.add_argument("--point", default=None)
    m.add_argument("--vector", default=None)
    m.add_argument("--indicatrix-volume", action="store_true")
    m.add_argument("--busemann", action="store_true")
    m.add_argument("--hausdorff", action="store_true")
    m.add_argument("--region", default=None, help="rect:x0,x1,y0,y1 or disk:r[,cx,cy]")
    m.add_argument("--delta", type=float, default=1e-2)
    m.add_argument("--samples", type=int, default=200_000)
    m.add_argument("--estimator", default="auto", choices=["auto", "exact", "sphere-quadrature", "monte-carlo"])
    m.set_defaults(func=cmd_metric)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", default="default", help="'default' or a suite JSON file")
    v.add_argument("--tol-overrides", default=None, help="name=tol,... or a JSON object")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", parents=[common], help="render figures with their CSV data")
    r.add_argument("--samples", type=int, default=400_000)
    r.add_argument("--figures", default=None, help="comma-separated subset of figure names")
    r.set_defaults(func=cmd_report)
    return p


_CONFIG_ERRORS = (UsageError, verifier.SuiteConfigError, geo.DomainError, G.GaugeError,
                  bergman.KernelError, gr.GreenError, metrics.MetricError, tm.ModelError)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        args.seed_given = args.seed is not None
        if args.seed is None:
            args.seed = default_seed()
            args.seed_given = "BERGKERN_SEED" in os.environ and os.environ["BERGKERN_SEED"] != ""
        elif args.seed < 0:
            raise UsageError("--seed must be nonnegative")
        if args.threads is not None:
            if args.threads < 1:
                raise UsageError("--threads must be positive")
            sampling.set_threads(args.threads)
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
