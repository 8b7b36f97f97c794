"""Figure data and rendering for the ``report`` subcommand.

Each figure is computed into a table, written as CSV and drawn to PNG with
the same file stem, so every plotted point can be read back exactly.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import bergman  # noqa: E402
from . import geometry as geo  # noqa: E402
from . import green as gr  # noqa: E402
from . import metrics  # noqa: E402
from . import serialization  # noqa: E402
from . import teich_model as tm  # noqa: E402


@dataclass
class Table:
    name: str
    title: str
    columns: list[str]
    rows: list[list[float]]

    def column(self, key: str) -> np.ndarray:
        j = self.columns.index(key)
        return np.array([r[j] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        return serialization.csv_text([dict(zip(self.columns, r)) for r in self.rows])


def sublevel_table(seed: int, samples: int) -> Table:
    depths = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
    pole = 0.3
    mc = gr.asymptotic_limit(depths, pole=pole, estimator="monte-carlo", n=samples, seed=seed)
    exact = gr.asymptotic_limit(depths, pole=pole, estimator="exact")
    limit = metrics.indicatrix_volume(metrics.disk_model_indicatrix(pole)).value
    rows = [[a, s, e, x, limit] for a, s, e, x in zip(depths, mc.scaled, mc.scaled_errors, exact.scaled)]
    return Table("sublevel_limit", "Scaled sublevel volumes, disk with pole 0.3",
                 ["depth", "scaled_mc", "scaled_mc_std_error", "scaled_exact", "indicatrix_volume"], rows)


def reinhardt_table() -> Table:
    cases = [("disk", geo.disk(), np.array([0.5])), ("ball2", geo.ball(2), np.array([0.3, 0.2j])),
             ("polydisc2", geo.polydisc([1, 1]), np.array([0.5, 0.4]))]
    rows = []
    for d in range(0, 21, 2):
        row: list[float] = [d]
        for _, spec, z in cases:
            kv = bergman.reinhardt_kernel(spec, z, d)
            ex = bergman.exact_kernel(spec, z).density
            row += [abs(kv.density - ex) / ex, kv.err_est / ex]
        rows.append(row)
    cols = ["degree"]
    for name, _, _ in cases:
        cols += [f"{name}_rel_error", f"{name}_rel_err_est"]
    return Table("reinhardt_convergence", "Series kernel: error against degree", cols, rows)


def growth_table() -> Table:
    radii = [0.5 * k for k in range(1, 13)]
    res = tm.ball_volume_growth(radii)
    rows = [[r, q, e] for r, q, e in zip(res.radii, res.quadrature, res.exact)]
    return Table("volume_growth", "Kernel volume of invariant balls in the disk model",
                 ["radius", "kernel_mass", "sinh_squared"], rows)


def expansion_table() -> Table:
    ts = [10.0 ** (-k / 2) for k in range(2, 17)]
    paths = {"radial": tm.PathSpec((0, 1)), "offset": tm.PathSpec((0.3, 1)),
             "curved": tm.PathSpec((0.2 - 0.4j, 0.5 + 0.5j, 2))}
    rows = []
    for t in ts:
        row = [t]
        for p in paths.values():
            row.append(abs(tm.k0(p.base, complex(p(t))) - t * tm.finsler_norm(p.base, p.velocity)))
        rows.append(row)
    return Table("expansion", "First-order expansion error of tanh of the distance",
                 ["t"] + [f"error_{k}" for k in paths], rows)


def hausdorff_table() -> Table:
    region = metrics.Circle(math.tanh(1.0))
    target = math.pi * math.sinh(1.0) ** 2
    rows = []
    for delta in [0.2, 0.1, 0.05, 0.02, 0.01]:
        c = metrics.hausdorff_cover(tm.teich_distance_many, region, delta)
        rows.append([delta, c.value, c.n_cells, target])
    return Table("hausdorff_delta", "Covering estimate of the disk model area against delta",
                 ["delta", "estimate", "n_cells", "busemann_area"], rows)


def kernel_busemann_table() -> Table:
    eps = metrics.unit_ball_volume(2)
    rows = []
    for r in np.linspace(0.0, 0.95, 20):
        K = bergman.exact_kernel(geo.disk(), r).density
        mu = metrics.busemann_density(metrics.disk_model_indicatrix(r)).value
        rows.append([float(r), K, mu / eps, K / (mu / eps), 9.0])
    return Table("kernel_busemann", "Kernel over Busemann density (normalized) in the disk model",
                 ["radius", "kernel", "busemann_over_eps", "ratio", "upper_constant"], rows)


def _plot(table: Table, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    name = table.name
    if name == "sublevel_limit":
        ax.errorbar(table.column("depth"), table.column("scaled_mc"), yerr=table.column("scaled_mc_std_error"),
                    fmt="o", label="Monte Carlo")
        ax.plot(table.column("depth"), table.column("scaled_exact"), "-", label="exact")
        ax.axhline(table.rows[0][-1], color="k", ls="--", label="indicatrix volume")
        ax.set_xlabel("depth a")
        ax.set_ylabel("e^{2a} V(sublevel)")
    elif name == "reinhardt_convergence":
        d = table.column("degree")
        for col in table.columns[1::2]:
            ax.semilogy(d, np.maximum(table.column(col), 1e-17), "o-", label=col.replace("_rel_error", ""))
        ax.set_xlabel("degree")
        ax.set_ylabel("relative error")
    elif name == "volume_growth":
        ax.semilogy(table.column("radius"), table.column("kernel_mass"), "o", label="quadrature")
        ax.semilogy(table.column("radius"), table.column("sinh_squared"), "-", label="sinh^2 R")
        ax.set_xlabel("R")
        ax.set_ylabel("kernel mass")
    elif name == "expansion":
        t = table.column("t")
        for col in table.columns[1:]:
            ax.loglog(t, np.maximum(table.column(col), 1e-18), "o-", label=col.replace("error_", ""))
        ax.loglog(t, t ** 2, "k--", label="t^2")
        ax.set_xlabel("t")
        ax.set_ylabel("|k0 - t F(v)|")
    elif name == "hausdorff_delta":
        ax.semilogx(table.column("delta"), table.column("estimate"), "o-", label="cover estimate")
        ax.axhline(table.rows[0][-1], color="k", ls="--", label="Busemann area")
        ax.set_xlabel("delta")
        ax.set_ylabel("measure")
    elif name == "kernel_busemann":
        ax.plot(table.column("radius"), table.column("ratio"), "o-", label="K / (mu/eps)")
        ax.axhline(9.0, color="r", ls="--", label="upper constant 9")
        ax.axhline(1.0, color="k", ls=":", label="lower constant 1")
        ax.set_xlabel("|z|")
        ax.set_ylabel("ratio")
    ax.set_title(table.title, fontsize=10)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


FIGURES: dict[str, Callable[..., Table]] = {
    "sublevel_limit": sublevel_table,
    "reinhardt_convergence": reinhardt_table,
    "volume_growth": growth_table,
    "expansion": expansion_table,
    "hausdorff_delta": hausdorff_table,
    "kernel_busemann": kernel_busemann_table,
}


def build_report(out_dir: str, seed: int, samples: int = 400_000,
                 only: list[str] | None = None) -> list[str]:
    """Write ``<name>.csv`` and ``<name>.png`` for each figure; return the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, fn in FIGURES.items():
        if only and name not in only:
            continue
        table = fn(seed, samples) if name == "sublevel_limit" else fn()
        csv_path = os.path.join(out_dir, f"{name}.csv")
        with open(csv_path, "w", newline="") as fh:
            fh.write(table.to_csv())
        png_path = os.path.join(out_dir, f"{name}.png")
        _plot(table, png_path)
        paths += [csv_path, png_path]
    return paths
