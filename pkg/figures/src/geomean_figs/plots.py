"""The three figure builders: sphere scatter panels, constant curves, gap sweep."""

from __future__ import annotations

import json
import subprocess

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import FigureInputError, read_instance, read_record, read_sample_csv
from .projection import lambert_equal_area

WORST_CASE_FACTOR = 0.5614


def plot_sphere_scatter(csv_paths: dict, instance_path: str, out_path: str,
                        max_points: int = 10_000) -> None:
    """One equal-area panel per level: objective contours under a sample scatter."""
    surface = read_instance(instance_path)
    if surface.n != 3:
        raise FigureInputError(f"sphere scatter needs n = 3, instance has n = {surface.n}")
    tables = {k: read_sample_csv(p) for k, p in sorted(csv_paths.items())}
    for k, t in tables.items():
        if t.n != 3:
            raise FigureInputError(f"level {k}: samples have dimension {t.n}, need 3")

    lon = np.linspace(-np.pi, np.pi, 241)
    sinlat = np.linspace(-1.0, 1.0, 121)
    lg, sg = np.meshgrid(lon, sinlat)
    coslat = np.sqrt(1.0 - sg**2)
    grid = np.stack([coslat * np.cos(lg), coslat * np.sin(lg), sg], axis=-1).reshape(-1, 3)
    surf = surface.geometric_mean(grid).reshape(lg.shape)

    ncols = min(3, max(1, len(tables)))
    nrows = (len(tables) + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(5 * ncols, 3.2 * nrows), squeeze=False)
    for ax in axes.flat:
        ax.set_axis_off()
    for ax, (k, table) in zip(axes.flat, tables.items()):
        ax.set_axis_on()
        ax.contourf(lg, sg, surf, levels=14, cmap="viridis")
        pts = table.points[:max_points]
        plon, psin = lambert_equal_area(pts)
        ax.scatter(plon, psin, s=1.2, c="white", alpha=0.45, linewidths=0)
        ax.set_title(f"level k = {k}")
        ax.set_xlabel("longitude")
        ax.set_ylabel("sin(latitude)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def load_constant_table(table_path: str | None = None, solver_cmd: str = "geomean-opt") -> list:
    """Rows of the level-k rounding-loss table, from a dump or the solver CLI."""
    if table_path is not None:
        with open(table_path) as fh:
            doc = json.load(fh)
    else:
        proc = subprocess.run(
            [solver_cmd, "constants", "--n-list", "2,3,4,5,6", "--k-min", "2", "--k-max", "50"],
            capture_output=True, text=True,
        )
        if proc.returncode != 0:
            raise FigureInputError(f"solver CLI failed: {proc.stderr.strip()}")
        doc = json.loads(proc.stdout)
    rows = doc.get("rows")
    if not rows:
        raise FigureInputError("constant table is empty")
    return rows


def plot_constant_curves(out_path: str, table_path: str | None = None,
                         solver_cmd: str = "geomean-opt") -> list:
    """Curves of e^{-C(n,k)} against k with the worst-case horizontal line."""
    rows = load_constant_table(table_path, solver_cmd)
    by_n: dict = {}
    for row in rows:
        by_n.setdefault(int(row["n"]), []).append((int(row["k"]), float(row["factor"])))
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    for n, pairs in sorted(by_n.items()):
        pairs.sort()
        ax.plot([k for k, _ in pairs], [f for _, f in pairs], label=f"n = {n}")
    ax.axhline(WORST_CASE_FACTOR, color="black", linestyle="--", linewidth=1,
               label=f"worst case {WORST_CASE_FACTOR}")
    ax.set_xlabel("level k")
    ax.set_ylabel("rounding factor")
    ax.set_ylim(0.5, 1.02)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return rows


def plot_gap_sweep(record_path: str, out_path: str) -> None:
    """Median relaxation/optimum ratio against d with the asymptote line."""
    record = read_record(record_path)
    rows = record.get("rows", [])
    if not rows:
        raise FigureInputError("gap-sweep record has no rows")
    ds = [int(r["d"]) for r in rows]
    med = [float(r["median_ratio"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for r in rows:
        ax.scatter([r["d"]] * len(r["ratios"]), r["ratios"], s=8, alpha=0.4, color="tab:blue")
    ax.plot(ds, med, "o-", color="tab:red", label="median ratio")
    asym = float(record["asymptote"])
    ax.axhline(asym, color="black", linestyle="--", linewidth=1,
               label=f"asymptote {asym:.4f}")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("number of forms d")
    ax.set_ylabel("relaxation / oracle")
    ax.set_title(f"n = {record.get('n')}, {record.get('field')} field")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
