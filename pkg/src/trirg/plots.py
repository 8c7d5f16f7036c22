"""Figures for the report command; all rendering is file-based (Agg)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import PolyCollection

from .shape import cot_from_coords, flatness
from .subdivide import FlowStats, HierMesh

# Strip the Software chunk so identical runs give identical PNG bytes
# independent of the matplotlib patch version.
_PNG_META = {"Software": None}


def save_figure(fig, path) -> None:
    fig.savefig(path, dpi=150, metadata=_PNG_META)
    plt.close(fig)


def mesh_figure(mesh: HierMesh):
    """Leaf triangles filled by log10 flatness of their shape."""
    polys = []
    vals = []
    for tri in mesh.triangles:
        coords = [tuple(p) for p in mesh.triangle_coords(tri)]
        polys.append(coords)
        vals.append(math.log10(flatness(cot_from_coords(*coords))))
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    coll = PolyCollection(polys, array=np.array(vals), cmap="viridis",
                          edgecolors="black", linewidths=0.3)
    ax.add_collection(coll)
    ax.autoscale()
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"centroid subdivision, {mesh.levels} levels, "
                 f"{len(mesh.triangles)} leaves")
    fig.colorbar(coll, ax=ax, label="log10 flatness")
    fig.tight_layout()
    return fig


def flow_figure(stats: list[FlowStats]):
    """Flatness envelope and central statistics along random descents."""
    steps = [s.step for s in stats]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.fill_between(steps, [s.fmin for s in stats], [s.fmax for s in stats],
                    alpha=0.25, color="tab:blue", label="min to max")
    ax.plot(steps, [s.q50 for s in stats], color="tab:blue", label="median")
    ax.plot(steps, [math.exp(s.mean_log_flatness) for s in stats],
            color="tab:orange", linestyle="--", label="geometric mean")
    ax.set_yscale("log")
    ax.set_xlabel("subdivision step")
    ax.set_ylabel("flatness")
    ax.set_title(f"random-child flatness flow, {stats[0].samples} samples")
    ax.legend()
    fig.tight_layout()
    return fig


def schur_figure(rows: list[dict]):
    """Elimination error per depth, one line per family.

    ``rows`` are dicts with keys family, levels, rel_frobenius,
    lambda_estimate (the schur.csv columns).
    """
    families = sorted({r["family"] for r in rows})
    fig, (ax_err, ax_lam) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    for fam in families:
        sub = sorted((r for r in rows if r["family"] == fam),
                     key=lambda r: r["levels"])
        lv = [r["levels"] for r in sub]
        ax_err.semilogy(lv, [max(r["rel_frobenius"], 1e-17) for r in sub],
                        marker="o", label=fam)
        ax_lam.plot(lv, [r["lambda_estimate"] for r in sub],
                    marker="o", label=fam)
    lv_all = sorted({r["levels"] for r in rows})
    ax_lam.plot(lv_all, [(5.0 / 3.0) ** n for n in lv_all],
                linestyle="--", color="gray", label="(5/3)^levels")
    ax_err.set_xlabel("levels")
    ax_err.set_ylabel("relative Frobenius error")
    ax_err.set_title("effective vs single-triangle action")
    ax_err.legend()
    ax_lam.set_xlabel("levels")
    ax_lam.set_ylabel("least-squares scale")
    ax_lam.set_title("scale of the effective action")
    ax_lam.legend()
    fig.tight_layout()
    return fig
