"""Rendering of report figures: region maps, shock curves, certification
histories and simulation time series.

All functions write a PNG next to the delimited data output and return the
path.  The Agg backend is forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CLASS_COLORS = {
    "NOT_ADMISSIBLE": "#c44e52",
    "ADMISSIBLE_NOT_COVERED": "#dd8452",
    "COVERED_STABLE": "#55a868",
}


def save_region_map(result: dict, path: str) -> str:
    """Class map over the candidate-state grid (strip for scalar, plane for systems)."""
    states = np.asarray(result["state"])
    classes = np.asarray(result["class"])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if states.shape[1] == 1:
        u = states[:, 0]
        for name, color in CLASS_COLORS.items():
            sel = classes == name
            ax.scatter(u[sel], np.zeros(np.sum(sel)), s=14, marker="s",
                       color=color, label=name)
        ax.set_yticks([])
        ax.set_xlabel("target state u")
    else:
        for name, color in CLASS_COLORS.items():
            sel = classes == name
            ax.scatter(states[sel, 0], states[sel, 1], s=6, marker="s",
                       color=color, label=name)
        ax.set_xlabel("w")
        ax.set_ylabel("v")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title(f"stability region map (epsilon = {result['epsilon']:.4g})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_curve(table: dict, path: str) -> str:
    """Shock speed, its derivative and admissibility along the curve."""
    s = np.asarray(table["s"])
    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    axes[0].plot(s, table["sigma"], label="sigma")
    axes[0].plot(s, table["sigma_prime"], label="sigma'", ls="--")
    axes[0].legend(fontsize=8)
    adm = np.asarray(table["lax_admissible"], dtype=bool)
    axes[1].fill_between(s, 0, 1, where=adm, color=CLASS_COLORS["COVERED_STABLE"],
                         alpha=0.4, step="mid", label="Lax admissible")
    axes[1].fill_between(s, 0, 1, where=~adm, color=CLASS_COLORS["NOT_ADMISSIBLE"],
                         alpha=0.4, step="mid", label="not admissible")
    axes[1].set_yticks([])
    axes[1].set_xlabel("curve parameter s")
    axes[1].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_certification(report, path: str) -> str:
    """Scan history: dissipation maxima against the candidate weight."""
    recs = report.records if hasattr(report, "records") else report["records"]
    a = np.array([r["a"] for r in recs])
    dc = np.array([r["dcont_max"] for r in recs])
    dr = np.array([r["drh_max"] for r in recs])
    ok = np.array([r["passed"] for r in recs])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.scatter(a[ok], dc[ok], marker="o", color=CLASS_COLORS["COVERED_STABLE"],
               label="max D_cont (pass)")
    ax.scatter(a[~ok], dc[~ok], marker="o", color=CLASS_COLORS["NOT_ADMISSIBLE"],
               label="max D_cont (fail)")
    ax.scatter(a[ok], dr[ok], marker="x", color=CLASS_COLORS["COVERED_STABLE"],
               label="max D_RH (pass)")
    ax.scatter(a[~ok], dr[~ok], marker="x", color=CLASS_COLORS["NOT_ADMISSIBLE"],
               label="max D_RH (fail)")
    a_star = report.a_star if hasattr(report, "a_star") else report.get("a_star")
    if a_star:
        ax.axvline(a_star, color="k", lw=0.8, ls=":", label=f"a* = {a_star:.4g}")
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xscale("log")
    ax.set_xlabel("weight a")
    ax.set_ylabel("grid maximum")
    ax.set_yscale("symlog", linthresh=1e-10)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_simulation(result, path: str) -> str:
    """Weighted energy, shift trajectory and interface dissipation over time."""
    t = result.times
    fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
    axes[0].plot(t, result.energy)
    axes[0].set_ylabel("weighted energy E(t)")
    axes[1].plot(t, result.shift, label="shift h(t)")
    axes[1].plot(t, result.front_position, ls="--", label="tracked front")
    axes[1].plot(t, result.sigma_LR * t, ls=":", label="sigma_LR t")
    axes[1].set_ylabel("position")
    axes[1].legend(fontsize=8)
    axes[2].plot(t[1:], result.boundary_dissipation)
    axes[2].axhline(result.tol_scheme, color="k", lw=0.8, ls=":")
    axes[2].set_ylabel("interface dissipation")
    axes[2].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
