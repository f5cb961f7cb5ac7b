"""Matplotlib rendering of report data to image files.

Every CLI report command accepts ``--plot PATH``; these helpers turn the
already-computed row records into a figure saved at that path.  Data
emission never depends on matplotlib state; plotting is strictly a side
output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_phase_distribution",
    "plot_discrete_distribution",
    "plot_matrix_diagonal",
    "plot_fig1a",
    "plot_fig1b",
    "plot_nonlinear",
    "plot_table1",
]


def _save(fig, path: str):
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_phase_distribution(rows, path: str, title: str = "phase distribution"):
    phi = [r["phi"] for r in rows]
    dens = [r["density"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(phi, dens, lw=1.5)
    ax.set_xlabel(r"$\phi$")
    ax.set_ylabel(r"$p(\phi)$")
    ax.set_title(title)
    ax.set_xlim(0, 2 * np.pi)
    _save(fig, path)


def plot_discrete_distribution(rows, path: str, title: str = "discrete phase distribution"):
    theta = [r["theta"] for r in rows]
    prob = [r["probability"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 2 * np.pi / max(len(rows), 1)
    ax.bar(theta, prob, width=0.8 * width)
    ax.set_xlabel(r"$\theta_t$")
    ax.set_ylabel("probability")
    ax.set_title(title)
    _save(fig, path)


def plot_matrix_diagonal(rows, path: str, title: str = "number populations"):
    diag = [(r["m"], r["re"]) for r in rows if r["m"] == r["n"]]
    n = [d[0] for d in diag]
    p = [d[1] for d in diag]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(n, p, width=0.8)
    ax.set_xlabel("n")
    ax.set_ylabel(r"$\rho_{nn}$")
    ax.set_title(title)
    _save(fig, path)


def plot_fig1a(rows, path: str):
    fig, ax = plt.subplots(figsize=(6, 4))
    r_values = sorted({r["r_prime"] for r in rows})
    colors = plt.cm.tab10(np.linspace(0, 1, 10))
    for i, rp in enumerate(r_values):
        sel = [r for r in rows if r["r_prime"] == rp]
        phi = [r["phi"] for r in sel]
        ax.plot(phi, [r["paul"] for r in sel], lw=2, color=colors[i],
                label=f"Paul, r'={rp:g}")
        ax.plot(phi, [r["pb_series"] for r in sel], "--", lw=1.5,
                color=colors[i], label=f"Pegg-Barnett, r'={rp:g}")
    ax.set_xlabel(r"$\phi$")
    ax.set_ylabel(r"$p(\phi)$")
    ax.set_xlim(0, 2 * np.pi)
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_fig1b(rows, path: str):
    fig, ax = plt.subplots(figsize=(6, 4))
    markers = ["s", "o", "^", "v", "D"]
    dims = sorted({r["s_plus_1"] for r in rows})
    for i, sp1 in enumerate(dims):
        sel = [r for r in rows if r["s_plus_1"] == sp1]
        ax.plot([r["phi"] for r in sel], [r["ratio"] for r in sel],
                markers[i % len(markers)], ms=6, ls="none",
                label=f"s+1 = {sp1:g}")
    ax.axhline(1.0, color="k", lw=0.8, ls=":")
    ax.set_xlabel(r"$\phi$")
    ax.set_ylabel("ratio")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_nonlinear(rows, path: str):
    fig, ax = plt.subplots(figsize=(6, 4))
    s = [r["s"] for r in rows]
    ax.plot(s, [r["closed_form"] for r in rows], "o-", label="closed form")
    ax.plot(s, [r["numeric"] for r in rows], "x--", label="numeric")
    ax.set_xlabel("s")
    ax.set_ylabel(r"$2\pi \, p$")
    ax.set_title(r"quadratic amplification schedule $\kappa = 1 + s^2\epsilon$")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_table1(rows, path: str):
    fig, ax = plt.subplots(figsize=(6, 4))
    eps_values = sorted({r["eps"] for r in rows}, reverse=True)
    for eps in eps_values:
        sel = sorted((r for r in rows if r["eps"] == eps), key=lambda r: r["s"])
        ax.errorbar([r["s"] for r in sel], [r["mean"] for r in sel],
                    yerr=[r["max_dev"] for r in sel], marker="o", ms=4,
                    capsize=2, label=rf"$\epsilon = {eps:g}$")
    ax.axhline(1.0, color="k", lw=0.8, ls=":")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("s")
    ax.set_ylabel("mean ratio")
    ax.legend(fontsize=8)
    _save(fig, path)
