"""Matplotlib figure rendering for curves and study outputs (files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_curve(thetas, values, path, ylabel="Fisher information (rad$^{-2}$)",
               label=None, bound=None, title=None):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(thetas, values, lw=1.5, label=label)
    if bound is not None:
        ax.axhline(bound, color="gray", ls="--", lw=1.0, label="Gaussian bound")
    ax.set_xlabel(r"$\theta$ (rad)")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if label or bound is not None:
        ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path


def save_frontier(points, path, title=None):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if points:
        ax.plot([p.delta_theta for p in points], [p.mean_cfi for p in points],
                "o-", ms=4, lw=1.2)
    ax.set_xlabel(r"enhancement range $\delta\theta$ (rad)")
    ax.set_ylabel(r"mean CFI (rad$^{-2}$)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path


def save_uncertainty(table, path, title=None):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    families = sorted({r["family"] for r in table.rows})
    navs = sorted({r["nav"] for r in table.rows})
    for fam in families:
        for nav in navs:
            rows = sorted((r for r in table.rows
                           if r["family"] == fam and r["nav"] == nav),
                          key=lambda r: 1.0 - r["eta"])
            ax.plot([1.0 - r["eta"] for r in rows], [r["dtheta"] for r in rows],
                    "o-", ms=3, lw=1.1, label=f"{fam}, N={nav:g}")
    ax.set_xlabel(r"loss $1-\eta$")
    ax.set_ylabel(r"$d\theta = 1/\sqrt{F}$ (rad)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.legend(frameon=False, fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path


def save_mixture(result, path):
    xs, ys = [], []
    for s in result.samples:
        if 1.0 - s.purity > 1e-12 and 1.0 - s.qfi_ratio > 1e-14:
            xs.append(np.log(1.0 - s.purity))
            ys.append(np.log(1.0 - s.qfi_ratio))
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(xs, ys, ".", ms=2, alpha=0.4)
    xs = np.asarray(xs)
    line = result.slope * xs + result.intercept
    order = np.argsort(xs)
    ax.plot(xs[order], line[order], "r-", lw=1.4,
            label=f"envelope {result.slope:.2f} x {result.intercept:+.2f}")
    ax.set_xlabel(r"$\log(1-\mathcal{P})$")
    ax.set_ylabel(r"$\log(1-F_Q/F_Q^{\rm Gauss})$")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path


def save_bias(result, path, title=None):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(result.thetas, result.bias, "o-", ms=3, lw=1.1)
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_xlabel(r"true $\theta$ (rad)")
    ax.set_ylabel(r"bias $\langle\theta-\theta'\rangle$ (rad)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path
