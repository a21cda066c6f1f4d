"""Figures written next to the JSON/CSV reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps reruns byte-identical
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def distance_heatmap(table, labels, path, title: str = "") -> Path:
    t = np.asarray(table, dtype=float)
    fig, ax = plt.subplots(figsize=(1.2 + 0.45 * len(t), 1.0 + 0.45 * len(t)))
    im = ax.imshow(t, vmin=0, vmax=1, cmap="viridis")
    ax.set_xticks(range(len(t)), labels, rotation=90, fontsize=7)
    ax.set_yticks(range(len(t)), labels, fontsize=7)
    if len(t) <= 16:
        for i in range(len(t)):
            for j in range(len(t)):
                if i != j:
                    ax.text(j, i, f"{t[i, j]:.2f}", ha="center", va="center", fontsize=6,
                            color="white" if t[i, j] < 0.6 else "black")
    fig.colorbar(im, ax=ax, label="squared chordal distance")
    ax.set_title(title, fontsize=9)
    return _save(fig, path)


def fundamental_region(points: dict, path, title: str = "") -> Path:
    """Fourier-family triangle (0,0)-(1/6,0)-(1/6,1/12) with labelled parameter points.

    ``points`` maps a label to (x1, x2, count).
    """
    fig, ax = plt.subplots(figsize=(5, 3.2))
    tri = np.array([[0, 0], [1 / 6, 0], [1 / 6, 1 / 12], [0, 0]])
    ax.plot(tri[:, 0], tri[:, 1], color="0.3")
    for lab, (x1, x2, n) in points.items():
        ax.scatter([x1], [x2], s=40 + 30 * n, zorder=3)
        ax.annotate(f"{lab}: {n}", (x1, x2), textcoords="offset points", xytext=(5, 5), fontsize=8)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_xlim(-0.01, 0.19)
    ax.set_ylim(-0.01, 0.095)
    ax.set_title(title, fontsize=9)
    return _save(fig, path)


def candidate_bars(counts: dict, path, title: str = "") -> Path:
    labels = list(counts)
    fig, ax = plt.subplots(figsize=(max(4, 0.5 * len(labels) + 1), 3))
    ax.bar(range(len(labels)), [counts[k] for k in labels], color="tab:blue")
    ax.set_xticks(range(len(labels)), labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("third bases")
    ax.set_title(title, fontsize=9)
    return _save(fig, path)


def estimate_plot(rows: list[dict], path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(4, 3))
    ns = [r["n"] for r in rows]
    ax.errorbar(ns, [r["mean"] for r in rows], yerr=[4 * r["stderr"] for r in rows], fmt="o", label="estimate")
    grid = np.linspace(min(ns), max(ns), 50)
    ax.plot(grid, grid / (grid + 1), "--", color="0.4", label="N/(N+1)")
    ax.set_xlabel("N")
    ax.set_ylabel("mean distance to 1")
    ax.legend(fontsize=8)
    ax.set_title(title, fontsize=9)
    return _save(fig, path)
