"""Figures written next to the CSV/JSON artifacts (Agg backend, no display)."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_delta_series(series: Sequence, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for s in series:
        ax.plot(s.radii, [float(v) for v in s.values()], marker="o", label=f"{s.label} ({s.verdict})")
    ax.set_xlabel("radius r")
    ax.set_ylabel("delta")
    ax.set_title(title or "four-point delta of finite balls")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_sizes(rows: Sequence[dict], path, x: str, ys: Sequence[str], group: str, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    names = sorted({r[group] for r in rows}, key=lambda n: [r[group] for r in rows].index(n))
    for name in names:
        sel = [r for r in rows if r[group] == name]
        for y in ys:
            ax.plot([r[x] for r in sel], [r[y] for r in sel], marker="o", label=f"{name}: {y}")
    ax.set_xlabel(x)
    ax.set_yscale("log")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7)
    return _save(fig, path)


def plot_pieces(rows: Sequence[dict], path, title: str = "") -> Path:
    """Pieces k against cycle length l, with the bound L l + n of each row."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in sorted({r["group"] for r in rows}):
        sel = [r for r in rows if r["group"] == name]
        ax.scatter([r["l"] for r in sel], [r["k"] for r in sel], label=f"{name}: k", s=18)
        ax.scatter([r["l"] for r in sel], [float(Fraction(r["bound"])) for r in sel], marker="_", s=60, label=f"{name}: L l + n")
    ax.set_xlabel("cycle length l")
    ax.set_ylabel("pieces k")
    ax.set_title(title or "pinch decompositions")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7)
    return _save(fig, path)
