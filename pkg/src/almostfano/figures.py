"""Scatter plot of a table: one point per row, coloured by status."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .tables import Table  # noqa: E402

COLOURS = {"+": "tab:green", "?": "tab:orange", "x": "tab:red", "": "tab:gray"}
LABELS = {"+": "exists", "?": "open", "x": "excluded", "": "candidate"}


def _second_axis(table: Table) -> str:
    for col in ("kf2", "tau", "alpha_plus", "alpha", "r_x"):
        if col in table.columns:
            return col
    return "no"


def plot_table(table: Table, path) -> Path:
    """Write a PNG (or whatever the suffix says) and return its path.

    The x axis is (-K)^3; the y axis is the first of kf2, tau, alpha+,
    alpha present in the table, with a small offset to separate ties.
    """
    ycol = _second_axis(table)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    seen: dict[tuple[float, float], int] = {}
    by_flag: dict[str, list[tuple[float, float]]] = {}
    for no, rec in enumerate(table.records, 1):
        x = float(rec.get("k3"))
        y = float(no if ycol == "no" else _num(rec.get(ycol)))
        bump = seen.get((x, y), 0)
        seen[(x, y)] = bump + 1
        by_flag.setdefault(rec.flag, []).append((x + 0.25 * bump, y))
    for flag, pts in sorted(by_flag.items()):
        xs, ys = zip(*pts)
        ax.scatter(xs, ys, c=COLOURS.get(flag, "black"), label=LABELS.get(flag, flag), s=40)
    ax.set_xlabel("(-K)^3")
    ax.set_ylabel(ycol)
    ax.set_title(f"{table.name} ({len(table)} rows)")
    if by_flag:
        ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _num(text: str) -> float:
    if not text:
        return 0.0
    num, _, den = text.partition("/")
    return int(num) / int(den or 1)
