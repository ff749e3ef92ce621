"""Figure rendering from a metrics CSV.

The bench path deliberately emits only delimited text; this module turns a
metrics file into the standard set of PNG figures next to it: improvement
profiles per objective, convergence example counts, phase-ablation
comparisons, and optimization overhead against baseline synthesis time.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["read_metrics", "render_report"]


def read_metrics(path: str | Path) -> list[dict[str, str]]:
    with Path(path).open(encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


def _floats(rows, column):
    out = []
    for row in rows:
        cell = row.get(column, "")
        if cell:
            out.append(float(cell))
    return out


def _new_axes(title: str, xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(5.0, 3.4), dpi=130)
    ax.set_title(title, fontsize=10)
    ax.set_xlabel(xlabel, fontsize=9)
    ax.set_ylabel(ylabel, fontsize=9)
    ax.tick_params(labelsize=8)
    ax.grid(True, alpha=0.3, linewidth=0.5)
    return fig, ax


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _improvement_profile(rows, objective, out_dir: Path) -> Path | None:
    ratios = sorted(
        _floats([r for r in rows if r["objective"] == objective], "improvement_ratio")
    )
    if not ratios:
        return None
    fig, ax = _new_axes(
        f"Improvement over baseline ({objective})", "task (sorted)", "cost ratio o-base / o-final"
    )
    ax.step(range(1, len(ratios) + 1), ratios, where="mid")
    ax.axhline(1.0, color="gray", linewidth=0.8, linestyle="--")
    if max(ratios) / max(min(ratios), 1e-9) > 50:
        ax.set_yscale("log")
    return _save(fig, out_dir / f"improvement_{objective}.png")


def _ablation_scatter(rows, objective, skipped: str, out_dir: Path) -> Path | None:
    sub = [r for r in rows if r["objective"] == objective]
    col = {"2": "o13", "3": "o12"}[skipped]
    xs, ys = [], []
    for row in sub:
        if row.get(col) and row.get("o123"):
            xs.append(-float(row[col]))
            ys.append(-float(row["o123"]))
    if not xs:
        return None
    fig, ax = _new_axes(
        f"Skipping phase {skipped} ({objective})",
        f"cost of p1{'3' if skipped == '2' else '2'}",
        "cost of p123",
    )
    ax.scatter(xs, ys, s=14, alpha=0.7)
    lim = max(max(xs), max(ys)) * 1.1
    ax.plot([0, lim], [0, lim], color="gray", linewidth=0.8, linestyle="--")
    return _save(fig, out_dir / f"ablation_phase{skipped}_{objective}.png")


def _examples_scatter(rows, out_dir: Path) -> Path | None:
    xs, ys = [], []
    for row in rows:
        if row.get("e1") and row.get("e2"):
            xs.append(int(row["e1"]))
            ys.append(int(row["e2"]))
    if not xs:
        return None
    fig, ax = _new_axes("Examples to converge", "e1 (intent ranker)", "e2 (cost ranker)")
    ax.scatter(xs, ys, s=14, alpha=0.7)
    lim = max(max(xs), max(ys)) + 1
    ax.plot([0, lim], [0, lim], color="gray", linewidth=0.8, linestyle="--")
    ax.set_xlim(0, lim)
    ax.set_ylim(0, lim)
    return _save(fig, out_dir / "examples_to_converge.png")


def _overhead_scatter(rows, out_dir: Path) -> Path | None:
    xs, ys = [], []
    for row in rows:
        if row.get("t_pbe_ms") and row.get("t_opt_ms"):
            xs.append(float(row["t_pbe_ms"]))
            ys.append(float(row["t_opt_ms"]))
    if not xs:
        return None
    fig, ax = _new_axes("Optimization overhead", "t_pbe (ms)", "t_opt (ms)")
    ax.scatter(xs, ys, s=14, alpha=0.7)
    lim = max(max(xs), max(ys)) * 1.2
    ax.plot([0.01, lim], [0.01, lim], color="gray", linewidth=0.8, linestyle="--")
    ax.set_xscale("log")
    ax.set_yscale("log")
    return _save(fig, out_dir / "overhead.png")


def render_report(metrics_path: str | Path, out_dir: str | Path) -> list[Path]:
    """Render all figures for a metrics file; returns the written paths."""
    rows = read_metrics(metrics_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    objectives = sorted({r["objective"] for r in rows if r.get("objective")})
    for objective in objectives:
        written.append(_improvement_profile(rows, objective, out))
        written.append(_ablation_scatter(rows, objective, "2", out))
        written.append(_ablation_scatter(rows, objective, "3", out))
    written.append(_examples_scatter(rows, out))
    written.append(_overhead_scatter(rows, out))
    return [p for p in written if p is not None]
