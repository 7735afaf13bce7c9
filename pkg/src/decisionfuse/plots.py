"""Figure rendering for simulation summaries.

Reads the plot-ready summary table and draws one figure per metric: mean
FDP and mean ETP against the swept grid value, one line per method with
standard-error bars. Output is written next to the delimited tables.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_METRICS = (
    ("mean_fdp", "se_fdp", "Mean FDP", "fdp.png"),
    ("mean_etp", "se_etp", "Mean ETP", "etp.png"),
)


def render_summary(rows: list[dict], output_dir: str, grid_label: str = "grid value",
                   alpha_line: float | None = None) -> list[str]:
    """Render FDP and ETP figures from summary rows; returns written paths."""
    os.makedirs(output_dir, exist_ok=True)
    methods = sorted({row["method"] for row in rows})
    written = []
    for key, se_key, ylabel, filename in _METRICS:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for method in methods:
            pts = sorted((r["grid_value"], r[key], r[se_key])
                         for r in rows if r["method"] == method)
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            es = [p[2] for p in pts]
            ax.errorbar(xs, ys, yerr=es, marker="o", capsize=3, label=method)
        if key == "mean_fdp" and alpha_line is not None:
            ax.axhline(alpha_line, color="grey", linestyle="--", linewidth=1)
        ax.set_xlabel(grid_label)
        ax.set_ylabel(ylabel)
        ax.legend()
        fig.tight_layout()
        path = os.path.join(output_dir, filename)
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
