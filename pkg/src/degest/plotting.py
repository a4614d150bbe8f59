"""File-only plot output for trial batches and scaling sweeps.

Every figure goes to disk (Agg backend, no display), and each plot is
paired with a plain-text .dat table of the numbers behind it, one
header comment line then whitespace-separated columns.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_xy_dat", "plot_trials", "plot_scaling"]


def save_xy_dat(path, header, rows) -> Path:
    """Write a gnuplot-style table: '# col ...' then one row per line."""
    path = Path(path)
    lines = ["# " + " ".join(str(h) for h in header)]
    for row in rows:
        lines.append(" ".join(str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def plot_trials(report, out_prefix) -> tuple:
    """Histogram of estimate/truth ratios with the target band marked.

    Writes <prefix>.dat (per-trial ratios) and <prefix>.png; returns
    both paths.  Failed trials appear in the .dat with an empty ratio.
    """
    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    rows = []
    ratios = []
    for i, r in enumerate(report.records):
        if r.d_hat is None:
            rows.append((i, r.seed, "", r.path))
        else:
            ratio = float(r.d_hat / report.d_true)
            ratios.append(ratio)
            rows.append((i, r.seed, repr(ratio), r.path))
    dat = save_xy_dat(
        prefix.with_suffix(".dat"), ["trial", "seed", "ratio", "path"], rows
    )

    fig, ax = plt.subplots(figsize=(6, 4))
    if ratios:
        ax.hist(ratios, bins=min(40, max(10, len(ratios) // 5)), color="#4878d0")
    for x, style in ((1 - report.epsilon, "--"), (1.0, "-"), (1 + report.epsilon, "--")):
        ax.axvline(x, color="black", linestyle=style, linewidth=1)
    ax.set_xlabel("estimate / true average degree")
    ax.set_ylabel("trials")
    ax.set_title(
        f"{report.instance_id}: {report.successes}/{report.trials} in band, "
        f"eps={report.epsilon}"
    )
    fig.tight_layout()
    png = prefix.with_suffix(".png")
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return dat, png


def plot_scaling(report, out_prefix) -> tuple:
    """Log-log cost plot for a sweep, with the fitted slope drawn in.

    Writes <prefix>.dat and <prefix>.png; returns both paths.
    """
    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    rows = [
        (
            p.x,
            repr(p.mean_degree_queries),
            repr(p.mean_rand_edge),
            repr(p.mean_tau_used),
            p.trials,
            p.successes,
        )
        for p in report.points
    ]
    dat = save_xy_dat(
        prefix.with_suffix(".dat"),
        ["x", "mean_degree_queries", "mean_rand_edge", "mean_tau_used", "trials", "successes"],
        rows,
    )

    xs = np.array([p.x for p in report.points], dtype=float)
    ys = np.array([p.mean_degree_queries for p in report.points], dtype=float)
    es = np.array([p.mean_rand_edge for p in report.points], dtype=float)
    fit_x = xs if report.sweep == "alpha" else 1 / xs
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(xs, ys, "o-", base=2, label="degree queries")
    ax.loglog(xs, es, "s--", base=2, label="rand_edge queries")
    anchor = ys[0] / fit_x[0] ** report.exponent_raw
    ax.loglog(
        xs,
        anchor * fit_x**report.exponent_raw,
        ":",
        base=2,
        color="gray",
        label=f"slope {report.exponent_raw:.2f}",
    )
    ax.set_xlabel(report.sweep)
    ax.set_ylabel("mean queries per trial")
    ax.set_title(
        f"{report.sweep} sweep: raw {report.exponent_raw:.2f}, "
        f"corrected {report.exponent_corrected:.2f}"
    )
    ax.legend()
    fig.tight_layout()
    png = prefix.with_suffix(".png")
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return dat, png
