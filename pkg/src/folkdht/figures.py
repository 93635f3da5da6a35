"""Figure rendering for the report commands.

Each helper draws one PNG next to the delimited output it illustrates.
The CSVs stay the primary data product; these are quick-look views.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_DPI = 130


def save_cdf_figure(
    series_by_label: dict[str, list[tuple[float, float]]],
    path: str | Path,
    xlabel: str,
    title: str,
    log_x: bool = False,
) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, series in series_by_label.items():
        if not series:
            continue
        xs = [v for v, _ in series]
        ys = [f for _, f in series]
        ax.step(xs, ys, where="post", label=label)
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("cumulative fraction")
    ax.set_ylim(0.0, 1.02)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if len(series_by_label) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_comparison_figure(
    rows: list[tuple[int | str, "object"]], path: str | Path
) -> None:
    """Recall and agreement metrics against the fan-out bound."""
    labels = [str(k) for k, _ in rows]
    xs = range(len(rows))
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for attr, label in [
        ("recall", "recall"),
        ("ktau_mu", "rank agreement (mean)"),
        ("theta_mu", "cosine (mean)"),
        ("sim1_mu", "weight-1 share of missing (mean)"),
    ]:
        ax.plot(list(xs), [getattr(c, attr) for _, c in rows], marker="o", label=label)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_xlabel("k")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("approximation quality by fan-out bound")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
