"""Report figures rendered alongside the delimited outputs."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be set first
import numpy as np  # noqa: E402


def training_curves(metrics_path, out_path):
    """Episode return and evaluation success over environment steps."""
    rows = np.genfromtxt(metrics_path, delimiter=",", names=True)
    rows = np.atleast_1d(rows)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(rows["step"], rows["episode_return"], ".", markersize=3,
             alpha=0.6)
    ax1.set_ylabel("episode return")
    keep = np.isfinite(rows["eval_success_rate"])
    ax2.plot(rows["step"][keep], rows["eval_success_rate"][keep], "o-")
    ax2.set_ylim(-0.05, 1.05)
    ax2.set_xlabel("environment step")
    ax2.set_ylabel("eval success rate")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return Path(out_path)


def eval_bars(report, out_path):
    """Success rate per (view, cable size) setting."""
    labels = [f"{r['view']}\n{r['size']}" for r in report.rows]
    rates = [r["success_rate"] for r in report.rows]
    fig, ax = plt.subplots(figsize=(1.2 + 1.3 * len(labels), 4))
    ax.bar(range(len(labels)), rates, color="#4878d0")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("success rate")
    for i, rate in enumerate(rates):
        ax.text(i, rate + 0.02, f"{rate:.2f}", ha="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return Path(out_path)


def segmentation_histogram(scores, out_path, threshold=None):
    """Distribution of per-scene mIoU for each class."""
    fig, ax = plt.subplots(figsize=(6, 4))
    bins = np.linspace(0, 1, 21)
    for cls, values in scores.items():
        ax.hist(values, bins=bins, alpha=0.6, label=cls)
    if threshold is not None:
        ax.axvline(threshold, color="red", linestyle="--", linewidth=1)
    ax.set_xlabel("mIoU")
    ax.set_ylabel("scenes")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return Path(out_path)
