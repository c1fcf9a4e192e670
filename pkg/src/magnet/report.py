"""Figure rendering for the report paths (training history, ablation table)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_history_figure(history, path: str | Path):
    """Loss curves plus the learning-rate schedule, one PNG."""
    epochs = [h.epoch for h in history]
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(epochs, [h.train_loss for h in history], marker="o", label="train loss")
    ax.plot(epochs, [h.val_loss for h in history], marker="s", label="validation loss")
    ax.set_xlabel("epoch")
    ax.set_ylabel("MSE loss")
    ax.set_xticks(epochs)
    ax.grid(alpha=0.3)
    ax2 = ax.twinx()
    ax2.plot(epochs, [h.lr for h in history], color="gray", linestyle="--", label="lr")
    ax2.set_ylabel("learning rate")
    ax2.set_yscale("log")
    lines1, labels1 = ax.get_legend_handles_labels()
    lines2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(lines1 + lines2, labels1 + labels2, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_ablation_figure(rows, path: str | Path):
    """Horizontal F1 bar chart, one bar per ablation variant."""
    names = [r.name for r in rows]
    f1s = [r.metrics.f1 for r in rows]
    fig, ax = plt.subplots(figsize=(8, 0.45 * len(rows) + 1.5))
    ypos = range(len(rows))
    ax.barh(ypos, f1s, color="steelblue")
    ax.set_yticks(ypos)
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("F1 on held-out pairs")
    ax.set_xlim(0.0, 1.0)
    for y, f1 in zip(ypos, f1s):
        ax.text(min(f1 + 0.01, 0.98), y, f"{f1:.3f}", va="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
