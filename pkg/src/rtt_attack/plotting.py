"""Figure rendering for the experiment drivers.

Each driver's CSV gets a PNG next to it. Rendering is byte-deterministic
for a fixed matplotlib install, so figures participate in the run-twice
reproducibility guarantee like every other output file.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SAVE_KWARGS = {"dpi": 150, "metadata": {"Software": None}}


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return path


def plot_rtt_eval(rows: list[list], path: Path) -> Path:
    """Y(k): fraction of successes undone by at least k languages."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if rows:
        ks = [int(r[1]) for r in rows]
        ys = [float(r[2]) for r in rows]
        ax.plot(ks, ys, marker="o", color="#1f77b4", label=rows[0][0])
        ax.set_xticks(ks)
        ax.legend()
    ax.set_xlabel("k (languages)")
    ax.set_ylabel("fraction of examples undone")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title("Round-trip translation vs adversarial examples")
    return _save(fig, path)


def plot_sweep(rows: list[list], path: Path) -> Path:
    """Robust success count as the replacement limit grows."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if rows:
        limits = [int(r[0]) for r in rows]
        counts = [int(r[1]) for r in rows]
        ax.plot(limits, counts, marker="s", color="#2ca02c")
        ax.set_xticks(limits)
    ax.set_xlabel("replacement limit")
    ax.set_ylabel("robust successes")
    ax.set_title("Replacement limit vs robust examples")
    return _save(fig, path)


def plot_ablation(rows: list[list], path: Path) -> Path:
    """Survival on the held-out language, with and without the RTT filter."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if rows:
        labels = [f"{r[0]}\nunseen {r[1]}" for r in rows]
        with_rates = [float(r[2]) if r[2] else 0.0 for r in rows]
        without_rates = [float(r[3]) if r[3] else 0.0 for r in rows]
        xs = range(len(rows))
        width = 0.38
        ax.bar([x - width / 2 for x in xs], with_rates, width, label="with RTT filter",
               color="#1f77b4")
        ax.bar([x + width / 2 for x in xs], without_rates, width, label="without",
               color="#d62728")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(labels, fontsize=8)
        ax.legend()
    ax.set_ylabel("% successes surviving unseen language")
    ax.set_ylim(0, 105)
    ax.set_title("Generalization to an unseen language")
    return _save(fig, path)


def plot_summary(header: list[str], rows: list[list], path: Path, title: str = "") -> Path:
    """Per-arm success and mean quality metrics from an attack run."""
    fig, ax = plt.subplots(figsize=(7, 4))
    metric_cols = ["success_rate", "mean_jaccard", "mean_encoder_similarity", "mean_bleu"]
    indices = [header.index(c) for c in metric_cols]
    width = 0.8 / max(len(rows), 1)
    for r_idx, row in enumerate(rows):
        values = []
        for col, idx in zip(metric_cols, indices):
            raw = row[idx]
            value = float(raw) if raw else 0.0
            if col != "success_rate":
                value *= 100.0  # similarity metrics on the same 0-100 axis
            values.append(value)
        xs = [i + r_idx * width for i in range(len(metric_cols))]
        ax.bar(xs, values, width, label=row[0])
    ax.set_xticks([i + width * (len(rows) - 1) / 2 for i in range(len(metric_cols))])
    ax.set_xticklabels(["success %", "jaccard x100", "encoder sim x100", "bleu x100"],
                       fontsize=8)
    ax.set_ylim(0, 105)
    ax.legend()
    ax.set_title(f"Attack summary: {title}" if title else "Attack summary")
    return _save(fig, path)
