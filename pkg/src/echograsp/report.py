"""Figure rendering for experiment results.

Writes PNG files next to the delimited output: time distributions per
subject, learning curves over trial index, and success rates.  Uses the
Agg backend so it works headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import MOVING_AVERAGE_WINDOW, TrialRecord, moving_average

T1_COLOR = "#2a9d4e"
T2_COLOR = "#2a6fbd"


def _by_subject(records: Sequence[TrialRecord]) -> dict[str, list[TrialRecord]]:
    out: dict[str, list[TrialRecord]] = {}
    for r in records:
        out.setdefault(r.subject_id, []).append(r)
    for recs in out.values():
        recs.sort(key=lambda r: r.trial_index)
    return out


def plot_time_distributions(records: Sequence[TrialRecord], path: Path) -> None:
    """Side-by-side box plots of reach and alignment durations per subject."""
    groups = _by_subject(records)
    sids = sorted(groups)
    t1 = [[r.t1_s for r in groups[s]] for s in sids]
    t2 = [[r.t2_s for r in groups[s]] for s in sids]
    fig, ax = plt.subplots(figsize=(max(6, 1.6 * len(sids)), 4.5))
    pos = range(len(sids))
    b1 = ax.boxplot(
        t1, positions=[p - 0.18 for p in pos], widths=0.3, patch_artist=True,
        boxprops={"facecolor": T1_COLOR, "alpha": 0.6},
    )
    b2 = ax.boxplot(
        t2, positions=[p + 0.18 for p in pos], widths=0.3, patch_artist=True,
        boxprops={"facecolor": T2_COLOR, "alpha": 0.6},
    )
    ax.set_xticks(list(pos))
    ax.set_xticklabels(sids)
    ax.set_xlabel("subject")
    ax.set_ylabel("seconds")
    ax.set_title("reach (t1) and alignment (t2) durations")
    ax.legend([b1["boxes"][0], b2["boxes"][0]], ["t1 reach", "t2 alignment"], loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_learning_curves(records: Sequence[TrialRecord], path: Path) -> None:
    """Moving-average durations across trial index, one line per subject."""
    groups = _by_subject(records)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    for sid, recs in sorted(groups.items()):
        idx = [r.trial_index for r in recs]
        ax1.plot(idx, moving_average([r.t1_s for r in recs]), label=sid, linewidth=1.4)
        ax2.plot(idx, moving_average([r.t2_s for r in recs]), label=sid, linewidth=1.4)
    ax1.set_title(f"t1 reach, {MOVING_AVERAGE_WINDOW}-trial moving avg")
    ax2.set_title(f"t2 alignment, {MOVING_AVERAGE_WINDOW}-trial moving avg")
    for ax in (ax1, ax2):
        ax.set_xlabel("trial")
        ax.set_ylabel("seconds")
    ax1.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_success_rates(records: Sequence[TrialRecord], path: Path) -> None:
    groups = _by_subject(records)
    sids = sorted(groups)
    rates = [sum(1 for r in groups[s] if r.success) / len(groups[s]) for s in sids]
    fig, ax = plt.subplots(figsize=(max(5, 1.2 * len(sids)), 4))
    ax.bar(sids, rates, color=T1_COLOR, alpha=0.8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("success rate")
    ax.set_xlabel("subject")
    ax.set_title("grasp success rate")
    for i, rate in enumerate(rates):
        ax.text(i, rate + 0.02, f"{rate:.2f}", ha="center", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report(records: Sequence[TrialRecord], out_dir: str | Path) -> list[Path]:
    """Render the standard figure set; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not records:
        return []
    paths = [
        out / "times_distribution.png",
        out / "times_trend.png",
        out / "success_rate.png",
    ]
    plot_time_distributions(records, paths[0])
    plot_learning_curves(records, paths[1])
    plot_success_rates(records, paths[2])
    return paths
