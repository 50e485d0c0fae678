"""Report figures rendered next to the delimited artifacts.

Kept separate so the core stays importable without matplotlib loaded;
everything here writes PNG files and returns the path written.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .types import candidate_label

_BAR = "#3b6ea5"
_BAR_ALT = "#c4762c"


def _labels(keys: list[tuple[int, int]]) -> list[str]:
    return [f"{contest}:{candidate_label(code)}" for contest, code in keys]


def render_tally_figure(
    tallies: dict[tuple[int, int], int], title: str, path: str | Path
) -> Path:
    """Bar chart of confirmed votes per (contest, candidate)."""
    path = Path(path)
    keys = sorted(tallies)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * len(keys) + 2), 3.5))
    ax.bar(range(len(keys)), [tallies[k] for k in keys], color=_BAR)
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels(_labels(keys), rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("confirmed votes")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_comparison_figure(
    sela: dict[tuple[int, int], int],
    bu: dict[tuple[int, int], int],
    verdict: str,
    path: str | Path,
) -> Path:
    """Side-by-side bars: device counters vs boletim de urna."""
    path = Path(path)
    keys = sorted(set(sela) | set(bu))
    xs = range(len(keys))
    width = 0.4
    fig, ax = plt.subplots(figsize=(max(4.0, 0.7 * len(keys) + 2), 3.5))
    ax.bar([x - width / 2 for x in xs], [sela.get(k, 0) for k in keys],
           width, label="device export", color=_BAR)
    ax.bar([x + width / 2 for x in xs], [bu.get(k, 0) for k in keys],
           width, label="boletim de urna", color=_BAR_ALT)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(_labels(keys), rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("votes")
    ax.set_title(f"tally comparison ({verdict})")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
