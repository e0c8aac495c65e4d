"""Figure rendering. Every figure is a pure function of its input files;
nothing here recomputes model statistics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import io
from .errors import SchemaMismatchError

KIND_MARGINS = "margins"
KIND_ERRORS = "errors"
KIND_PENALTY = "penalty"
KIND_STAGED = "staged"
KIND_HISTOGRAM = "histogram"
KINDS = (KIND_MARGINS, KIND_ERRORS, KIND_PENALTY, KIND_STAGED, KIND_HISTOGRAM)

# penalty.csv column to plot, selectable from the CLI
PENALTY_COLUMNS = ("theta2_penalty", "capital_N", "capital_N_full")


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: tuple[tuple[str, str], ...]  # (label, path) pairs; empty label -> auto
    output: str
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""
    log_y: bool | None = None  # None -> per-kind default
    penalty_column: str = "capital_N"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaMismatchError(f"unknown plot kind {self.kind!r}")
        if not self.inputs:
            raise SchemaMismatchError("at least one input file is required")
        if self.penalty_column not in PENALTY_COLUMNS:
            raise SchemaMismatchError(f"unknown penalty column {self.penalty_column!r}")

    def labeled_inputs(self):
        return [
            (label if label else io.label_for(path), path) for label, path in self.inputs
        ]


def _finish(ax, spec: PlotSpec, default_x: str, default_y: str, legend=True):
    ax.set_xlabel(spec.xlabel or default_x)
    ax.set_ylabel(spec.ylabel or default_y)
    if spec.title:
        ax.set_title(spec.title)
    if legend:
        ax.legend()
    ax.grid(True, alpha=0.3)


def _render_margins(ax, spec: PlotSpec):
    for label, path in spec.labeled_inputs():
        margins = io.read_margins(path)
        quantiles = np.arange(1, len(margins) + 1) / len(margins)
        ax.plot(quantiles, margins, label=label)
    ax.set_ylim(-1.05, 1.05)
    _finish(ax, spec, "fraction of training points", "sorted margin values")


def _render_errors(ax, spec: PlotSpec):
    for label, path in spec.labeled_inputs():
        table = io.read_errors(path)
        ax.plot(table["round"], table["train_error"], label=f"{label} train")
        ax.plot(table["round"], table["test_error"], linestyle="--", label=f"{label} test")
    _finish(ax, spec, "boosting round", "0-1 error")


def _render_penalty(ax, spec: PlotSpec):
    for label, path in spec.labeled_inputs():
        table = io.read_penalty(path)
        # NaNs from undefined penalties break the line into segments
        ax.plot(table["p"], table[spec.penalty_column], label=label)
    if spec.log_y is not False:
        ax.set_yscale("log")
    _finish(ax, spec, "margin quantile p", f"generalization penalty ({spec.penalty_column})")


def _render_staged(ax, spec: PlotSpec):
    for label, path in spec.labeled_inputs():
        table = io.read_staged(path)
        for stage in np.unique(table["stage"]):
            mask = table["stage"] == stage
            margins = table["margin"][mask]
            quantiles = np.arange(1, mask.sum() + 1) / mask.sum()
            ax.plot(quantiles, margins, label=f"{label} round {int(stage)}")
    ax.set_ylim(-1.05, 1.05)
    _finish(ax, spec, "fraction of training points", "sorted margin values")


def extreme_fraction(left, right, counts, cut: float = 0.95) -> float:
    """Fraction of mass in bins lying entirely at or beyond +-cut, straight
    from the stored counts."""
    left = np.asarray(left)
    right = np.asarray(right)
    counts = np.asarray(counts)
    total = counts.sum()
    if total == 0:
        return 0.0
    return float(counts[(left >= cut) | (right <= -cut)].sum() / total)


def _render_histogram(ax, spec: PlotSpec):
    (label, path), *rest = spec.labeled_inputs()
    if rest:
        raise SchemaMismatchError("histogram plots take exactly one input file")
    table = io.read_histogram(path)
    left, right, counts = table["bin_left"], table["bin_right"], table["count"]
    if np.any(np.isnan(counts)):
        raise SchemaMismatchError(f"{path}: histogram counts must be defined")
    ax.bar(left, counts, width=right - left, align="edge", label=label)
    fraction = extreme_fraction(left, right, counts)
    ax.annotate(
        f"|prediction| ≥ 0.95: {fraction:.4f}",
        xy=(0.02, 0.95),
        xycoords="axes fraction",
        va="top",
    )
    _finish(ax, spec, "ensemble prediction", "count", legend=False)


_RENDERERS = {
    KIND_MARGINS: _render_margins,
    KIND_ERRORS: _render_errors,
    KIND_PENALTY: _render_penalty,
    KIND_STAGED: _render_staged,
    KIND_HISTOGRAM: _render_histogram,
}


def render(spec: PlotSpec) -> str:
    """Render the figure described by `spec` and write it to spec.output.

    Returns the output path. Raises MissingFileError or SchemaMismatchError
    before any file is written if an input is absent or malformed.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    try:
        _RENDERERS[spec.kind](ax, spec)
        fig.savefig(spec.output, dpi=120)
    finally:
        plt.close(fig)
    return spec.output
