"""Deterministic matplotlib rendering for hulls and verification runs.

Everything renders through the Agg backend to plain files; no display is
ever opened.  Styling is fixed (colors, sizes, dpi, metadata) so repeated
runs of the same input produce the same image files.
"""

from __future__ import annotations

import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import UsageError
from .newton import newton_polygon, valuation_profile
from .padic import Infinity, format_rational, ord_int
from .polynomial import SparsePoly

__all__ = ["hull_figure", "report_summary_figure", "save_figure"]

_DPI = 150
_POINT_COLOR = "#444444"
_HULL_COLOR = "#1f77b4"
_BAR_EMPIRICAL = "#1f77b4"
_BAR_BOUND = "#d62728"


def hull_figure(f: SparsePoly, p: int):
    """Coefficient valuation points with the lower hull and edge slopes.

    Every nonzero coefficient contributes a point (exponent, valuation);
    hull edges are drawn with their slope annotated, since each slope -v
    of width w certifies w roots of valuation v.
    """
    if f.is_zero:
        raise UsageError("cannot draw the hull of the zero polynomial")
    hull = newton_polygon(f, p)
    profile = valuation_profile(f, p)
    points = []
    for e, c in sorted(f.terms().items()):
        v = ord_int(c, p)
        if not isinstance(v, Infinity):
            points.append((e, v))

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(
        [a for a, _ in points],
        [float(v) for _, v in points],
        "o",
        color=_POINT_COLOR,
        markersize=5,
        label="coefficient valuation",
    )
    xs = [a for a, _ in hull.vertices]
    ys = [float(v) for _, v in hull.vertices]
    ax.plot(xs, ys, "-o", color=_HULL_COLOR, markersize=7, fillstyle="none", label="lower hull")
    for (a0, v0), (a1, v1), slope, _width in hull.edges():
        ax.annotate(
            f"slope {format_rational(slope)}",
            xy=((a0 + a1) / 2, (float(v0) + float(v1)) / 2),
            textcoords="offset points",
            xytext=(6, 6),
            fontsize=8,
            color=_HULL_COLOR,
        )
    parts = []
    if profile.zero_multiplicity:
        parts.append(f"0 as root x{profile.zero_multiplicity}")
    parts.extend(
        f"valuation {format_rational(v)} x{m}" for v, m in profile.pairs
    )
    ax.set_title(f"coefficient valuations at p={p}" + ("; " + ", ".join(parts) if parts else ""), fontsize=9)
    ax.set_xlabel("exponent")
    ax.set_ylabel(f"ord_{p}(coefficient)")
    ax.grid(True, linewidth=0.3, alpha=0.5)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def report_summary_figure(reports: Sequence):
    """Worst empirical count against smallest bound, per bound key.

    Bars show log10(1 + value) so counts of 0 and bounds in the hundreds
    of thousands share one panel; true values are printed on the bars.
    """
    reports = [r for r in reports if not r.degenerate]
    if not reports:
        raise UsageError("no non-degenerate reports to summarize")
    keys = [row.key for row in reports[0].rows]
    worst_emp = {k: 0 for k in keys}
    least_bound: dict = {k: None for k in keys}
    violations = 0
    for rep in reports:
        violations += len(rep.violations)
        for row in rep.rows:
            worst_emp[row.key] = max(worst_emp[row.key], row.empirical)
            if row.bound.domain_ok:
                b = least_bound[row.key]
                least_bound[row.key] = row.bound.value if b is None else min(b, row.bound.value)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    xs = range(len(keys))
    emp_h = [math.log10(1 + worst_emp[k]) for k in keys]
    bound_h = [
        0 if least_bound[k] is None else math.log10(1 + least_bound[k]) for k in keys
    ]
    ax.bar([x - 0.2 for x in xs], emp_h, width=0.4, color=_BAR_EMPIRICAL, label="max empirical")
    ax.bar([x + 0.2 for x in xs], bound_h, width=0.4, color=_BAR_BOUND, label="min bound")
    for x, k in zip(xs, keys):
        ax.text(x - 0.2, emp_h[x], str(worst_emp[k]), ha="center", va="bottom", fontsize=8)
        label = "-" if least_bound[k] is None else str(least_bound[k])
        ax.text(x + 0.2, bound_h[x], label, ha="center", va="bottom", fontsize=8)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(keys, fontsize=9)
    ax.set_ylabel("log10(1 + value)")
    ax.set_title(
        f"{len(reports)} reports, {violations} violations", fontsize=10
    )
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def save_figure(fig, path: str) -> None:
    """Write one figure to a file with fixed dpi and stable metadata."""
    fig.savefig(path, dpi=_DPI, metadata={"Software": "padicroots"})
    plt.close(fig)
