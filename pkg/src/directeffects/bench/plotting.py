"""Four-panel SVG figures from a summary table.

Panels: true finds (top left), perfect finds (top right), false finds on a
log axis (bottom left) and FDR (bottom right). One series per method with
+/- one standard error bars.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..errors import UsageError  # noqa: E402
from .config import method_name  # noqa: E402
from .runner import read_summary  # noqa: E402

COLORS = {
    "fisher": "grey",
    "det": "black",
    "lasso": "blue",
    "enet": "lightskyblue",
    "screen_clean": "green",
    "stability": "purple",
}
LABELS = {
    "fisher": "Fisher",
    "det": "DET",
    "lasso": "lasso",
    "enet": "elastic net",
    "screen_clean": "screen and clean",
    "stability": "stability selection",
}
PANELS = (
    ("true_finds", "true finds", False),
    ("perfect_find", "perfect finds", False),
    ("false_finds", "false finds", True),
    ("fdr", "FDR", False),
)
SWEEPABLE = ("rho", "n", "k", "p", "effect")
AXIS_LABELS = {"rho": "correlation", "n": "sample size n", "k": "cluster size k", "p": "predictors p",
               "effect": "effect size"}


@dataclass
class FigureSpec:
    """What to draw. ``x=None`` picks the single swept grid parameter;
    ``methods=None`` draws every method found in the summary."""

    x: str | None = None
    scoring: str = "strict"
    methods: tuple | None = None
    title: str | None = None
    prefix: str = "figure"


def _num(v):
    return float(v) if v not in ("", None) else float("nan")


def _swept(rows):
    return [f for f in SWEEPABLE if len({r[f] for r in rows}) > 1]


def _style(method):
    base = method_name(method)
    label = LABELS[base] if method == base else f"{LABELS[base]} ({method[len(base) + 1:]})"
    return COLORS[base], label


def plot(summary, out_dir, spec: FigureSpec | None = None):
    """Write one SVG per grid and return the list of paths.

    ``summary`` is a summary CSV path or a list of summary rows. Rows are
    grouped by every non-swept grid field, so a summary holding several
    grids yields several figures. The results store is never touched.
    """
    spec = spec or FigureSpec()
    rows = read_summary(summary) if isinstance(summary, (str, Path)) else list(summary)
    if not rows:
        raise UsageError("summary is empty; nothing to plot")
    rows = [r for r in rows if r["scoring"] == spec.scoring]
    if not rows:
        raise UsageError(f"summary has no rows with scoring={spec.scoring!r}")
    if spec.x is not None and spec.x not in SWEEPABLE:
        raise UsageError(f"x must be one of {SWEEPABLE}")
    swept = _swept(rows)
    x = spec.x or (swept[0] if swept else "rho")
    fixed = [f for f in ("generator",) + SWEEPABLE + ("n_causal",) if f != x]
    grids = {}
    for r in rows:
        grids.setdefault(tuple(r[f] for f in fixed), []).append(r)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for key, grid in grids.items():
        present = list(dict.fromkeys(r["method"] for r in grid))
        methods = list(spec.methods) if spec.methods else present
        for m in methods:
            if m not in present:
                warnings.warn(f"no summary rows for method {m!r}; drawing the panels without it", stacklevel=2)
        methods = [m for m in methods if m in present]
        tag = "_".join(f"{f}{v}" for f, v in zip(fixed, key) if v not in ("", "None"))
        path = out_dir / f"{spec.prefix}_{spec.scoring}_{x}_{tag}.svg"
        _draw(grid, methods, x, spec, dict(zip(fixed, key)), path)
        paths.append(path)
    return paths


def _draw(grid, methods, x, spec, fixed, path):
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    for ax, (metric, label, logy) in zip(axes.flat, PANELS):
        for m in methods:
            pts = sorted(
                ((_num(r[x]), _num(r[f"mean_{metric}"]), _num(r[f"se_{metric}"])) for r in grid if r["method"] == m),
            )
            if not pts:
                continue
            xs, ys, es = zip(*pts)
            color, name = _style(m)
            ax.errorbar(xs, ys, yerr=es, color=color, label=name, marker="o", ms=3, lw=1.2, capsize=2)
        if logy:
            ax.set_yscale("log", nonpositive="mask")
        if x == "n":
            ax.set_xscale("log")
        ax.set_xlabel(AXIS_LABELS[x])
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
    handles, labels = axes.flat[0].get_legend_handles_labels()
    if handles:
        fig.legend(handles, labels, loc="lower center", ncol=min(len(handles), 6), frameon=False)
    desc = ", ".join(f"{k}={v}" for k, v in fixed.items() if v not in ("", "None"))
    fig.suptitle(spec.title or f"{spec.scoring} scoring: {desc}", fontsize=10)
    fig.tight_layout(rect=(0, 0.06, 1, 0.96))
    with matplotlib.rc_context({"svg.hashsalt": "directeffects"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
