"""Figures of mean SNR against phase-error variance.

Solid lines are closed-form predictions, dotted lines with markers are the
Monte-Carlo estimates, one colour per (fraction, relay count) curve.
"""

from __future__ import annotations

import itertools
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .analytic import FormulaVariant  # noqa: E402
from .montecarlo import SweepRow  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.4,
    "lines.markersize": 4,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}

_VARIANT_STYLE = {
    FormulaVariant.CORRECTED: "-",
    FormulaVariant.LITERAL: "--",
}

_POLICY_TITLE = {"ts": "Time switching", "ps": "Power splitting"}
_FRACTION_SYMBOL = {"ts": "α", "ps": "ρ"}


def _curves(rows: Sequence[SweepRow]):
    key = lambda r: (r.fraction, r.n_relays)  # noqa: E731
    for (fraction, n), group in itertools.groupby(sorted(rows, key=key), key=key):
        group = sorted(group, key=lambda r: r.sigma_theta_sq)
        yield fraction, n, group


def plot_sweep(
    rows: Sequence[SweepRow],
    path: str | Path,
    variants: Sequence[FormulaVariant] = (FormulaVariant.CORRECTED,),
    title: str | None = None,
) -> Path:
    """Render a sweep to ``path`` (format from the suffix) and return the path."""
    path = Path(path)
    if not rows:
        raise ValueError("no sweep rows to plot")
    kind = rows[0].policy_kind
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.6, 3.0))
        colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
        for i, (fraction, n, group) in enumerate(_curves(rows)):
            c = colors[i % len(colors)]
            x = [r.sigma_theta_sq for r in group]
            label = f"N={n}, {_FRACTION_SYMBOL.get(kind, 'f')}={fraction:g}"
            for v in variants:
                y = [r.predicted_db.get(v) for r in group]
                if any(val is None for val in y):
                    continue
                ax.plot(x, y, _VARIANT_STYLE[v], color=c,
                        label=f"{label} ({v.value})")
            ax.plot(x, [r.mc_db for r in group], ":", marker="o", color=c,
                    markerfacecolor="none", label=f"{label} (Monte Carlo)")
        ax.set_xlabel(r"phase-error variance $\sigma_\theta^2$ (rad$^2$)")
        ax.set_ylabel("mean SNR (dB)")
        ax.set_title(title or _POLICY_TITLE.get(kind, kind))
        ax.grid(True)
        ax.legend(loc="best", ncol=1)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, metadata={"Software": None} if path.suffix == ".png" else None)
        plt.close(fig)
    return path
