"""Figure rendering for sweep and fig2b tables (headless, file output only).

Uses the object-oriented matplotlib API with an Agg canvas so no backend
or display is touched; the CLI calls these when --plot is given, next to
the delimited data it always writes.
"""

from __future__ import annotations

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure


def render_fig2b(rows: list[dict], path: str) -> None:
    """Semi-log visibility-vs-thermal-Doppler plot from fig2b rows."""
    fig = Figure(figsize=(6.0, 4.0))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)
    x = [r["xi_cl_sq"] for r in rows]
    v = [r["V"] for r in rows]
    ax.semilogx(x, v, "o-", ms=3.5, lw=1.0, color="tab:blue")
    ax.set_xlabel(r"$\xi_{\rm cl}^2$")
    ax.set_ylabel("CBS visibility $V$")
    ax.set_ylim(0.0, 1.02)
    ax.grid(True, which="both", alpha=0.3)
    ax.set_title(r"visibility at resonance vs thermal Doppler shift")
    fig.tight_layout()
    fig.savefig(path, dpi=160)


def render_sweep(rows: list[dict], axis1: str, axis2: str | None,
                 path: str) -> None:
    """V, P, D and the duality sum against the swept parameter.

    With a second axis, one line per axis-2 value is drawn for V only
    (the other quantities would clutter the panel).
    """
    fig = Figure(figsize=(7.0, 4.4))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)
    logx = len(rows) > 2 and all(r[axis1] > 0 for r in rows) and (
        rows[-1][axis1] / max(rows[0][axis1], 1e-300) > 50)
    plot = ax.semilogx if logx else ax.plot
    if axis2 is None:
        x = [r[axis1] for r in rows]
        for key, style in (("V", "o-"), ("P", "s-"),
                           ("D_analytic", "^-"), ("duality_sum", "--")):
            plot(x, [r[key] for r in rows], style, ms=3, lw=1.0, label=key)
    else:
        values2 = sorted({r[axis2] for r in rows})
        for v2 in values2:
            sub = [r for r in rows if r[axis2] == v2]
            plot([r[axis1] for r in sub], [r["V"] for r in sub],
                 "o-", ms=3, lw=1.0, label=f"V @ {axis2}={v2:g}")
    ax.set_xlabel(axis1)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
