"""Figure rendering for the CLI report paths.

Figures are an optional companion to the delimited outputs: the scan
commands write their CSV as usual and, when asked, render the same rows to
a PNG/PDF next to it.  matplotlib is imported lazily with the Agg backend
so plain data runs never touch it.
"""

from __future__ import annotations

from pathlib import Path


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_asymmetry_scan(
    dt: list[float],
    curves: dict[float, list[float]],
    path: str | Path,
) -> None:
    """Asymmetry vs time difference, one curve per decoherence parameter."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for zeta, values in curves.items():
        style = "--" if zeta in (0.0, 1.0) else "-"
        ax.plot(dt, values, style, label=f"zeta = {zeta:g}")
    ax.set_xlabel(r"$\Delta t$  [$\tau_S$]")
    ax.set_ylabel("strangeness asymmetry")
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_wigner_region(
    rows: list[tuple[float, float, float, float, bool]],
    path: str | Path,
) -> None:
    """Violation map of the asymmetric-time inequality in the (t_a, t_b) plane."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    viol = [(a, b) for a, b, _, _, flag in rows if flag]
    ok = [(a, b) for a, b, _, _, flag in rows if not flag]
    if ok:
        ax.scatter(*zip(*ok), s=6, c="0.8", label="satisfied", marker="s")
    if viol:
        ax.scatter(*zip(*viol), s=10, c="crimson", label="violated", marker="s")
    ax.set_xlabel(r"$t_a$  [$\tau_S$]")
    ax.set_ylabel(r"$t_b$  [$\tau_S$]")
    ax.legend(frameon=False, loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
