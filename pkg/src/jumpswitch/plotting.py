"""Figure rendering for the command-line reports.

Figures are written next to the delimited output with the same stem.
Rendering is deterministic: fixed geometry, no timestamps, Agg backend.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def save_trajectory_figure(path, exact, out_path) -> None:
    """State trajectory with jump markers, regime path underneath."""
    fig, (ax_state, ax_regime) = plt.subplots(
        2, 1, sharex=True, figsize=(8.0, 5.5),
        gridspec_kw={"height_ratios": [3, 1]},
    )
    t = path.grid.points
    ax_state.plot(t, path.states, lw=1.0, color="C0", label="numerical")
    if exact is not None:
        ax_state.plot(t, exact.states, lw=0.9, ls="--", color="C1", label="exact")
    flags = path.grid.jump_flags
    if flags.any():
        ax_state.plot(
            t[flags], path.states[flags], "x", ms=5, color="C3", label="jump"
        )
    ax_state.set_ylabel("state")
    ax_state.grid(True, alpha=0.3)
    ax_state.legend(loc="best", fontsize=8)

    ax_regime.step(t, path.regimes, where="post", lw=0.9, color="C2")
    ax_regime.set_ylabel("regime")
    ax_regime.set_xlabel("t")
    ax_regime.set_yticks(sorted(set(int(r) for r in path.regimes)))
    ax_regime.grid(True, alpha=0.3)

    fig.tight_layout()
    fig.savefig(out_path, dpi=DPI)
    plt.close(fig)


def save_convergence_figure(table, out_path) -> None:
    """Mean sup-squared error against step size on log-log axes."""
    deltas = np.array([r.delta for r in table.rows])
    means = np.array([r.mean_sup_sq_error for r in table.rows])
    errs = np.array([r.stderr for r in table.rows])

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.errorbar(
        deltas, means, yerr=3.0 * errs, fmt="o", ms=4, capsize=3,
        color="C0", label="mean sup-squared error (3 s.e.)",
    )
    if math.isfinite(table.fit.slope):
        line = np.exp(table.fit.intercept) * deltas ** table.fit.slope
        ax.plot(
            deltas, line, "--", color="C1",
            label=f"fit: slope {table.fit.slope:.3f}",
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("step size")
    ax.set_ylabel("mean sup-squared error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="best", fontsize=8)

    fig.tight_layout()
    fig.savefig(out_path, dpi=DPI)
    plt.close(fig)


def save_ruin_figure(table, out_path) -> None:
    """Simulated expected ruin times against the closed-form curves."""
    reserves = np.array([r.reserve for r in table.rows])
    sims = np.array([r.simulated_mean for r in table.rows])
    errs = np.array([r.stderr for r in table.rows])

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    grid_u = np.linspace(reserves.min(), reserves.max(), 200)
    an = table.analytics
    solver_curve = (
        an.const_state1
        + grid_u / (an.claim_load - 1.0)
        + an.exp_coeff * np.exp(an.exponent * grid_u)
    )
    ax.plot(grid_u, solver_curve, "-", color="C1", lw=1.0, label="closed form (solver)")
    refs = np.array([r.exact_reference for r in table.rows])
    if np.isfinite(refs).all():
        ax.plot(reserves, refs, "s", ms=4, mfc="none", color="C2", label="closed form (reference)")
    ax.errorbar(
        reserves, sims, yerr=3.0 * errs, fmt="o", ms=4, capsize=3,
        color="C0", label="simulated (3 s.e.)",
    )
    ax.set_xlabel("initial reserve")
    ax.set_ylabel("expected ruin time")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)

    fig.tight_layout()
    fig.savefig(out_path, dpi=DPI)
    plt.close(fig)
