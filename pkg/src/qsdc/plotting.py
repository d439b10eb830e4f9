"""Static figure rendering for sweep reports.

Figures are written to image files next to the delimited output; nothing is
ever displayed interactively.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import SweepRow


def plot_sweep(rows: Sequence[SweepRow], path, title: str | None = None) -> None:
    """Render detection probability and the entropy bound against gamma.

    Left panel: exact d with the d = gamma/2 reference line and Monte Carlo
    estimates with 4-sigma error bars when present.  Right panel: the entropy
    bound in bits.
    """
    if not rows:
        raise ValueError("nothing to plot: sweep produced no rows")
    gammas = [row.gamma for row in rows]
    fig, (ax_d, ax_s) = plt.subplots(1, 2, figsize=(9.0, 3.6))

    ax_d.plot(gammas, [row.d_exact for row in rows], "o-", color="tab:blue", label="exact")
    mc_rows = [row for row in rows if row.d_mc is not None]
    if mc_rows:
        ax_d.errorbar(
            [row.gamma for row in mc_rows],
            [row.d_mc for row in mc_rows],
            yerr=[4.0 * (row.mc_std_err or 0.0) for row in mc_rows],
            fmt="x",
            color="tab:orange",
            capsize=3,
            label="Monte Carlo (4 sigma)",
        )
    bound_grid = sorted({0.0, 1.0, *gammas})
    ax_d.plot(bound_grid, [g / 2.0 for g in bound_grid], "--", color="gray", label="gamma/2 bound")
    ax_d.set_xlabel("fidelity deficit gamma")
    ax_d.set_ylabel("detection probability d")
    ax_d.legend(fontsize=8)

    ax_s.plot(gammas, [row.s_max_bits for row in rows], "s-", color="tab:green")
    ax_s.set_xlabel("fidelity deficit gamma")
    ax_s.set_ylabel("entropy bound (bits)")

    fig.suptitle(title or f"{rows[0].attack_label} sweep")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
