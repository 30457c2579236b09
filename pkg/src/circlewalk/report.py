"""Figure rendering for the CLI report path.

Each renderer takes an already-computed result object and writes a PNG next
to the delimited output the CLI emits.  Plotting stays out of the numeric
modules; this is the only module that imports matplotlib.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .core import Orbit
from .equidist import DiscrepancyProfile
from .exceptional import CantorSchedule, dimension_estimate
from .weyl import WeylSeries

__all__ = [
    "render_discrepancy_profile",
    "render_weyl_growth",
    "render_dimension_estimates",
    "render_orbit_histogram",
]

_DPI = 150


def render_discrepancy_profile(profile: DiscrepancyProfile, path: str) -> None:
    """Log-log star discrepancy against N, with the 1/(2N) floor for scale."""
    fig, ax = plt.subplots(figsize=(6, 4))
    n = np.asarray(profile.checkpoints, dtype=float)
    ax.loglog(n, profile.dstar, "o-", label="star discrepancy")
    ax.loglog(n, 0.5 / n, "--", color="gray", label="1/(2N) floor")
    ax.set_xlabel("N")
    ax.set_ylabel("D*_N")
    ax.set_title(f"Discrepancy profile (verdict: {profile.verdict_hint})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_weyl_growth(series: WeylSeries, path: str) -> None:
    """|W_N| against N on log-log axes, with the sqrt(N) reference line."""
    fig, ax = plt.subplots(figsize=(6, 4))
    n = np.asarray(series.checkpoints, dtype=float)
    mags = np.abs(np.asarray(series.sums))
    ax.loglog(n, np.maximum(mags, 1e-12), "o-", label=f"|W_N| (h={series.h})")
    ax.loglog(n, np.sqrt(n), "--", color="gray", label="sqrt(N)")
    ax.loglog(n, [math.sqrt(v) * math.log(v) ** 2 if v > 1 else 1 for v in n],
              ":", color="gray", label="sqrt(N) log^2 N")
    ax.set_xlabel("N")
    ax.set_ylabel("|W_N|")
    ax.set_title("Weyl sum growth")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_dimension_estimates(schedule: CantorSchedule, path: str) -> None:
    """Stage-by-stage dimension estimates against the 1/(1+eps) limit."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ks = list(range(1, len(schedule) + 1))
    estimates = [dimension_estimate(schedule, k) for k in ks]
    limit = float(1 / (1 + schedule.eps))
    ax.plot(ks, estimates, "o-", label="partial estimate")
    ax.axhline(limit, linestyle="--", color="gray", label=f"1/(1+eps) = {limit:.4g}")
    ax.set_xlabel("stage k")
    ax.set_ylabel("dimension estimate")
    ax.set_ylim(0, 1)
    ax.set_title("Cantor-scheme dimension estimates")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_orbit_histogram(orb: Orbit, path: str, bins: int = 50) -> None:
    """Empirical density of the orbit positions against the uniform level."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(orb.positions, bins=bins, range=(0.0, 1.0), density=True,
            alpha=0.75, label=f"orbit (N={len(orb)})")
    ax.axhline(1.0, linestyle="--", color="gray", label="uniform density")
    ax.set_xlabel("position")
    ax.set_ylabel("density")
    ax.set_title("Orbit position histogram")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
