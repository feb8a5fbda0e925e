"""PNG rendering helpers for the command-line tools.

Every function takes data the caller already computed, writes one PNG file,
and returns its path.  matplotlib is imported lazily with the Agg backend so
the rest of the package never pays for (or depends on) a display stack.
"""
from __future__ import annotations

import math
import os
from functools import lru_cache
from typing import Sequence

import numpy as np

__all__ = [
    "render_compare",
    "render_counting",
    "render_heat",
    "render_ladder",
    "render_rate",
    "render_spectrum",
    "render_volterra",
]

_TAG_STYLE = {
    "N_type": ("tab:blue", "o", "almost even"),
    "D_type": ("tab:orange", "s", "almost odd"),
    "unknown": ("tab:gray", "d", "unclassified"),
}

# Suppress the Software tEXt chunk so identical inputs give identical bytes.
_PNG_META = {"Software": None}


@lru_cache(maxsize=1)
def _plt():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    plt.rcParams.update(
        {
            "figure.dpi": 110,
            "savefig.dpi": 110,
            "font.size": 10,
            "axes.grid": True,
            "grid.alpha": 0.3,
        }
    )
    return plt


def _save(fig, directory: str, name: str) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, name)
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    _plt().close(fig)
    return path


def render_spectrum(entries: Sequence, directory: str, name: str = "spectrum.png") -> str:
    """Eigenvalue ladder colored by the even/odd classification."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for tag, (color, marker, label) in _TAG_STYLE.items():
        ns = [e.n for e in entries if e.type_tag == tag]
        if not ns:
            continue
        lams = [e.lam for e in entries if e.type_tag == tag]
        ax.plot(ns, lams, marker, color=color, ms=4, ls="none", label=label)
    ax.set_xlabel("index n")
    ax.set_ylabel("eigenvalue")
    ax.set_title("computed spectrum")
    ax.legend(loc="upper left")
    return _save(fig, directory, name)


def render_ladder(
    ns: Sequence[int], lams: Sequence[float], directory: str, name: str, label: str
) -> str:
    """Simple predicted-eigenvalue ladder."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(list(ns), list(lams), "o-", ms=4, lw=1, label=label)
    ax.set_xlabel("index n")
    ax.set_ylabel("eigenvalue")
    ax.set_title(label)
    ax.legend(loc="upper left")
    return _save(fig, directory, name)


def render_compare(rows: Sequence[dict], directory: str, name: str = "compare.png") -> str:
    """Predicted vs. reference eigenvalues and the remainder decay."""
    plt = _plt()
    ns = [row["n"] for row in rows]
    predicted = [row["predicted"] for row in rows]
    oracle = [row["oracle"] for row in rows]
    resid = [abs(row["residual"]) for row in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.2))
    ax1.plot(ns, oracle, "o", ms=4, label="computed")
    ax1.plot(ns, predicted, "-", lw=1, label="asymptotic prediction")
    ax1.set_xlabel("index n")
    ax1.set_ylabel("eigenvalue")
    ax1.legend(loc="upper left")
    positive = [(n, r) for n, r in zip(ns, resid) if r > 0.0]
    if len(positive) >= 2:
        px = np.array([p[0] for p in positive], dtype=float)
        py = np.array([p[1] for p in positive], dtype=float)
        slope, intercept = np.polyfit(np.log(px), np.log(py), 1)
        ax2.loglog(px, py, "o", ms=4, label="|residual|")
        ax2.loglog(px, np.exp(intercept) * px**slope, "--", lw=1, label=f"slope {slope:+.2f}")
        ax2.legend(loc="lower left")
    ax2.set_xlabel("index n")
    ax2.set_ylabel("|residual|")
    return _save(fig, directory, name)


def render_rate(
    ns: Sequence[float],
    errors: Sequence[float],
    directory: str,
    name: str,
    label: str = "|error|",
) -> str:
    """Log-log decay plot with a least-squares slope annotation."""
    plt = _plt()
    x = np.asarray(ns, dtype=float)
    y = np.abs(np.asarray(errors, dtype=float))
    keep = y > 0.0
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if keep.sum() >= 2:
        slope, intercept = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
        ax.loglog(x[keep], y[keep], "o", ms=4, label=label)
        ax.loglog(
            x[keep], np.exp(intercept) * x[keep] ** slope, "--", lw=1, label=f"slope {slope:+.2f}"
        )
        ax.legend(loc="lower left")
    ax.set_xlabel("index")
    ax.set_ylabel(label)
    return _save(fig, directory, name)


def render_counting(
    lams: Sequence[float],
    counted: Sequence[int],
    predicted: Sequence[float],
    directory: str,
    name: str = "counting.png",
) -> str:
    """Eigenvalue counting function against its smooth approximation."""
    plt = _plt()
    x = np.asarray(lams, dtype=float)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.2))
    ax1.semilogx(x, counted, drawstyle="steps-post", lw=1, label="eigenvalues below")
    ax1.semilogx(x, predicted, "--", lw=1, label="smooth approximation")
    ax1.set_xlabel("energy")
    ax1.set_ylabel("count")
    ax1.legend(loc="upper left")
    gap = np.asarray(counted, dtype=float) - np.asarray(predicted, dtype=float)
    ax2.semilogx(x, gap, "o-", ms=3, lw=0.8)
    ax2.axhspan(-2.0, 2.0, color="tab:green", alpha=0.15)
    ax2.set_xlabel("energy")
    ax2.set_ylabel("count minus approximation")
    return _save(fig, directory, name)


def render_heat(
    ts: Sequence[float],
    numeric: Sequence[float],
    predicted: Sequence[float],
    directory: str,
    name: str = "heat_trace.png",
) -> str:
    """Heat trace: summed spectrum vs. the small-time approximation."""
    plt = _plt()
    t = np.asarray(ts, dtype=float)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.2))
    ax1.loglog(t, numeric, "o", ms=4, label="summed spectrum")
    ax1.loglog(t, predicted, "-", lw=1, label="small-time approximation")
    ax1.set_xlabel("time")
    ax1.set_ylabel("heat trace")
    ax1.legend(loc="upper right")
    rel = np.abs(np.asarray(numeric) - np.asarray(predicted)) / np.abs(np.asarray(numeric))
    ax2.loglog(t, rel, "o-", ms=3, lw=0.8)
    ax2.set_xlabel("time")
    ax2.set_ylabel("relative gap")
    return _save(fig, directory, name)


def render_volterra(
    sol_plus, sol_minus, directory: str, name: str = "interior_solutions.png"
) -> str:
    """Interior solutions on both half-intervals around the origin."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(sol_plus.x, sol_plus.f, lw=1, label="right interior solution")
    ax.plot(-np.asarray(sol_minus.x), sol_minus.f, lw=1, label="left interior solution")
    ax.axvline(0.0, color="k", lw=0.6, alpha=0.5)
    ax.set_xlabel("position")
    ax.set_ylabel("solution value")
    lam = sol_plus.lam
    omega = math.sqrt(max(sol_plus.mu, 0.0))
    ax.set_title(f"interior solutions at energy {lam:g} (interior frequency {omega:.3f})")
    ax.legend(loc="upper left")
    return _save(fig, directory, name)
