# meanfield/plots.py
"""Static SVG figures for sweeps. Decoration only; nothing reads them back."""
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .schemas import EIGHT_PI, DetCurvePoint, LambdaCurve, MassReport  # noqa: E402

# fixed so repeated runs emit identical SVG
plt.rcParams["svg.hashsalt"] = "meanfield"
plt.rcParams["svg.fonttype"] = "none"


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_lambda_curve(curve: LambdaCurve, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([p.alpha for p in curve.points], [p.lambda_value for p in curve.points], lw=1.5,
            label=f"τ={curve.params.tau:g}, γ={curve.params.gamma:g}")
    ax.axhline(EIGHT_PI, color="0.4", ls="--", lw=1, label="8π")
    ax.set_xlabel("α")
    ax.set_ylabel("Λ(α)")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_det_curve(points: Sequence[DetCurvePoint], critical: float, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([p.alpha for p in points], [p.lambda_value for p in points], lw=1.5)
    ax.axhline(critical, color="0.4", ls="--", lw=1, label="critical λ")
    ax.set_xlabel("α")
    ax.set_ylabel("λ")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_masses(reports: Iterable[MassReport], limits, path) -> Path:
    reports = list(reports)
    fig, ax = plt.subplots(figsize=(6, 4))
    alphas = [r.alpha for r in reports]
    ax.plot(alphas, [r.m1 for r in reports], label="m₁")
    ax.plot(alphas, [r.m_gamma for r in reports], label="m_γ")
    ax.plot(alphas, [r.total for r in reports], lw=2, label="m")
    for y in limits:
        ax.axhline(y, color="0.5", ls=":", lw=1)
    ax.set_xlabel("α")
    ax.legend(frameon=False)
    return _save(fig, path)
