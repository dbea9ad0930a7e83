# Figure rendering for sweep results: curves to PNG files next to the CSV.
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .montecarlo import SweepPoint

_SI_LABEL = {"with_si": "with self-interference", "without_si": "without self-interference"}


def _series(points: Sequence[SweepPoint], si_mode: str, k1: int, k2: int):
    sel = sorted((p for p in points
                  if p.si_mode == si_mode and p.k1 == k1 and p.k2 == k2),
                 key=lambda p: p.pmax_dbm)
    xs = [p.pmax_dbm for p in sel]
    ys = [p.mean_sum_rate for p in sel]
    es = [p.ci95_halfwidth for p in sel]
    return xs, ys, es


def render_sweep_figures(points: Sequence[SweepPoint], out_dir: str,
                         stem: str = "sweep") -> list[Path]:
    """Render average sum-rate curves per SI mode plus an SI-comparison figure.

    One PNG per SI mode present in the results (all group sizes overlaid) and,
    when both modes are present, a comparison figure. Returns the written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    modes = sorted({p.si_mode for p in points})
    groups = sorted({(p.k1, p.k2) for p in points})
    written: list[Path] = []

    for mode in modes:
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        for k1, k2 in groups:
            xs, ys, es = _series(points, mode, k1, k2)
            if not xs:
                continue
            ax.errorbar(xs, ys, yerr=es, marker="o", capsize=3,
                        label=f"K1={k1}, K2={k2}")
        ax.set_xlabel("user maximum power [dBm]")
        ax.set_ylabel("average sum-rate [bit/s/Hz]")
        ax.set_title(f"Average sum-rate vs. user maximum power, {_SI_LABEL[mode]}")
        ax.grid(True, alpha=0.4)
        ax.legend()
        fig.tight_layout()
        path = out / f"{stem}_sum_rate_{mode}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    if len(modes) == 2:
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        for k1, k2 in groups:
            for mode, style in (("without_si", "-"), ("with_si", "--")):
                xs, ys, _ = _series(points, mode, k1, k2)
                if not xs:
                    continue
                ax.plot(xs, ys, style, marker="o",
                        label=f"K1={k1}, K2={k2}, {_SI_LABEL[mode]}")
        ax.set_xlabel("user maximum power [dBm]")
        ax.set_ylabel("average sum-rate [bit/s/Hz]")
        ax.set_title("Self-interference effect on the average sum-rate")
        ax.grid(True, alpha=0.4)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out / f"{stem}_si_comparison.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    if any(p.outage_fraction > 0 for p in points):
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        for mode in modes:
            for k1, k2 in groups:
                sel = sorted((p for p in points
                              if p.si_mode == mode and p.k1 == k1 and p.k2 == k2),
                             key=lambda p: p.pmax_dbm)
                if not sel:
                    continue
                ax.plot([p.pmax_dbm for p in sel], [p.outage_fraction for p in sel],
                        marker="s", label=f"K1={k1}, K2={k2}, {_SI_LABEL[mode]}")
        ax.set_xlabel("user maximum power [dBm]")
        ax.set_ylabel("outage fraction")
        ax.set_title("QoS outage vs. user maximum power")
        ax.set_ylim(0, 1)
        ax.grid(True, alpha=0.4)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out / f"{stem}_outage.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
