"""Trajectory quality metrics: correlation, amplitude error, smoothness.

Pearson correlation captures temporal synchrony, RMSE captures amplitude
deviation, and mean absolute jerk (the third time derivative, reported in
units of 10^3/s^3) captures motion abruptness. Evaluation runs over the nine
most active channels of the reference recording, with the jaw-opening channel
reported separately as the headline figure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .channels import CHANNELS, NUM_CHANNELS, channel_index
from .series import FrameSeries

JERK_REPORT_SCALE = 1e3


def pcc(x, y) -> float | None:
    """Sample Pearson correlation; None when either series is constant."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("pcc requires two equal-length 1-d series")
    if a.size < 2:
        raise ValueError("pcc requires at least 2 samples")
    da = a - a.mean()
    db = b - b.mean()
    va = float(da @ da)
    vb = float(db @ db)
    if va == 0.0 or vb == 0.0:
        return None
    return float((da @ db) / math.sqrt(va * vb))


def rmse(x, y) -> float:
    """Root mean square error between two equal-length series."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("rmse requires at least 1 sample")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def jerk_series(x, fps: float) -> np.ndarray:
    """Third-order forward difference estimate of the jerk, length len(x) - 3.

    j[n] = (x[n+3] - 3 x[n+2] + 3 x[n+1] - x[n]) / dt^3; exact for cubic
    polynomials sampled on a uniform grid.
    """
    a = np.asarray(x, dtype=float)
    if a.ndim != 1 or a.size < 4:
        raise ValueError("jerk_series requires a 1-d series of length >= 4")
    if fps <= 0:
        raise ValueError("fps must be positive")
    dt = 1.0 / fps
    diff3 = a[3:] - 3.0 * a[2:-1] + 3.0 * a[1:-2] - a[:-3]
    return diff3 / dt**3


def select_active_channels(series: FrameSeries, k: int = 9) -> list[str]:
    """The k channels of highest sample variance, ties broken by canonical order."""
    if not 1 <= k <= NUM_CHANNELS:
        raise ValueError(f"k must lie in [1, {NUM_CHANNELS}]")
    variances = series.values.var(axis=0)
    order = sorted(range(NUM_CHANNELS), key=lambda c: (-variances[c], c))
    return [CHANNELS[c] for c in order[:k]]


def maj(series: FrameSeries, channels: list[str]) -> float:
    """Mean absolute jerk over the given channels, in units of 10^3/s^3."""
    if not channels:
        raise ValueError("maj requires at least one channel")
    cols = [channel_index(name) for name in channels]
    jerks = [np.abs(jerk_series(series.values[:, c], series.fps)) for c in cols]
    return float(np.mean(jerks)) / JERK_REPORT_SCALE


@dataclass
class MetricReport:
    active_channels: list[str]
    pcc_per_channel: dict[str, float | None]
    rmse_per_channel: dict[str, float]
    maj: float
    jaw_open_pcc: float | None
    jaw_open_rmse: float
    mean_pcc: float | None
    mean_rmse: float
    undefined_pcc_count: int
    compared_frames: int

    def to_dict(self) -> dict:
        return {
            "active_channels": self.active_channels,
            "pcc_per_channel": self.pcc_per_channel,
            "rmse_per_channel": self.rmse_per_channel,
            "maj_1e3_per_s3": self.maj,
            "jaw_open_pcc": self.jaw_open_pcc,
            "jaw_open_rmse": self.jaw_open_rmse,
            "mean_pcc": self.mean_pcc,
            "mean_rmse": self.mean_rmse,
            "undefined_pcc_count": self.undefined_pcc_count,
            "compared_frames": self.compared_frames,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [
            f"{'channel':<24}{'PCC':>10}{'RMSE':>10}",
        ]
        for name in self.active_channels:
            p = self.pcc_per_channel[name]
            p_txt = f"{p:10.4f}" if p is not None else f"{'undef':>10}"
            lines.append(f"{name:<24}{p_txt}{self.rmse_per_channel[name]:10.4f}")
        mean_p = f"{self.mean_pcc:.4f}" if self.mean_pcc is not None else "undef"
        lines.append("")
        lines.append(f"mean PCC (defined):     {mean_p}")
        lines.append(f"mean RMSE:              {self.mean_rmse:.4f}")
        jaw_p = f"{self.jaw_open_pcc:.4f}" if self.jaw_open_pcc is not None else "undef"
        lines.append(f"jawOpen PCC:            {jaw_p}")
        lines.append(f"jawOpen RMSE:           {self.jaw_open_rmse:.4f}")
        lines.append(f"MAJ (10^3/s^3):         {self.maj:.4f}")
        if self.undefined_pcc_count:
            lines.append(f"undefined PCC channels: {self.undefined_pcc_count}")
        lines.append(f"compared frames:        {self.compared_frames}")
        return "\n".join(lines) + "\n"


def _common_grid(gen: FrameSeries, gt: FrameSeries) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Resample both series onto the higher-rate grid over the overlap window."""
    t0 = max(gen.start_time, gt.start_time)
    t1 = min(gen.times[-1], gt.times[-1])
    if t1 <= t0:
        raise ValueError("series have no temporal overlap")
    ref = gt if gt.fps >= gen.fps else gen
    mask = (ref.times >= t0 - 1e-12) & (ref.times <= t1 + 1e-12)
    grid = ref.times[mask]

    def sample(series: FrameSeries) -> np.ndarray:
        if series is ref:
            return series.values[mask]
        out = np.empty((grid.size, NUM_CHANNELS))
        for c in range(NUM_CHANNELS):
            out[:, c] = np.interp(grid, series.times, series.values[:, c])
        return out

    return sample(gen), sample(gt), grid, ref.fps


def evaluate(gen: FrameSeries, gt: FrameSeries, active_count: int = 9) -> MetricReport:
    """Compare a generated series against a reference recording.

    Active channels are selected from the reference, so different generation
    strategies evaluated against the same reference share one channel set.
    """
    gen_vals, gt_vals, grid, fps = _common_grid(gen, gt)
    if grid.size < 4:
        raise ValueError("overlap too short to evaluate (need >= 4 shared frames)")
    active = select_active_channels(gt, k=active_count)

    pcc_per: dict[str, float | None] = {}
    rmse_per: dict[str, float] = {}
    for name in active:
        c = channel_index(name)
        pcc_per[name] = pcc(gen_vals[:, c], gt_vals[:, c])
        rmse_per[name] = rmse(gen_vals[:, c], gt_vals[:, c])
    defined = [p for p in pcc_per.values() if p is not None]

    overlap_gen = FrameSeries(gen_vals, fps=fps, start_time=float(grid[0]))
    jaw = channel_index("jawOpen")

    return MetricReport(
        active_channels=active,
        pcc_per_channel=pcc_per,
        rmse_per_channel=rmse_per,
        maj=maj(overlap_gen, active),
        jaw_open_pcc=pcc(gen_vals[:, jaw], gt_vals[:, jaw]),
        jaw_open_rmse=rmse(gen_vals[:, jaw], gt_vals[:, jaw]),
        mean_pcc=float(np.mean(defined)) if defined else None,
        mean_rmse=float(np.mean(list(rmse_per.values()))),
        undefined_pcc_count=len(pcc_per) - len(defined),
        compared_frames=int(grid.size),
    )
