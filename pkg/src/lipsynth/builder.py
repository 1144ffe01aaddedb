"""Capture-to-viseme pipeline: filter, cycle segmentation, alignment fusion.

A raw repeated-pronunciation capture becomes one standardized trajectory in
four stages: low-pass filtering, segmentation of the reference channel into
articulation cycles, warping of all cycles onto a common time axis followed
by mean fusion, and resampling onto the library grid.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import find_peaks

from .channels import channel_index
from .dtw import dtw_distance
from .errors import InsufficientCyclesError
from .series import FrameSeries, VisemeTrajectory, resample_trajectory

VALLEY_TO_VALLEY = "valley-to-valley"
PEAK_TO_PEAK = "peak-to-peak"


@dataclass(frozen=True)
class BuilderConfig:
    reference_channel: str = "jawOpen"
    smoothing_window: int = 5
    peak_min_height: float = 0.15
    peak_min_separation: float = 0.25  # seconds
    segmentation_mode: str = VALLEY_TO_VALLEY
    target_samples: int = 60
    min_cycles: int = 3
    rest_blend: bool = False

    def __post_init__(self):
        if self.smoothing_window < 3 or self.smoothing_window % 2 == 0:
            raise ValueError("smoothing_window must be an odd integer >= 3")
        if self.peak_min_height <= 0 or self.peak_min_separation <= 0:
            raise ValueError("peak thresholds must be positive")
        if self.segmentation_mode not in (VALLEY_TO_VALLEY, PEAK_TO_PEAK):
            raise ValueError(f"unknown segmentation mode {self.segmentation_mode!r}")
        if self.target_samples < 2:
            raise ValueError("target_samples must be >= 2")
        if self.min_cycles < 1:
            raise ValueError("min_cycles must be >= 1")
        channel_index(self.reference_channel)


@dataclass(frozen=True, eq=False)
class CycleSegment:
    """A contiguous slice covering one pronunciation cycle."""

    values: np.ndarray       # (n, 27) frames of the slice
    peak_index: int          # reference-channel maximum within the slice
    start_frame: int         # offset of the slice in the source series
    reference: int           # reference channel column

    def __post_init__(self):
        if self.values.shape[0] == 0:
            raise ValueError("cycle segment must be non-empty")
        if not 0 <= self.peak_index < self.values.shape[0]:
            raise ValueError("peak_index out of bounds")
        ref = self.values[:, self.reference]
        if ref[self.peak_index] < ref.max():
            raise ValueError("peak_index is not the reference-channel maximum")

    def __len__(self) -> int:
        return self.values.shape[0]


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average along axis 0 with truncated edge windows."""
    if window % 2 == 0:
        raise ValueError(f"window must be odd, got {window}")
    n = values.shape[0]
    if window > n:
        raise ValueError(f"window {window} exceeds series length {n}")
    half = window // 2
    padded = np.concatenate(
        [np.zeros((1,) + values.shape[1:]), np.cumsum(values, axis=0)], axis=0
    )
    idx = np.arange(n)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, n)
    sums = padded[hi] - padded[lo]
    counts = (hi - lo).reshape((-1,) + (1,) * (values.ndim - 1))
    return sums / counts


def lowpass_filter(series: FrameSeries, window: int) -> FrameSeries:
    """Per-channel centered moving average; length and fps are unchanged."""
    return replace(series, values=moving_average(series.values, window))


def segment_cycles(series: FrameSeries, cfg: BuilderConfig) -> list[CycleSegment]:
    """Cut the series into per-cycle segments around reference-channel peaks.

    Peaks below ``peak_min_height`` are ignored and peaks closer than
    ``peak_min_separation`` merge into the higher one. In valley-to-valley
    mode each segment spans from the reference minimum before a peak to the
    minimum after it; neighboring segments share boundary frames.
    """
    ref_col = channel_index(cfg.reference_channel)
    ref = series.values[:, ref_col]
    distance = max(1, int(round(cfg.peak_min_separation * series.fps)))
    peaks, _ = find_peaks(ref, height=cfg.peak_min_height, distance=distance)
    if len(peaks) < cfg.min_cycles:
        raise InsufficientCyclesError(len(peaks), cfg.min_cycles)

    n = series.frame_count
    segments: list[CycleSegment] = []
    if cfg.segmentation_mode == VALLEY_TO_VALLEY:
        for k, p in enumerate(peaks):
            left = peaks[k - 1] if k > 0 else 0
            right = peaks[k + 1] if k + 1 < len(peaks) else n - 1
            lo = left + int(np.argmin(ref[left:p + 1]))
            hi = p + int(np.argmin(ref[p:right + 1]))
            segments.append(_make_segment(series, lo, hi, ref_col))
    else:
        for p0, p1 in zip(peaks, peaks[1:]):
            segments.append(_make_segment(series, p0, p1, ref_col))
        if len(segments) < cfg.min_cycles:
            raise InsufficientCyclesError(len(segments), cfg.min_cycles)
    return segments


def _make_segment(series: FrameSeries, lo: int, hi: int, ref_col: int) -> CycleSegment:
    values = series.values[lo:hi + 1]
    peak = int(np.argmax(values[:, ref_col]))
    return CycleSegment(values=values, peak_index=peak, start_frame=lo, reference=ref_col)


def align_and_fuse(segments: list[CycleSegment]) -> VisemeTrajectory:
    """Warp all cycles onto the medoid's time axis and average them.

    The medoid is the segment with minimum summed DTW distance to all others.
    Frames of a segment that map onto the same medoid index are pre-averaged
    before the across-segment mean, so the fused value at every index is a
    convex combination of contributing frames.
    """
    if not segments:
        raise ValueError("align_and_fuse requires at least one segment")
    if len(segments) == 1:
        return VisemeTrajectory(segments[0].values)

    k = len(segments)
    dist = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            cost, _ = dtw_distance(segments[i].values, segments[j].values)
            dist[i, j] = dist[j, i] = cost
    medoid = int(np.argmin(dist.sum(axis=1)))
    base = segments[medoid].values
    n = base.shape[0]

    warped = []
    for j, seg in enumerate(segments):
        if j == medoid:
            warped.append(base)
            continue
        _, path = dtw_distance(base, seg.values)
        sums = np.zeros_like(base)
        counts = np.zeros(n)
        for bi, sj in path:
            sums[bi] += seg.values[sj]
            counts[bi] += 1
        warped.append(sums / counts[:, None])
    fused = np.mean(warped, axis=0)
    return VisemeTrajectory(fused)


def _blend_to_rest(traj: VisemeTrajectory, fraction: float = 0.1) -> VisemeTrajectory:
    """Ramp the first/last ``fraction`` of samples toward the per-channel minimum."""
    values = traj.values.copy()
    floor = values.min(axis=0)
    n = values.shape[0]
    k = max(1, int(round(fraction * n)))
    ramp = np.linspace(1.0, 0.0, k + 1)[:-1]  # 1 at the boundary sample, fading inward
    for i in range(k):
        w = ramp[i]
        values[i] = w * floor + (1 - w) * values[i]
        values[n - 1 - i] = w * floor + (1 - w) * values[n - 1 - i]
    return VisemeTrajectory(values)


def build_viseme(series: FrameSeries, cfg: BuilderConfig) -> VisemeTrajectory:
    """Full pipeline: filter, segment, align-fuse, resample to the library grid."""
    filtered = lowpass_filter(series, cfg.smoothing_window)
    segments = segment_cycles(filtered, cfg)
    fused = align_and_fuse(segments)
    traj = resample_trajectory(fused, cfg.target_samples)
    if cfg.rest_blend:
        traj = _blend_to_rest(traj)
    return traj


def fusion_residual(segments: list[CycleSegment], fused: VisemeTrajectory) -> float:
    """Mean DTW cost per frame between each cycle and the fused trajectory."""
    if not segments:
        return 0.0
    total = 0.0
    for seg in segments:
        cost, path = dtw_distance(fused.values, seg.values)
        total += cost / len(path)
    return total / len(segments)
