"""Frame and trajectory containers plus CSV ingestion and emission.

Two array-backed types carry all motion data:

* :class:`VisemeTrajectory` -- a duration-normalized articulation cycle on a
  uniform grid tau in [0, 1].
* :class:`FrameSeries` -- a timed clip sampled at a fixed frame rate.

Both clamp activations into [0, 1] on construction and freeze their arrays,
so instances are safe to share between threads.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .channels import CHANNELS, NUM_CHANNELS, channel_index
from .errors import FormatError

# Fixed-width cell formatting keeps repeated CSV exports byte-identical.
CSV_FLOAT_FORMAT = "%.9f"


def clamp01(values) -> np.ndarray:
    """Clamp activation values into [0, 1]; rejects non-finite input."""
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("blendshape values must be finite")
    return np.clip(arr, 0.0, 1.0)


def _frozen_matrix(values, min_rows: int) -> np.ndarray:
    arr = clamp01(values)
    if arr.ndim != 2 or arr.shape[1] != NUM_CHANNELS:
        raise ValueError(
            f"expected an (n, {NUM_CHANNELS}) value matrix, got shape {arr.shape}"
        )
    if arr.shape[0] < min_rows:
        raise ValueError(f"need at least {min_rows} frames, got {arr.shape[0]}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class VisemeTrajectory:
    """One articulation cycle on the implicit uniform grid tau in [0, 1]."""

    values: np.ndarray  # (sample_count, 27)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_matrix(self.values, min_rows=2))

    @property
    def sample_count(self) -> int:
        return self.values.shape[0]

    def value_at(self, tau: float) -> np.ndarray:
        """Linear interpolation of the trajectory at normalized time tau."""
        if not 0.0 <= tau <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {tau}")
        pos = tau * (self.sample_count - 1)
        lo = int(pos)
        frac = pos - lo
        if frac == 0.0:
            return self.values[lo].copy()
        return (1.0 - frac) * self.values[lo] + frac * self.values[lo + 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, VisemeTrajectory):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class FrameSeries:
    """Uniformly sampled blendshape frames starting at ``start_time``."""

    values: np.ndarray  # (frame_count, 27)
    fps: float
    start_time: float = 0.0

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        object.__setattr__(self, "values", _frozen_matrix(self.values, min_rows=1))

    @property
    def frame_count(self) -> int:
        return self.values.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.start_time + np.arange(self.frame_count) / self.fps

    @property
    def duration(self) -> float:
        return (self.frame_count - 1) / self.fps

    def channel(self, name: str) -> np.ndarray:
        return self.values[:, channel_index(name)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrameSeries):
            return NotImplemented
        return (
            self.fps == other.fps
            and self.start_time == other.start_time
            and np.array_equal(self.values, other.values)
        )


def resample_trajectory(traj: VisemeTrajectory, n: int) -> VisemeTrajectory:
    """Resample onto an ``n``-point uniform grid by per-channel linear interpolation.

    Endpoints are preserved exactly, and resampling a trajectory onto its own
    grid size is the identity.
    """
    if n < 2:
        raise ValueError(f"resample target must be >= 2, got {n}")
    m = traj.sample_count
    # Integer products keep on-grid positions exact, so n == m is a fixed point.
    pos = np.arange(n) * (m - 1) / (n - 1)
    src = np.arange(m, dtype=float)
    out = np.empty((n, NUM_CHANNELS))
    for c in range(NUM_CHANNELS):
        out[:, c] = np.interp(pos, src, traj.values[:, c])
    return VisemeTrajectory(out)


def _snap_fps(raw: float) -> float:
    nearest = round(raw)
    if nearest > 0 and abs(raw - nearest) <= 1e-3 * nearest:
        return float(nearest)
    return raw


def parse_capture_csv(source: str | TextIO) -> FrameSeries:
    """Parse a ``time_s,<channel>,...`` capture CSV into a :class:`FrameSeries`.

    The header must contain all 27 canonical channels; extra columns (e.g. the
    remaining channels of a full 52-blendshape capture) are ignored. Values are
    clamped into [0, 1] and the frame rate is inferred from the median
    timestamp delta.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("capture CSV is empty") from None
    header = [h.strip() for h in header]
    if not header or header[0] != "time_s":
        raise FormatError("capture CSV must start with a 'time_s' column")
    positions = {name: i for i, name in enumerate(header)}
    missing = [name for name in CHANNELS if name not in positions]
    if missing:
        raise FormatError(f"capture CSV is missing channel column(s): {', '.join(missing)}")
    cols = [positions[name] for name in CHANNELS]

    times: list[float] = []
    rows: list[list[float]] = []
    for row_idx, row in enumerate(reader):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            raise FormatError(f"row {row_idx}: expected {len(header)} cells, got {len(row)}")
        try:
            t = float(row[0])
            vals = [float(row[c]) for c in cols]
        except ValueError as exc:
            raise FormatError(f"row {row_idx}: non-numeric cell ({exc})") from None
        if times and t <= times[-1]:
            raise FormatError(
                f"row {row_idx}: timestamps must be strictly increasing "
                f"({t} after {times[-1]})"
            )
        times.append(t)
        rows.append(vals)

    if len(rows) < 2:
        raise FormatError("capture CSV needs at least 2 data rows")
    deltas = [b - a for a, b in zip(times, times[1:])]
    fps = _snap_fps(1.0 / statistics.median(deltas))
    return FrameSeries(np.array(rows), fps=fps, start_time=times[0])


def write_series_csv(series: FrameSeries, dest: TextIO) -> None:
    """Emit a frame series as a deterministic fixed-precision CSV."""
    dest.write("time_s," + ",".join(CHANNELS) + "\n")
    times = series.times
    for k in range(series.frame_count):
        cells = [CSV_FLOAT_FORMAT % times[k]]
        cells.extend(CSV_FLOAT_FORMAT % v for v in series.values[k])
        dest.write(",".join(cells) + "\n")


def series_csv_text(series: FrameSeries) -> str:
    buf = io.StringIO()
    write_series_csv(series, buf)
    return buf.getvalue()
