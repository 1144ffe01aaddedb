"""Mapping 27-channel blendshape frames onto a K-degree-of-freedom actuator space.

Each actuator command is a sparse weighted sum of blendshape channels offset
by a neutral command and clipped to the actuator's stroke limits. The weights
live in a calibration file; the shipped 14-actuator demo has plausible
placeholder weights for a lip/jaw platform and is a starting point, not
hardware ground truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from typing import Iterable, TextIO

import numpy as np

from .channels import CHANNEL_INDEX, NUM_CHANNELS
from .errors import CalibrationError
from .series import CSV_FLOAT_FORMAT, FrameSeries


@dataclass(frozen=True)
class ActuatorSpec:
    actuator_id: str
    weights: tuple[tuple[str, float], ...]  # (channel name, weight), sparse
    min_cmd: float
    max_cmd: float
    neutral_cmd: float

    def __post_init__(self):
        if not self.actuator_id:
            raise CalibrationError("actuator id must be non-empty")
        if not self.weights:
            raise CalibrationError(f"actuator {self.actuator_id!r}: no weights")
        for name, _ in self.weights:
            if name not in CHANNEL_INDEX:
                raise CalibrationError(
                    f"actuator {self.actuator_id!r}: unknown channel {name!r}"
                )
        if not self.min_cmd <= self.neutral_cmd <= self.max_cmd:
            raise CalibrationError(
                f"actuator {self.actuator_id!r}: require min <= neutral <= max, "
                f"got {self.min_cmd}, {self.neutral_cmd}, {self.max_cmd}"
            )


@dataclass(frozen=True, eq=False)
class CalibrationMatrix:
    actuators: tuple[ActuatorSpec, ...]

    def __post_init__(self):
        if not self.actuators:
            raise CalibrationError("calibration needs at least one actuator")
        seen = set()
        for act in self.actuators:
            if act.actuator_id in seen:
                raise CalibrationError(f"duplicate actuator id {act.actuator_id!r}")
            seen.add(act.actuator_id)

    @property
    def dof(self) -> int:
        return len(self.actuators)

    @property
    def actuator_ids(self) -> list[str]:
        return [a.actuator_id for a in self.actuators]

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense (K, 27) weight matrix assembled from the sparse rows."""
        w = np.zeros((self.dof, NUM_CHANNELS))
        for i, act in enumerate(self.actuators):
            for name, weight in act.weights:
                w[i, CHANNEL_INDEX[name]] += weight
        return w

    @cached_property
    def neutral(self) -> np.ndarray:
        return np.array([a.neutral_cmd for a in self.actuators])

    @cached_property
    def limits(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([a.min_cmd for a in self.actuators])
        hi = np.array([a.max_cmd for a in self.actuators])
        return lo, hi


@dataclass
class ActuatorFrame:
    commands: np.ndarray  # (K,)
    time: float


class ClampStats:
    """Counts per-actuator limit clamps accumulated during retargeting."""

    def __init__(self, actuator_ids: list[str]):
        self.actuator_ids = list(actuator_ids)
        self.counts = np.zeros(len(actuator_ids), dtype=int)

    def record(self, clamped_mask: np.ndarray) -> None:
        self.counts += clamped_mask.astype(int)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def summary(self) -> str:
        parts = [
            f"{aid}={int(c)}"
            for aid, c in zip(self.actuator_ids, self.counts)
            if c > 0
        ]
        return f"{self.total} clamp(s)" + (f" ({', '.join(parts)})" if parts else "")


def load_calibration(text: str) -> CalibrationMatrix:
    """Parse and validate a calibration JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CalibrationError(f"calibration is not valid JSON: {exc}") from None
    if isinstance(doc, dict):
        rows = doc.get("actuators")
    else:
        rows = doc
    if not isinstance(rows, list) or not rows:
        raise CalibrationError("calibration must contain an 'actuators' list")
    actuators = []
    for i, row in enumerate(rows):
        try:
            weights = tuple((str(k), float(v)) for k, v in row["weights"].items())
            actuators.append(
                ActuatorSpec(
                    actuator_id=str(row["id"]),
                    weights=weights,
                    min_cmd=float(row["min"]),
                    max_cmd=float(row["max"]),
                    neutral_cmd=float(row["neutral"]),
                )
            )
        except CalibrationError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise CalibrationError(f"calibration row {i}: {exc}") from None
    return CalibrationMatrix(actuators=tuple(actuators))


def default_calibration() -> CalibrationMatrix:
    """The shipped 14-actuator demo calibration."""
    text = resources.files("lipsynth.data").joinpath("calib_14dof_demo.json").read_text("utf-8")
    return load_calibration(text)


def raw_activation(calib: CalibrationMatrix, frame: np.ndarray) -> np.ndarray:
    """Unclamped weighted sums W @ v, without the neutral offset.

    Exposed for linearity checks and debugging; ``frame`` is used as given,
    no clamping is applied to either side.
    """
    v = np.asarray(frame, dtype=float)
    if v.shape != (NUM_CHANNELS,):
        raise ValueError(f"frame must have shape ({NUM_CHANNELS},), got {v.shape}")
    return calib.matrix @ v


def retarget_frame(
    frame: np.ndarray,
    calib: CalibrationMatrix,
    time: float = 0.0,
    stats: ClampStats | None = None,
) -> ActuatorFrame:
    """Map one blendshape frame to clipped actuator commands."""
    raw = raw_activation(calib, frame)
    lo, hi = calib.limits
    unclamped = calib.neutral + raw
    commands = np.clip(unclamped, lo, hi)
    if stats is not None:
        stats.record((unclamped < lo) | (unclamped > hi))
    return ActuatorFrame(commands=commands, time=time)


def retarget_series(
    series: FrameSeries, calib: CalibrationMatrix
) -> tuple[list[ActuatorFrame], ClampStats]:
    """Frame-wise retargeting preserving timestamps, with clamp statistics."""
    stats = ClampStats(calib.actuator_ids)
    times = series.times
    frames = [
        retarget_frame(series.values[k], calib, time=float(times[k]), stats=stats)
        for k in range(series.frame_count)
    ]
    return frames, stats


def write_actuator_csv(
    frames: Iterable[ActuatorFrame], calib: CalibrationMatrix, dest: TextIO
) -> None:
    dest.write("time_s," + ",".join(calib.actuator_ids) + "\n")
    for frame in frames:
        cells = [CSV_FLOAT_FORMAT % frame.time]
        cells.extend(CSV_FLOAT_FORMAT % c for c in frame.commands)
        dest.write(",".join(cells) + "\n")


def fit_actuator_weights(
    blend_frames: np.ndarray, commands: np.ndarray, neutral: np.ndarray
) -> np.ndarray:
    """Least-squares fit of a (K, 27) weight matrix from paired recordings.

    Solves each actuator row independently from (blendshape frame, observed
    command) pairs. A convenience for seeding a calibration from capture data;
    fitted weights are dense and usually want manual sparsification afterward.
    """
    A = np.asarray(blend_frames, dtype=float)
    M = np.asarray(commands, dtype=float) - np.asarray(neutral, dtype=float)
    if A.ndim != 2 or A.shape[1] != NUM_CHANNELS:
        raise ValueError(f"blend_frames must be (n, {NUM_CHANNELS})")
    if M.shape[0] != A.shape[0]:
        raise ValueError("blend_frames and commands disagree on frame count")
    solution, *_ = np.linalg.lstsq(A, M, rcond=None)
    return solution.T
