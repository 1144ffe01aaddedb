"""Script-to-motion synthesis with coarticulation fusion.

Four generation strategies are available for ablation:

* ``A`` -- one static target pose per viseme, piecewise-linear transitions.
* ``B`` -- hard time slots per viseme; each slot plays its full dynamic
  trajectory time-compressed, with no blending across slot boundaries.
* ``C`` -- continuous fusion: a cosine ease weight slides the output from the
  initial's trajectory into the final's (two visemes), or through a cascaded
  two-stage blend (three visemes). Single-viseme syllables play back directly.
* ``D`` -- strategy C followed by audio-energy gain modulation and smoothing.

Between events the output decays exponentially toward the neutral pose.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .channels import JAW_OPEN, NUM_CHANNELS
from .errors import LipSyncError, ScriptError, SynthesisError
from .library import VisemeLibrary
from .pinyin import MappingTable, VisemeSequence, split_syllable, map_to_visemes
from .series import FrameSeries, VisemeTrajectory

METHODS = ("A", "B", "C", "D")


@dataclass(frozen=True)
class SyllableEvent:
    """One timed syllable; ``duration`` is the articulation period."""

    syllable: str
    start: float
    duration: float

    def __post_init__(self):
        if self.duration <= 0:
            raise ScriptError(f"event {self.syllable!r}: duration must be positive")
        if self.start < 0:
            raise ScriptError(f"event {self.syllable!r}: start must be >= 0")

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class TimedScript:
    """Ordered, non-overlapping syllable events plus a total duration."""

    events: tuple[SyllableEvent, ...]
    total_duration: float

    def __post_init__(self):
        prev_end = 0.0
        prev_start = -math.inf
        for i, ev in enumerate(self.events):
            if ev.start < prev_start:
                raise ScriptError(f"event {i} ({ev.syllable!r}): events must be sorted by start")
            if ev.start < prev_end - 1e-9:
                raise ScriptError(f"event {i} ({ev.syllable!r}): overlaps the previous event")
            prev_start = ev.start
            prev_end = ev.end
        if self.events and self.total_duration < self.events[-1].end - 1e-9:
            raise ScriptError("total_duration ends before the last event")
        if self.total_duration <= 0:
            raise ScriptError("total_duration must be positive")


def parse_script(text: str) -> TimedScript:
    """Parse a script JSON document: a list of {syllable, start_s, duration_s}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScriptError(f"script is not valid JSON: {exc}") from None
    if isinstance(doc, list):
        doc = {"events": doc}
    if not isinstance(doc, dict) or "events" not in doc:
        raise ScriptError("script must contain an 'events' list")
    events = []
    for i, entry in enumerate(doc["events"]):
        try:
            events.append(
                SyllableEvent(
                    syllable=str(entry["syllable"]),
                    start=float(entry["start_s"]),
                    duration=float(entry["duration_s"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScriptError(f"script event {i}: {exc}") from None
    if not events:
        raise ScriptError("script has no events")
    total = float(doc.get("total_duration_s", events[-1].end))
    return TimedScript(events=tuple(events), total_duration=total)


def script_to_json(script: TimedScript) -> str:
    doc = {
        "total_duration_s": script.total_duration,
        "events": [
            {"syllable": ev.syllable, "start_s": ev.start, "duration_s": ev.duration}
            for ev in script.events
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


@dataclass(frozen=True)
class FusionParams:
    a: float = 0.7                    # exponent bias of the dual-fusion weight
    lam: float = 0.5                  # temporal division ratio of three-viseme fusion
    rest_decay_alpha: float = 0.15    # per-frame decay toward neutral in silence
    method: str = "C"
    fps: float = 60.0
    initial_slot_fraction: float = 0.2  # strategy B share of T for the initial
    static_target: str = "jawopen"      # strategy A target pick: "jawopen" | "norm"

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("a must be positive")
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lam must lie in (0, 1)")
        if not 0.0 < self.rest_decay_alpha <= 1.0:
            raise ValueError("rest_decay_alpha must lie in (0, 1]")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if not 0.0 < self.initial_slot_fraction < 1.0:
            raise ValueError("initial_slot_fraction must lie in (0, 1)")
        if self.static_target not in ("jawopen", "norm"):
            raise ValueError("static_target must be 'jawopen' or 'norm'")


def fusion_weight(tau: float, a: float) -> float:
    """Cosine ease weight ((1 - cos(pi*tau)) / 2) ** a.

    Monotone non-decreasing in tau with exact endpoints w(0) = 0, w(1) = 1.
    Exponents below 1 pull the curve upward, so the handover to the second
    viseme begins earlier while both endpoints stay pinned.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    if a <= 0:
        raise ValueError(f"exponent must be positive, got {a}")
    return ((1.0 - math.cos(math.pi * tau)) / 2.0) ** a


def blend_dual(
    v1: VisemeTrajectory, v2: VisemeTrajectory, tau: float, a: float
) -> np.ndarray:
    """Convex blend of two trajectories at shared normalized time tau."""
    if v1.sample_count != v2.sample_count:
        raise ValueError(
            f"sample_count mismatch: {v1.sample_count} vs {v2.sample_count}"
        )
    w = fusion_weight(tau, a)
    return (1.0 - w) * v1.value_at(tau) + w * v2.value_at(tau)


def blend_triple(
    v1: VisemeTrajectory,
    v2: VisemeTrajectory,
    v3: VisemeTrajectory,
    tau: float,
    lam: float,
) -> np.ndarray:
    """Cascaded two-stage blend through the middle viseme.

    For tau <= lam the output moves from v1 into v2, afterwards from v2 into
    v3; both stages use the unbiased (exponent 1) cosine weight, which makes
    the output continuous at tau = lam with value v2(lam).
    """
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lam must lie in (0, 1), got {lam}")
    if not v1.sample_count == v2.sample_count == v3.sample_count:
        raise ValueError("sample_count mismatch between trajectories")
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    if tau <= lam:
        w = fusion_weight(tau / lam, 1.0)
        return (1.0 - w) * v1.value_at(tau) + w * v2.value_at(tau)
    w = fusion_weight((tau - lam) / (1.0 - lam), 1.0)
    return (1.0 - w) * v2.value_at(tau) + w * v3.value_at(tau)


def decompose_script(
    script: TimedScript, table: MappingTable
) -> list[VisemeSequence]:
    """Viseme sequence per event; wraps parse/mapping failures with event context."""
    sequences = []
    for i, ev in enumerate(script.events):
        try:
            sequences.append(map_to_visemes(split_syllable(ev.syllable), table))
        except LipSyncError as exc:
            raise SynthesisError(f"event {i} ({ev.syllable!r}): {exc}") from exc
    return sequences


def _resolve_trajectories(
    script: TimedScript, library: VisemeLibrary, table: MappingTable
) -> list[tuple[SyllableEvent, list[VisemeTrajectory]]]:
    resolved = []
    for i, (ev, seq) in enumerate(zip(script.events, decompose_script(script, table))):
        trajs = []
        for vid in seq:
            traj = library.get(vid.value)
            if traj is None:
                raise SynthesisError(
                    f"event {i} ({ev.syllable!r}): viseme {vid.value} missing from library"
                )
            trajs.append(traj)
        resolved.append((ev, trajs))
    return resolved


def _frame_grid(script: TimedScript, fps: float) -> np.ndarray:
    n = int(round(script.total_duration * fps)) + 1
    return np.arange(n) / fps


def _eval_sequence(
    trajs: list[VisemeTrajectory], tau: float, params: FusionParams
) -> np.ndarray:
    if len(trajs) == 1:
        return trajs[0].value_at(tau)
    if len(trajs) == 2:
        return blend_dual(trajs[0], trajs[1], tau, params.a)
    return blend_triple(trajs[0], trajs[1], trajs[2], tau, params.lam)


def _fill_events(times, resolved, params, value_fn) -> tuple[np.ndarray, np.ndarray]:
    """Shared frame loop: evaluate value_fn inside events, mark active frames."""
    n = len(times)
    frames = np.zeros((n, NUM_CHANNELS))
    active = np.zeros(n, dtype=bool)
    fps = params.fps
    for ev, trajs in resolved:
        k0 = max(0, int(math.ceil(ev.start * fps - 1e-9)))
        k1 = min(n - 1, int(math.floor(ev.end * fps + 1e-9)))
        for k in range(k0, k1 + 1):
            tau = min(1.0, max(0.0, (times[k] - ev.start) / ev.duration))
            frames[k] = value_fn(ev, trajs, tau)
            active[k] = True
    return frames, active


def _decay_silence(frames: np.ndarray, active: np.ndarray, alpha: float) -> None:
    keep = 1.0 - alpha
    for k in range(frames.shape[0]):
        if not active[k]:
            frames[k] = frames[k - 1] * keep if k > 0 else 0.0


def _synthesize_fusion(script, library, table, params) -> FrameSeries:
    resolved = _resolve_trajectories(script, library, table)
    times = _frame_grid(script, params.fps)
    frames, active = _fill_events(
        times, resolved, params, lambda ev, trajs, tau: _eval_sequence(trajs, tau, params)
    )
    _decay_silence(frames, active, params.rest_decay_alpha)
    return FrameSeries(frames, fps=params.fps)


def _static_target(traj: VisemeTrajectory, mode: str) -> np.ndarray:
    if mode == "norm":
        idx = int(np.argmax(np.linalg.norm(traj.values, axis=1)))
    else:
        idx = int(np.argmax(traj.values[:, JAW_OPEN]))
    return traj.values[idx]


def synthesize_method_a(script, library, table, params) -> FrameSeries:
    """Static-keyframe baseline: one target pose per viseme, linear transitions.

    Each viseme contributes its most-open frame as a keyframe at the center of
    an equal time slot; events are bracketed by neutral anchors, so the output
    is piecewise linear and returns to rest between syllables.
    """
    resolved = _resolve_trajectories(script, library, table)
    neutral = np.zeros(NUM_CHANNELS)
    key_times: list[float] = [0.0]
    key_values: list[np.ndarray] = [neutral]
    for ev, trajs in resolved:
        key_times.append(ev.start)
        key_values.append(neutral)
        width = ev.duration / len(trajs)
        for s, traj in enumerate(trajs):
            key_times.append(ev.start + (s + 0.5) * width)
            key_values.append(_static_target(traj, params.static_target))
        key_times.append(ev.end)
        key_values.append(neutral)
    key_times.append(script.total_duration)
    key_values.append(neutral)

    # Collapse duplicate keyframe times (abutting events share neutral anchors).
    ts: list[float] = []
    vs: list[np.ndarray] = []
    for t, v in zip(key_times, key_values):
        if ts and t <= ts[-1]:
            vs[-1] = v
            continue
        ts.append(t)
        vs.append(v)
    key_arr = np.array(vs)
    times = _frame_grid(script, params.fps)
    frames = np.empty((len(times), NUM_CHANNELS))
    for c in range(NUM_CHANNELS):
        frames[:, c] = np.interp(times, ts, key_arr[:, c])
    return FrameSeries(frames, fps=params.fps)


def _slot_bounds(n_visemes: int, fraction: float) -> list[float]:
    """Normalized slot boundaries within an event for hard segmentation."""
    if n_visemes == 1:
        return [0.0, 1.0]
    bounds = [0.0, fraction]
    rest = (1.0 - fraction) / (n_visemes - 1)
    for s in range(1, n_visemes):
        bounds.append(fraction + s * rest)
    bounds[-1] = 1.0
    return bounds


def synthesize_method_b(script, library, table, params) -> FrameSeries:
    """Hard-segmentation baseline: per-viseme slots, no cross-viseme blending.

    The first viseme occupies ``initial_slot_fraction`` of the period and the
    remaining visemes split the rest equally; each slot plays its complete
    trajectory time-compressed. Discontinuities at slot boundaries are the
    point of this baseline.
    """
    resolved = _resolve_trajectories(script, library, table)

    def value(ev, trajs, tau):
        bounds = _slot_bounds(len(trajs), params.initial_slot_fraction)
        slot = len(trajs) - 1
        for s in range(len(trajs)):
            if tau < bounds[s + 1]:
                slot = s
                break
        lo, hi = bounds[slot], bounds[slot + 1]
        local = min(1.0, max(0.0, (tau - lo) / (hi - lo)))
        return trajs[slot].value_at(local)

    times = _frame_grid(script, params.fps)
    frames, active = _fill_events(times, resolved, params, value)
    _decay_silence(frames, active, params.rest_decay_alpha)
    return FrameSeries(frames, fps=params.fps)


def synthesize(
    script: TimedScript,
    library: VisemeLibrary,
    table: MappingTable,
    params: FusionParams,
    energy=None,
    modulation=None,
) -> FrameSeries:
    """Generate a frame series from a timed script using the selected strategy.

    Strategy D requires an :class:`~lipsynth.audio.EnergyEnvelope` (and optional
    :class:`~lipsynth.audio.ModulationParams`); it applies gain modulation and
    smoothing on top of the strategy C output.
    """
    if params.method == "A":
        return synthesize_method_a(script, library, table, params)
    if params.method == "B":
        return synthesize_method_b(script, library, table, params)
    base = _synthesize_fusion(script, library, table, params)
    if params.method == "C":
        return base
    from .audio import ModulationParams, modulate, smooth_series

    if energy is None:
        raise SynthesisError("strategy D requires an audio energy envelope")
    mod = modulation or ModulationParams()
    return smooth_series(modulate(base, energy, mod), mod)


def boundary_discontinuity(
    series: FrameSeries,
    script: TimedScript,
    table: MappingTable,
    params: FusionParams,
) -> float:
    """Largest per-channel frame step across intra-event viseme boundaries.

    Boundary times follow the hard-segmentation slot layout, so the same time
    points are probed for every strategy.
    """
    sequences = decompose_script(script, table)
    worst = 0.0
    fps = series.fps
    for ev, seq in zip(script.events, sequences):
        if len(seq) < 2:
            continue
        bounds = _slot_bounds(len(seq), params.initial_slot_fraction)
        for b in bounds[1:-1]:
            tb = ev.start + b * ev.duration
            k = int(math.ceil((tb - series.start_time) * fps - 1e-9))
            if 1 <= k < series.frame_count:
                jump = float(np.max(np.abs(series.values[k] - series.values[k - 1])))
                worst = max(worst, jump)
    return worst
