"""Deterministic synthetic fixtures: capture streams, scripts and audio.

Everything here is seeded and reproducible, which gives the test suite and
the demo pipeline self-contained data: per-viseme repeated-pronunciation
captures, the four five-syllable evaluation sentences with uniform timing,
and matching waveforms whose RMS energy tracks the scripted events.

Fixture data, not recordings: amplitudes are hand-picked channel signatures,
one distinct pose per viseme category.
"""

from __future__ import annotations

import numpy as np

from .channels import CHANNEL_INDEX, NUM_CHANNELS
from .library import VisemeLibrary
from .pinyin import VISEME_IDS
from .series import FrameSeries, VisemeTrajectory
from .synthesis import SyllableEvent, TimedScript

# Per-viseme channel signatures (peak activation per channel). Every viseme
# keeps some jaw opening so cycle segmentation on jawOpen works for all 14.
VISEME_PROFILES: dict[str, dict[str, float]] = {
    "V1_BPM": {"mouthClose": 0.85, "mouthPressLeft": 0.6, "mouthPressRight": 0.6,
               "mouthRollUpper": 0.3, "mouthRollLower": 0.3, "jawOpen": 0.25},
    "V2_F": {"mouthRollLower": 0.7, "mouthUpperUpLeft": 0.45, "mouthUpperUpRight": 0.45,
             "mouthPressLeft": 0.3, "mouthPressRight": 0.3, "jawOpen": 0.3},
    "V3_D": {"mouthStretchLeft": 0.4, "mouthStretchRight": 0.4, "jawOpen": 0.35,
             "mouthLowerDownLeft": 0.3, "mouthLowerDownRight": 0.3},
    "V4_GKH": {"jawOpen": 0.5, "mouthLowerDownLeft": 0.25, "mouthLowerDownRight": 0.25},
    "V5_JQX": {"mouthSmileLeft": 0.5, "mouthSmileRight": 0.5, "mouthStretchLeft": 0.3,
               "mouthStretchRight": 0.3, "jawOpen": 0.3},
    "V6_ZCS": {"mouthSmileLeft": 0.45, "mouthSmileRight": 0.45, "mouthUpperUpLeft": 0.5,
               "mouthUpperUpRight": 0.5, "mouthLowerDownLeft": 0.4,
               "mouthLowerDownRight": 0.4, "jawOpen": 0.25},
    "V7_ZH": {"mouthPucker": 0.5, "mouthFunnel": 0.35, "jawOpen": 0.3},
    "V8_A": {"jawOpen": 0.9, "mouthLowerDownLeft": 0.5, "mouthLowerDownRight": 0.5,
             "mouthUpperUpLeft": 0.35, "mouthUpperUpRight": 0.35,
             "mouthStretchLeft": 0.2, "mouthStretchRight": 0.2},
    "V9_O": {"jawOpen": 0.55, "mouthFunnel": 0.6, "mouthPucker": 0.45},
    "V10_E": {"jawOpen": 0.45, "mouthStretchLeft": 0.35, "mouthStretchRight": 0.35,
              "mouthSmileLeft": 0.25, "mouthSmileRight": 0.25},
    "V11_I": {"mouthSmileLeft": 0.6, "mouthSmileRight": 0.6, "mouthStretchLeft": 0.45,
              "mouthStretchRight": 0.45, "jawOpen": 0.2},
    "V12_U": {"mouthPucker": 0.8, "mouthFunnel": 0.5, "jawOpen": 0.25, "mouthClose": 0.2},
    "V13_V": {"mouthFunnel": 0.8, "mouthPucker": 0.6, "mouthShrugUpper": 0.3, "jawOpen": 0.3},
    "V14_AI": {"jawOpen": 0.7, "mouthFunnel": 0.3, "mouthStretchLeft": 0.3,
               "mouthStretchRight": 0.3, "mouthLowerDownLeft": 0.35,
               "mouthLowerDownRight": 0.35},
}

# The four five-syllable evaluation sentences.
TEST_SENTENCES: dict[str, list[str]] = {
    "s1": ["yi", "ge", "da", "xi", "gua"],
    "s2": ["shi", "fu", "he", "lv", "cha"],
    "s3": ["ba", "ba", "mai", "bai", "cai"],
    "s4": ["zi", "ji", "zuo", "zao", "can"],
}


def profile_vector(viseme_id: str) -> np.ndarray:
    prof = VISEME_PROFILES[viseme_id]
    vec = np.zeros(NUM_CHANNELS)
    for name, amp in prof.items():
        vec[CHANNEL_INDEX[name]] = amp
    return vec


def articulation_envelope(tau) -> np.ndarray:
    """Contract-hold-release envelope on [0, 1]: cosine rise, plateau, cosine fall."""
    t = np.asarray(tau, dtype=float)
    rise, fall = 0.3, 0.7
    env = np.ones_like(t)
    up = t < rise
    env[up] = 0.5 * (1.0 - np.cos(np.pi * t[up] / rise))
    down = t > fall
    env[down] = 0.5 * (1.0 - np.cos(np.pi * (1.0 - t[down]) / (1.0 - fall)))
    return env


def cosine_cycle_series(
    n_cycles: int = 5,
    freq: float = 2.0,
    fps: float = 60.0,
    amplitude: float = 1.0,
    channel: str = "jawOpen",
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> FrameSeries:
    """Pure raised-cosine cycles on a single channel: a * (1 - cos(2 pi f t)) / 2."""
    duration = n_cycles / freq
    n = int(round(duration * fps)) + 1
    t = np.arange(n) / fps
    values = np.zeros((n, NUM_CHANNELS))
    values[:, CHANNEL_INDEX[channel]] = amplitude * 0.5 * (1.0 - np.cos(2.0 * np.pi * freq * t))
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        values += rng.normal(0.0, noise_sigma, size=values.shape)
    return FrameSeries(np.clip(values, 0.0, 1.0), fps=fps)


def make_capture_series(
    viseme_id: str,
    n_cycles: int = 5,
    cycle_duration: float = 0.5,
    fps: float = 60.0,
    noise_sigma: float = 0.01,
    seed: int = 42,
) -> FrameSeries:
    """Repeated-pronunciation capture for one viseme: profile x envelope + noise."""
    duration = n_cycles * cycle_duration
    n = int(round(duration * fps)) + 1
    t = np.arange(n) / fps
    phase = (t % cycle_duration) / cycle_duration
    env = articulation_envelope(phase)
    # The trailing sample of the last cycle wraps to phase 0; force it to rest.
    env[-1] = 0.0
    values = env[:, None] * profile_vector(viseme_id)[None, :]
    if noise_sigma > 0:
        rng = np.random.default_rng([seed, VISEME_IDS.index(viseme_id)])
        values = values + rng.normal(0.0, noise_sigma, size=values.shape)
    return FrameSeries(np.clip(values, 0.0, 1.0), fps=fps)


def synthetic_library(sample_count: int = 60) -> VisemeLibrary:
    """Exact noise-free library built directly from the channel signatures."""
    tau = np.arange(sample_count) / (sample_count - 1)
    env = articulation_envelope(tau)
    visemes = {
        vid: VisemeTrajectory(env[:, None] * profile_vector(vid)[None, :])
        for vid in VISEME_IDS
    }
    return VisemeLibrary(sample_count=sample_count, visemes=visemes)


def make_script(
    syllables: list[str],
    syllable_duration: float = 0.4,
    gap: float = 0.1,
    tail: float = 0.2,
) -> TimedScript:
    """Uniformly timed script: one event per syllable, fixed duration and gap."""
    events = []
    for i, syl in enumerate(syllables):
        events.append(
            SyllableEvent(syllable=syl, start=i * (syllable_duration + gap), duration=syllable_duration)
        )
    total = events[-1].end + tail
    return TimedScript(events=tuple(events), total_duration=total)


def make_script_audio(
    script: TimedScript,
    sample_rate: int = 16000,
    carrier_hz: float = 220.0,
    amplitude: float = 0.8,
) -> np.ndarray:
    """Waveform whose RMS envelope tracks the script: tone bursts inside events,
    digital silence between them."""
    n = int(round(script.total_duration * sample_rate)) + 1
    samples = np.zeros(n)
    t = np.arange(n) / sample_rate
    for ev in script.events:
        lo = int(np.ceil(ev.start * sample_rate))
        hi = min(n - 1, int(np.floor(ev.end * sample_rate)))
        seg_t = t[lo:hi + 1]
        tau = (seg_t - ev.start) / ev.duration
        env = articulation_envelope(np.clip(tau, 0.0, 1.0))
        samples[lo:hi + 1] = amplitude * env * np.sin(2.0 * np.pi * carrier_hz * seg_t)
    return samples
