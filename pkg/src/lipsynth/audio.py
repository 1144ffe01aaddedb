"""Audio ingestion, RMS energy envelopes, gain modulation and smoothing.

The energy path implements the richest generation strategy: a short-window
RMS envelope of the speech waveform, normalized robustly by percentile,
drives a per-frame gain over all 27 channels, after which a low-pass stage
(exponential moving average by default) removes residual jitter.
"""

from __future__ import annotations

import io
import wave
from dataclasses import dataclass, replace

import numpy as np

from .errors import FormatError
from .series import FrameSeries

EMA = "ema"
MOVING_AVERAGE = "moving-average"


@dataclass(frozen=True)
class ModulationParams:
    window: float = 0.025          # RMS window, seconds
    gain_floor: float = 0.2        # minimum gain during silence
    norm_percentile: float = 95.0  # envelope normalization percentile
    ema_alpha: float = 0.3         # smoothing coefficient
    smoothing: str = EMA           # "ema" | "moving-average"
    ma_window: int = 5             # frames, used by the moving-average variant

    def __post_init__(self):
        if self.window <= 0:
            raise ValueError("window must be positive")
        if not 0.0 <= self.gain_floor < 1.0:
            raise ValueError("gain_floor must lie in [0, 1)")
        if not 0.0 < self.norm_percentile <= 100.0:
            raise ValueError("norm_percentile must lie in (0, 100]")
        if not 0.0 < self.ema_alpha <= 1.0:
            raise ValueError("ema_alpha must lie in (0, 1]")
        if self.smoothing not in (EMA, MOVING_AVERAGE):
            raise ValueError(f"unknown smoothing mode {self.smoothing!r}")
        if self.ma_window < 3 or self.ma_window % 2 == 0:
            raise ValueError("ma_window must be an odd integer >= 3")


@dataclass(frozen=True, eq=False)
class EnergyEnvelope:
    """Per-output-frame normalized energy in [0, 1]."""

    values: np.ndarray
    fps: float

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("envelope must be a non-empty 1-d array")
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("envelope values must be finite and lie in [0, 1]")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


def read_wav(source) -> tuple[np.ndarray, int]:
    """Read a PCM-16 RIFF/WAVE stream into normalized samples in [-1, 1].

    Accepts a path, a binary file object, or raw bytes. Stereo input is
    averaged down to mono.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    try:
        with wave.open(source, "rb") as wf:
            if wf.getcomptype() != "NONE":
                raise FormatError(f"unsupported WAV compression {wf.getcomptype()!r}")
            if wf.getsampwidth() != 2:
                raise FormatError(
                    f"only 16-bit PCM is supported, got {8 * wf.getsampwidth()}-bit"
                )
            n_channels = wf.getnchannels()
            sample_rate = wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except wave.Error as exc:
        raise FormatError(f"invalid WAV stream: {exc}") from None
    data = np.frombuffer(raw, dtype="<i2").astype(float) / 32768.0
    if n_channels > 1:
        usable = (data.size // n_channels) * n_channels
        data = data[:usable].reshape(-1, n_channels).mean(axis=1)
    return data, sample_rate


def write_wav(path, samples, sample_rate: int) -> None:
    """Write mono float samples in [-1, 1] as PCM-16."""
    pcm = np.clip(np.asarray(samples, dtype=float), -1.0, 1.0)
    pcm = np.round(pcm * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(sample_rate)
        wf.writeframes(pcm.tobytes())


def frame_rms(
    samples,
    sample_rate: int,
    fps: float,
    window: float = 0.025,
    n_frames: int | None = None,
) -> np.ndarray:
    """Raw (un-normalized) RMS per output frame, window centered per frame.

    Edge windows truncate to the available samples; frames whose window falls
    entirely outside the audio read as 0.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("audio is empty")
    if fps <= 0:
        raise ValueError("fps must be positive")
    duration = x.size / sample_rate
    if n_frames is None:
        n_frames = int(round(duration * fps)) + 1
    half = window / 2.0
    sq = np.concatenate([[0.0], np.cumsum(x * x)])
    out = np.empty(n_frames)
    for k in range(n_frames):
        t = k / fps
        lo = max(0, int(round((t - half) * sample_rate)))
        hi = min(x.size, int(round((t + half) * sample_rate)))
        out[k] = np.sqrt((sq[hi] - sq[lo]) / (hi - lo)) if hi > lo else 0.0
    return out


def rms_envelope(
    samples,
    sample_rate: int,
    fps: float,
    params: ModulationParams | None = None,
    n_frames: int | None = None,
) -> EnergyEnvelope:
    """Percentile-normalized RMS energy envelope clamped into [0, 1].

    Normalizing by a high percentile instead of the maximum keeps the
    envelope robust to clicks and makes it invariant to rescaling of the
    waveform. All-silent audio yields an all-zero envelope.
    """
    p = params or ModulationParams()
    raw = frame_rms(samples, sample_rate, fps, p.window, n_frames)
    scale = float(np.percentile(raw, p.norm_percentile))
    if scale <= 0.0:
        return EnergyEnvelope(np.zeros_like(raw), fps=fps)
    return EnergyEnvelope(np.clip(raw / scale, 0.0, 1.0), fps=fps)


def modulate(
    series: FrameSeries, env: EnergyEnvelope, params: ModulationParams | None = None
) -> FrameSeries:
    """Scale every channel by the per-frame gain g = floor + (1 - floor) * energy."""
    p = params or ModulationParams()
    if len(env) != series.frame_count:
        raise ValueError(
            f"envelope has {len(env)} frames, series has {series.frame_count}"
        )
    gain = p.gain_floor + (1.0 - p.gain_floor) * env.values
    values = np.clip(series.values * gain[:, None], 0.0, 1.0)
    return replace(series, values=values)


def ema_smooth(series: FrameSeries, alpha: float) -> FrameSeries:
    """First-order exponential smoothing per channel: y[n] = a*x[n] + (1-a)*y[n-1]."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    x = series.values
    y = np.empty_like(x)
    y[0] = x[0]
    keep = 1.0 - alpha
    for k in range(1, x.shape[0]):
        y[k] = alpha * x[k] + keep * y[k - 1]
    return replace(series, values=y)


def smooth_series(series: FrameSeries, params: ModulationParams) -> FrameSeries:
    """Apply the configured smoothing stage (EMA default, moving average variant)."""
    if params.smoothing == MOVING_AVERAGE:
        from .builder import lowpass_filter

        return lowpass_filter(series, params.ma_window)
    return ema_smooth(series, params.ema_alpha)
