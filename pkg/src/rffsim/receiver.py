"""Receiver chain: synchronization, preamble extraction, normalization,
and the short-time Fourier transform.

The STFT uses sliding frames of length W hopped by R; frame m covers
samples [(m-1)*R, (m-1)*R + W), is multiplied by the window, and goes
through a W-point DFT. Partial tail frames are dropped, never padded.
"""

import struct
from dataclasses import dataclass

import numpy as np
from scipy import signal as sp_signal

from .signals import ComplexSignal, LoraConfig

__all__ = [
    "StftConfig",
    "Spectrogram",
    "synchronize",
    "extract_preamble",
    "rms_normalize",
    "stft",
    "save_spectrogram",
    "load_spectrogram",
]

_SPG_MAGIC = b"SPG1"
_LEVEL_FLAGS = {None: 0, "high": 1, "low": 2}
_FLAG_LEVELS = {v: k for k, v in _LEVEL_FLAGS.items()}


@dataclass(frozen=True)
class StftConfig:
    window_len: int = 1024
    hop: int = 512
    window_fn: str = "hann"

    def __post_init__(self):
        w = self.window_len
        if w < 1 or (w & (w - 1)) != 0:
            raise ValueError("window_len must be a power of two")
        if not 1 <= self.hop <= w:
            raise ValueError("hop must satisfy 1 <= hop <= window_len")


def _window(config: StftConfig) -> np.ndarray:
    name = config.window_fn.lower()
    w = config.window_len
    if name == "hann":
        n = np.arange(w)
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / w)
    if name in ("rectangular", "boxcar", "rect"):
        return np.ones(w)
    return sp_signal.get_window(name, w, fftbins=True)


@dataclass(frozen=True)
class Spectrogram:
    """W x M complex STFT matrix; row w is DFT bin w, column m is frame m."""

    bins: np.ndarray
    config: StftConfig
    power_level: str | None = None

    def __post_init__(self):
        if self.bins.ndim != 2 or self.bins.shape[0] != self.config.window_len:
            raise ValueError(
                f"bins must be ({self.config.window_len}, M), got {self.bins.shape}"
            )
        if not np.all(np.isfinite(self.bins.real)) or not np.all(
            np.isfinite(self.bins.imag)
        ):
            raise ValueError("spectrogram contains non-finite entries")
        if self.power_level not in (None, "high", "low"):
            raise ValueError(f"bad power_level {self.power_level!r}")

    @property
    def frames(self) -> int:
        return self.bins.shape[1]


def synchronize(rx: ComplexSignal, template: ComplexSignal) -> int:
    """Offset of the template inside rx by peak cross-correlation magnitude.

    Ties break toward the smallest lag. The template must carry energy and
    be no longer than rx.
    """
    t = template.samples
    if np.sum(np.abs(t) ** 2) == 0:
        raise ValueError("template has zero energy")
    x = rx.samples
    if len(x) < len(t):
        raise ValueError("rx shorter than template")
    corr = sp_signal.correlate(x, t, mode="valid", method="fft")
    return int(np.argmax(np.abs(corr)))


def extract_preamble(rx: ComplexSignal, offset: int,
                     config: LoraConfig) -> ComplexSignal:
    """Slice the K-symbol preamble starting at ``offset``."""
    need = config.preamble_samples
    if offset < 0 or offset + need > len(rx):
        raise ValueError(
            f"cannot take {need} samples at offset {offset} "
            f"from a {len(rx)}-sample signal"
        )
    return ComplexSignal(rx.samples[offset:offset + need].copy(), rx.sample_rate)


def rms_normalize(signal: ComplexSignal) -> ComplexSignal:
    """Scale so the root-mean-square magnitude is exactly 1."""
    rms = np.sqrt(np.mean(np.abs(signal.samples) ** 2))
    if rms == 0:
        raise ValueError("cannot normalize an all-zero signal")
    return ComplexSignal(signal.samples / rms, signal.sample_rate)


def stft(signal: ComplexSignal, config: StftConfig | None = None,
         power_level: str | None = None) -> Spectrogram:
    """Sliding-frame STFT producing a window_len x M matrix."""
    if config is None:
        config = StftConfig()
    x = signal.samples
    w, r = config.window_len, config.hop
    if len(x) < w:
        raise ValueError(f"signal ({len(x)}) shorter than window ({w})")
    m = (len(x) - w) // r + 1
    idx = np.arange(w)[None, :] + r * np.arange(m)[:, None]
    frames = x[idx] * _window(config)[None, :]
    bins = np.fft.fft(frames, axis=1).T
    return Spectrogram(bins=np.ascontiguousarray(bins), config=config,
                       power_level=power_level)


def save_spectrogram(spec: Spectrogram, path) -> None:
    """Write the SPG1 binary format.

    16-byte header: magic "SPG1", W, M, flags as little-endian u32; flags
    encode the power level (0 none, 1 high, 2 low). The payload is the
    row-major W x M matrix as interleaved (re, im) float32.
    """
    w, m = spec.bins.shape
    header = struct.pack("<4sIII", _SPG_MAGIC, w, m,
                         _LEVEL_FLAGS[spec.power_level])
    inter = np.empty((w, m, 2), dtype="<f4")
    inter[:, :, 0] = spec.bins.real
    inter[:, :, 1] = spec.bins.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(inter.tobytes())


def load_spectrogram(path, config: StftConfig | None = None) -> Spectrogram:
    with open(path, "rb") as fh:
        header = fh.read(16)
        magic, w, m, flags = struct.unpack("<4sIII", header)
        if magic != _SPG_MAGIC:
            raise ValueError(f"not an SPG1 file: magic {magic!r}")
        if flags not in _FLAG_LEVELS:
            raise ValueError(f"unknown SPG1 flags {flags}")
        payload = np.frombuffer(fh.read(w * m * 8), dtype="<f4")
    if payload.size != w * m * 2:
        raise ValueError("truncated SPG1 payload")
    inter = payload.reshape(w, m, 2)
    bins = inter[:, :, 0].astype(np.complex128) + 1j * inter[:, :, 1]
    if config is None:
        config = StftConfig(window_len=w, hop=w // 2 if w > 1 else 1)
    return Spectrogram(bins=bins, config=config, power_level=_FLAG_LEVELS[flags])
