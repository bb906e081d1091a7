"""LoRa chirp-spread-spectrum preamble synthesis.

All signals are complex baseband; the carrier frequency in LoraConfig is
carried along as metadata only and never enters the math.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LoraConfig",
    "ComplexSignal",
    "PacketPair",
    "upchirp",
    "build_preamble",
    "build_packet_pair",
    "frame_count",
]


@dataclass(frozen=True)
class LoraConfig:
    """Radio parameters used to synthesize preambles.

    Attributes
    ----------
    carrier_freq : float
        Nominal RF carrier in Hz, metadata only.
    bandwidth : float
        Chirp sweep bandwidth B in Hz.
    spreading_factor : int
        LoRa SF; a symbol lasts 2**SF / B seconds.
    sample_rate : float
        Baseband sampling frequency f_S in Hz. 2**SF * f_S / B must be a
        positive integer so symbols hold a whole number of samples.
    preamble_symbols : int
        Number of identical upchirps in a preamble. LoRa radios use at
        least ten; shorter values are accepted for small test signals.
    coding_rate : str
        Payload coding rate, metadata only (payloads are never built).
    """

    carrier_freq: float = 915e6
    bandwidth: float = 62.5e3
    spreading_factor: int = 10
    sample_rate: float = 1e6
    preamble_symbols: int = 10
    coding_rate: str = "4/5"

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.sample_rate < self.bandwidth:
            raise ValueError("sample_rate must be at least the bandwidth")
        if not 6 <= self.spreading_factor <= 12:
            raise ValueError("spreading_factor must be in [6, 12]")
        if self.preamble_symbols < 1:
            raise ValueError("preamble_symbols must be >= 1")
        exact = (1 << self.spreading_factor) * self.sample_rate / self.bandwidth
        if abs(exact - round(exact)) > 1e-6 or round(exact) <= 0:
            raise ValueError(
                f"2^SF * f_S / B = {exact} is not a positive integer; "
                "choose a sample rate commensurate with the bandwidth"
            )

    @property
    def symbol_duration(self) -> float:
        return (1 << self.spreading_factor) / self.bandwidth

    @property
    def samples_per_symbol(self) -> int:
        return round((1 << self.spreading_factor) * self.sample_rate / self.bandwidth)

    @property
    def preamble_samples(self) -> int:
        return self.preamble_symbols * self.samples_per_symbol


@dataclass(frozen=True)
class ComplexSignal:
    """A complex baseband sample sequence tagged with its sample rate."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        arr = np.asarray(self.samples)
        if not np.iscomplexobj(arr):
            arr = arr.astype(np.complex128)
        object.__setattr__(self, "samples", arr)
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            raise ValueError("signal contains non-finite samples")

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


@dataclass(frozen=True)
class PacketPair:
    """High/low power transmission pair sharing one ideal preamble.

    Both members hold the same impairment-free waveform; per-device
    distortion is imprinted later by the PA model at two drive levels.
    """

    high: ComplexSignal
    low: ComplexSignal
    gap_samples: int
    device_id: str = "unlabeled"

    def __post_init__(self):
        if self.gap_samples < 0:
            raise ValueError("gap_samples must be >= 0")
        if len(self.high) != len(self.low):
            raise ValueError("pair members must have equal length")


def upchirp(config: LoraConfig) -> ComplexSignal:
    """One unmodulated upchirp symbol.

    The instantaneous frequency sweeps -B/2 to +B/2 over one symbol with
    phase 2*pi*(-B/2*t + B/(2T)*t^2), so the envelope is exactly 1 and the
    phase returns to 0 at the symbol boundary.
    """
    n = np.arange(config.samples_per_symbol)
    t = n / config.sample_rate
    b = config.bandwidth
    T = config.symbol_duration
    phase = 2.0 * np.pi * (-0.5 * b * t + (b / (2.0 * T)) * t * t)
    return ComplexSignal(np.exp(1j * phase), config.sample_rate)


def build_preamble(config: LoraConfig) -> ComplexSignal:
    """K identical upchirps concatenated back to back."""
    one = upchirp(config)
    return ComplexSignal(
        np.tile(one.samples, config.preamble_symbols), config.sample_rate
    )


def build_packet_pair(config: LoraConfig, device_id: str = "unlabeled",
                      gap_samples: int | None = None) -> PacketPair:
    """Frame one ideal preamble into a high/low transmission pair.

    The default gap between the two transmissions is one symbol duration.
    """
    if gap_samples is None:
        gap_samples = config.samples_per_symbol
    preamble = build_preamble(config)
    return PacketPair(high=preamble, low=preamble,
                      gap_samples=gap_samples, device_id=device_id)


def frame_count(config: LoraConfig, window: int, hop: int) -> int:
    """Number of full STFT frames M of a preamble.

    M = floor((K * 2^SF / B * f_S - W) / R) + 1; partial tail frames are
    never padded, so this matches exactly what the STFT produces.
    """
    if hop < 1:
        raise ValueError("hop must be >= 1")
    length = config.preamble_samples
    if window > length:
        raise ValueError(
            f"window ({window}) longer than preamble ({length} samples)"
        )
    return (length - window) // hop + 1
