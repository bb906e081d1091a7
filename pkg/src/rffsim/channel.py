"""Tapped-delay-line wireless channel with static, slow, or fast fading.

The channel convolves the transmitted waveform with per-tap complex gain
trajectories and then adds white Gaussian noise. Slow fading keeps every
tap within 1% of its starting gain over the realization, which is the
regime where the quotient fingerprint cancels the channel; fast fading
uses a Jakes-style sum of sinusoids so the two halves of a packet pair
see decorrelated gains.
"""

from dataclasses import dataclass

import numpy as np

from .signals import ComplexSignal

__all__ = [
    "ChannelTap",
    "ChannelSpec",
    "ChannelRealization",
    "realize",
    "apply_channel",
    "snr_measure",
]

_JAKES_OSCILLATORS = 8
# Fading trajectories are synthesized on a coarse time grid and linearly
# interpolated; Doppler rates of interest sit far below the grid Nyquist.
_MAX_GRID_STEP = 4096


@dataclass(frozen=True)
class ChannelTap:
    delay: int        # samples
    power: float      # linear, fractions of total

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError("tap delay must be >= 0")
        if self.power <= 0:
            raise ValueError("tap power must be positive")


@dataclass(frozen=True)
class ChannelSpec:
    """Stochastic description of one propagation condition.

    snr_db of None (or the string "noiseless") disables noise injection.
    """

    taps: tuple
    fading: str = "static"
    doppler_hz: float = 0.0
    snr_db: float | None = None
    seed: int = 0

    def __post_init__(self):
        taps = tuple(
            t if isinstance(t, ChannelTap) else ChannelTap(**t) for t in self.taps
        )
        object.__setattr__(self, "taps", taps)
        if isinstance(self.snr_db, str):
            if self.snr_db != "noiseless":
                raise ValueError(f"unknown snr_db value {self.snr_db!r}")
            object.__setattr__(self, "snr_db", None)
        if len(taps) < 1:
            raise ValueError("at least one tap required")
        total = sum(t.power for t in taps)
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"tap powers must sum to 1, got {total}")
        delays = [t.delay for t in taps]
        if any(b <= a for a, b in zip(delays, delays[1:])):
            raise ValueError("tap delays must be strictly increasing")
        if self.fading not in ("static", "slow", "fast"):
            raise ValueError(f"unknown fading kind {self.fading!r}")
        if self.fading == "static" and self.doppler_hz != 0.0:
            raise ValueError("static fading requires doppler_hz = 0")
        if self.doppler_hz < 0:
            raise ValueError("doppler_hz must be >= 0")

    @property
    def max_delay(self) -> int:
        return self.taps[-1].delay


@dataclass(frozen=True)
class ChannelRealization:
    """Per-tap complex gain trajectories drawn from a ChannelSpec."""

    gains: np.ndarray      # (n_taps, duration) complex
    delays: tuple          # samples, one per tap
    seed: int

    def __post_init__(self):
        if not np.all(np.isfinite(self.gains)):
            raise ValueError("gains must be finite")

    @property
    def duration(self) -> int:
        return self.gains.shape[1]


def _jakes(rng, doppler_hz, times):
    """Sum-of-sinusoids fading process with unit average power."""
    arrivals = rng.uniform(0.0, 2.0 * np.pi, size=_JAKES_OSCILLATORS)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=_JAKES_OSCILLATORS)
    freqs = doppler_hz * np.cos(arrivals)
    arg = 2.0 * np.pi * np.outer(times, freqs) + phases
    return np.exp(1j * arg).sum(axis=1) / np.sqrt(_JAKES_OSCILLATORS)


def realize(spec: ChannelSpec, duration_samples: int,
            sample_rate: float) -> ChannelRealization:
    """Draw gain trajectories covering ``duration_samples``.

    static: one Rayleigh gain per tap (unit mean magnitude, uniform phase)
    held constant. slow: the static gain plus a drift bounded so the
    relative change never exceeds 1% over the realization. fast: plain
    Jakes sum of sinusoids at the spec's Doppler rate. Deterministic for a
    given (spec.seed, duration, sample_rate).
    """
    if duration_samples < 1:
        raise ValueError("duration must be >= 1")
    n_taps = len(spec.taps)
    rng = np.random.default_rng([spec.seed, 0x0C])
    gains = np.empty((n_taps, duration_samples), dtype=np.complex128)

    # unit-mean Rayleigh magnitude: E[r] = scale * sqrt(pi/2) = 1
    ray_scale = np.sqrt(2.0 / np.pi)

    if spec.doppler_hz > 0:
        step = int(min(_MAX_GRID_STEP,
                       max(1.0, sample_rate / (spec.doppler_hz * 200.0))))
    else:
        step = _MAX_GRID_STEP
    grid = np.arange(0, duration_samples + step, step)
    t_grid = grid / sample_rate

    for i, tap in enumerate(spec.taps):
        amp = np.sqrt(tap.power)
        if spec.fading == "static":
            g0 = rng.rayleigh(ray_scale) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            gains[i, :] = amp * g0
        elif spec.fading == "slow":
            g0 = rng.rayleigh(ray_scale) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            u = _jakes(rng, spec.doppler_hz, t_grid)
            v = u - u[0]
            peak = np.max(np.abs(v))
            drift = (0.01 / peak) * v if peak > 0 else v
            coarse = amp * g0 * (1.0 + drift)
            full = np.interp(np.arange(duration_samples), grid, coarse.real) \
                + 1j * np.interp(np.arange(duration_samples), grid, coarse.imag)
            gains[i, :] = full
        else:  # fast
            coarse = amp * _jakes(rng, spec.doppler_hz, t_grid)
            full = np.interp(np.arange(duration_samples), grid, coarse.real) \
                + 1j * np.interp(np.arange(duration_samples), grid, coarse.imag)
            gains[i, :] = full

    return ChannelRealization(gains=gains,
                              delays=tuple(t.delay for t in spec.taps),
                              seed=spec.seed)


def apply_channel(signal: ComplexSignal, real: ChannelRealization,
                  spec: ChannelSpec) -> ComplexSignal:
    """Time-varying convolution with the realized taps, then AWGN.

    Produces the full convolution tail, so the output is longer than the
    input by the largest tap delay; the realization must cover that
    length. Noise power is set against the mean power of the convolved
    signal. A noiseless spec adds nothing.
    """
    x = signal.samples
    n = len(x)
    max_d = max(real.delays)
    out_len = n + max_d
    if real.duration < out_len:
        raise ValueError(
            f"realization covers {real.duration} samples, "
            f"need {out_len} (signal {n} + max delay {max_d})"
        )
    y = np.zeros(out_len, dtype=np.complex128)
    for i, d in enumerate(real.delays):
        y[d:d + n] += real.gains[i, d:d + n] * x

    if spec.snr_db is not None:
        power = np.mean(np.abs(y) ** 2)
        sigma2 = power * 10.0 ** (-spec.snr_db / 10.0)
        rng = np.random.default_rng([spec.seed, 0x4E])
        noise = np.sqrt(sigma2 / 2.0) * (
            rng.standard_normal(out_len) + 1j * rng.standard_normal(out_len)
        )
        y = y + noise

    return ComplexSignal(y, signal.sample_rate)


def snr_measure(clean: ComplexSignal, noisy: ComplexSignal) -> float:
    """10*log10 of clean power over residual power; inf when identical."""
    if len(clean) != len(noisy):
        raise ValueError("signals must have equal length")
    p_clean = np.sum(np.abs(clean.samples) ** 2)
    if p_clean == 0:
        raise ValueError("clean signal has zero power")
    p_err = np.sum(np.abs(noisy.samples - clean.samples) ** 2)
    if p_err == 0:
        return np.inf
    return 10.0 * np.log10(p_clean / p_err)
