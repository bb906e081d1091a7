"""Per-device power amplifier nonlinearity.

The PA is memoryless and characterized by the Saleh AM/AM and AM/PM
curves. Each device owns one parameter set; driving the same preamble at
two power levels through it imprints the device-unique pair of complex
gain constants that the quotient fingerprint later isolates.
"""

from dataclasses import dataclass

import numpy as np

from .signals import ComplexSignal

__all__ = [
    "SalehParams",
    "DeviceProfile",
    "DRIVE_LOW_DEFAULT",
    "saleh_am_am",
    "saleh_am_pm",
    "drive_scale",
    "apply_pa",
    "sample_device_population",
]

# Low-level drive relative to the PA input saturation scale. The high
# level follows from the dBm difference, which puts it visibly into
# compression so the high/low gain ratio differs across devices.
DRIVE_LOW_DEFAULT = 0.5


@dataclass(frozen=True)
class SalehParams:
    """Saleh model coefficients.

    AM/AM: A(r) = alpha_a * r / (1 + beta_a * r^2)
    AM/PM: Phi(r) = alpha_phi * r^2 / (1 + beta_phi * r^2)

    Defaults are the classical traveling-wave-tube fit, used here as a
    plausible nominal for a batch of same-design transmitters.
    """

    alpha_a: float = 2.1587
    beta_a: float = 1.1517
    alpha_phi: float = 4.0033
    beta_phi: float = 9.1040

    def __post_init__(self):
        vals = (self.alpha_a, self.beta_a, self.alpha_phi, self.beta_phi)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("Saleh parameters must be finite")
        if self.alpha_a <= 0:
            raise ValueError("alpha_a must be positive")
        if self.beta_a < 0 or self.beta_phi < 0:
            raise ValueError("beta_a and beta_phi must be non-negative")


@dataclass(frozen=True)
class DeviceProfile:
    """One transmitter: its PA curve and its two transmit power settings."""

    device_id: str
    pa: SalehParams
    power_high_dbm: float = 17.0
    power_low_dbm: float = 10.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.power_high_dbm <= self.power_low_dbm:
            raise ValueError("power_high_dbm must exceed power_low_dbm")


def saleh_am_am(r, params: SalehParams):
    """Output amplitude A(r) for input amplitude r >= 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("amplitude must be non-negative")
    return params.alpha_a * r / (1.0 + params.beta_a * r * r)


def saleh_am_pm(r, params: SalehParams):
    """Phase shift Phi(r) in radians for input amplitude r >= 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("amplitude must be non-negative")
    r2 = r * r
    return params.alpha_phi * r2 / (1.0 + params.beta_phi * r2)


def drive_scale(profile: DeviceProfile, level: str,
                drive_low: float = DRIVE_LOW_DEFAULT) -> float:
    """Linear drive amplitude g for a power level.

    The low level sits at ``drive_low`` on the PA input scale and the high
    level is 10^((P_high - P_low)/20) above it.
    """
    if level not in ("high", "low"):
        raise ValueError(f"level must be 'high' or 'low', got {level!r}")
    if level == "low":
        return drive_low
    step = profile.power_high_dbm - profile.power_low_dbm
    return drive_low * 10.0 ** (step / 20.0)


def apply_pa(signal: ComplexSignal, profile: DeviceProfile, level: str,
             drive_low: float = DRIVE_LOW_DEFAULT) -> ComplexSignal:
    """Drive a signal through the device's PA at the given level.

    Sample-wise (memoryless): a sample c with r = |c| becomes
    A(g*r) * exp(j*(arg c + Phi(g*r))) where g is the drive scale.
    """
    g = drive_scale(profile, level, drive_low)
    x = signal.samples
    r = np.abs(x)
    amp = saleh_am_am(g * r, profile.pa)
    phase_shift = saleh_am_pm(g * r, profile.pa)
    # arg(0) is irrelevant since A(0) = 0; avoid 0/0 by flooring r.
    unit = np.where(r > 0, x / np.maximum(r, 1e-300), 0.0)
    out = amp * unit * np.exp(1j * phase_shift)
    return ComplexSignal(out, signal.sample_rate)


def sample_device_population(n: int, nominal: SalehParams, spread: float,
                             seed: int) -> list[DeviceProfile]:
    """Draw a batch of same-design devices around a nominal PA curve.

    Each of the four Saleh parameters is perturbed by an independent
    uniform factor in [1 - spread, 1 + spread]. Deterministic per seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= spread < 0.5:
        raise ValueError("spread must lie in [0, 0.5)")
    rng = np.random.default_rng(seed)
    profiles = []
    for i in range(n):
        f = rng.uniform(1.0 - spread, 1.0 + spread, size=4)
        pa = SalehParams(
            alpha_a=nominal.alpha_a * f[0],
            beta_a=nominal.beta_a * f[1],
            alpha_phi=nominal.alpha_phi * f[2],
            beta_phi=nominal.beta_phi * f[3],
        )
        profiles.append(
            DeviceProfile(
                device_id=f"D{i:02d}",
                pa=pa,
                rng_seed=int(rng.integers(0, 2**31)),
            )
        )
    return profiles
