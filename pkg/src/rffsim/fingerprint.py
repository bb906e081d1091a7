"""Channel-robust fingerprint extraction.

The quotient divides the high-power preamble STFT by the low-power one
element-wise. Any channel response common to the pair cancels in the
ratio, leaving the per-device PA gain ratio; the dB-scaled magnitude of
that ratio is the fingerprint. Severely distorted pairs (fast fading
inside the pair) are screened out first by comparing the correlation of
the per-frame peak profiles against an enrollment reference.
"""

from dataclasses import dataclass

import numpy as np

from .receiver import Spectrogram

__all__ = [
    "QuotientMatrix",
    "FingerprintImage",
    "EnrollmentRecord",
    "DIVISION_FLOOR",
    "DB_FLOOR",
    "QUOTIENT_CLIP_DB",
    "SPECTROGRAM_CLIP_DB",
    "peak_profile",
    "pearson_corr",
    "enroll_reference",
    "distortion_check",
    "quotient",
    "to_db",
    "spectrogram_db",
    "render_image",
    "quotient_image",
    "spectrogram_image",
    "save_pgm",
    "load_pgm",
]

DIVISION_FLOOR = 1e-9      # |S_l| below this is damped instead of divided
DB_FLOOR = -80.0           # dB value assigned to vanishing magnitudes

# Rendering windows: the quotient uses a fixed absolute range so the
# feature stays channel-invariant end to end; spectrograms are windowed
# relative to their own peak, as conventional viewers do.
QUOTIENT_CLIP_DB = (-30.0, 30.0)
SPECTROGRAM_CLIP_DB = (-80.0, 0.0)


@dataclass(frozen=True)
class QuotientMatrix:
    """dB-scaled quotient, W x M real; the channel-robust fingerprint."""

    values: np.ndarray
    device_id: str | None = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("quotient matrix contains non-finite values")


@dataclass(frozen=True)
class FingerprintImage:
    pixels: np.ndarray           # (H, V) uint8
    feature_kind: str            # "quotient" or "spectrogram"
    label: str = "unlabeled"

    def __post_init__(self):
        if self.pixels.dtype != np.uint8 or self.pixels.ndim != 2:
            raise ValueError("pixels must be a 2-D uint8 array")
        if self.feature_kind not in ("quotient", "spectrogram"):
            raise ValueError(f"bad feature_kind {self.feature_kind!r}")


@dataclass(frozen=True)
class EnrollmentRecord:
    """Reference peak-profile correlation from channel-free captures."""

    device_id: str
    rho_c: float

    def __post_init__(self):
        if not -1.0 <= self.rho_c <= 1.0:
            raise ValueError("rho_c must lie in [-1, 1]")


def peak_profile(s: Spectrogram) -> np.ndarray:
    """Per-frame maximum bin magnitude; a length-M vector."""
    return np.max(np.abs(s.bins), axis=0)


def pearson_corr(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ValueError("inputs must be equal-length vectors of length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt(np.sum(da * da) * np.sum(db * db))
    if denom == 0:
        raise ValueError("correlation undefined for zero-variance input")
    return float(np.clip(np.sum(da * db) / denom, -1.0, 1.0))


def enroll_reference(sh: Spectrogram, sl: Spectrogram,
                     device_id: str) -> EnrollmentRecord:
    """Build the enrollment record from a channel-free pair."""
    rho = pearson_corr(peak_profile(sh), peak_profile(sl))
    return EnrollmentRecord(device_id=device_id, rho_c=rho)


def distortion_check(sh: Spectrogram, sl: Spectrogram,
                     record: EnrollmentRecord, theta: float = 0.2) -> bool:
    """True when the pair is clean enough to fingerprint.

    The peak-profile correlation of a pair should match the enrollment
    reference; a deviation beyond theta marks intense fading inside the
    pair and the pair is dropped.
    """
    rho_k = pearson_corr(peak_profile(sh), peak_profile(sl))
    return abs(record.rho_c - rho_k) <= theta


def quotient(sh: Spectrogram, sl: Spectrogram,
             floor: float = DIVISION_FLOOR) -> np.ndarray:
    """Element-wise S_h / S_l with a magnitude floor on the divisor.

    Divisor entries below the floor are damped toward zero rather than
    amplified, so noise-only bins end up at the dB floor instead of
    exploding.
    """
    if sh.bins.shape != sl.bins.shape:
        raise ValueError(
            f"shape mismatch {sh.bins.shape} vs {sl.bins.shape}"
        )
    denom = np.maximum(np.abs(sl.bins), floor)
    return sh.bins * np.conj(sl.bins) / (denom * denom)


def to_db(q: np.ndarray, db_floor: float = DB_FLOOR,
          device_id: str | None = None) -> QuotientMatrix:
    """10*log10(|q|^2), with magnitudes clamped at the dB floor."""
    power = np.abs(q) ** 2
    floor_lin = 10.0 ** (db_floor / 10.0)
    values = 10.0 * np.log10(np.maximum(power, floor_lin))
    return QuotientMatrix(values=values, device_id=device_id)


def spectrogram_db(s: Spectrogram, db_floor: float = DB_FLOOR) -> np.ndarray:
    """Bin power in dB with the same floor rule as the quotient."""
    power = np.abs(s.bins) ** 2
    floor_lin = 10.0 ** (db_floor / 10.0)
    return 10.0 * np.log10(np.maximum(power, floor_lin))


def _round_half_up(x: np.ndarray) -> np.ndarray:
    return np.floor(x + 0.5)


def _bilinear_resize(m: np.ndarray, out_h: int, out_v: int) -> np.ndarray:
    h, v = m.shape
    if out_h < 1 or out_v < 1:
        raise ValueError("output size must be positive")
    rows = np.linspace(0.0, h - 1.0, out_h) if out_h > 1 else np.zeros(1)
    cols = np.linspace(0.0, v - 1.0, out_v) if out_v > 1 else np.zeros(1)
    if h == 1:
        rows = np.zeros(out_h)
    if v == 1:
        cols = np.zeros(out_v)
    r0 = np.clip(np.floor(rows).astype(int), 0, h - 1)
    c0 = np.clip(np.floor(cols).astype(int), 0, v - 1)
    r1 = np.minimum(r0 + 1, h - 1)
    c1 = np.minimum(c0 + 1, v - 1)
    fr = (rows - r0)[:, None]
    fc = (cols - c0)[None, :]
    top = m[r0][:, c0] * (1 - fc) + m[r0][:, c1] * fc
    bot = m[r1][:, c0] * (1 - fc) + m[r1][:, c1] * fc
    return top * (1 - fr) + bot * fr


def render_image(m: np.ndarray, out_h: int = 256, out_v: int = 256,
                 clip_lo: float = QUOTIENT_CLIP_DB[0],
                 clip_hi: float = QUOTIENT_CLIP_DB[1],
                 feature_kind: str = "quotient",
                 label: str = "unlabeled") -> FingerprintImage:
    """Clamp, map to 8-bit (round half up), and bilinear-resample.

    The input is clipped to [clip_lo, clip_hi], scaled linearly onto
    [0, 255], rounded, then resampled to out_h x out_v.
    """
    if not clip_lo < clip_hi:
        raise ValueError("clip_lo must be strictly below clip_hi")
    m = np.asarray(m, dtype=float)
    levels = _round_half_up((np.clip(m, clip_lo, clip_hi) - clip_lo)
                            / (clip_hi - clip_lo) * 255.0)
    resized = _bilinear_resize(levels, out_h, out_v)
    pixels = np.clip(_round_half_up(resized), 0, 255).astype(np.uint8)
    return FingerprintImage(pixels=pixels, feature_kind=feature_kind,
                            label=label)


def quotient_image(qm: QuotientMatrix, out_h: int = 256, out_v: int = 256,
                   clip_db: tuple = QUOTIENT_CLIP_DB) -> FingerprintImage:
    """Render a quotient matrix with the fixed absolute dB window."""
    return render_image(qm.values, out_h, out_v, clip_db[0], clip_db[1],
                        feature_kind="quotient",
                        label=qm.device_id or "unlabeled")


def spectrogram_image(s: Spectrogram, out_h: int = 256, out_v: int = 256,
                      clip_db: tuple = SPECTROGRAM_CLIP_DB,
                      label: str = "unlabeled") -> FingerprintImage:
    """Render a spectrogram in dB relative to its own peak."""
    sdb = spectrogram_db(s)
    rel = sdb - sdb.max()
    return render_image(rel, out_h, out_v, clip_db[0], clip_db[1],
                        feature_kind="spectrogram", label=label)


def save_pgm(image: FingerprintImage, path) -> None:
    """Binary PGM (P5, maxval 255)."""
    h, v = image.pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{v} {h}\n255\n".encode("ascii"))
        fh.write(image.pixels.tobytes())


def load_pgm(path, feature_kind: str = "quotient",
             label: str = "unlabeled") -> FingerprintImage:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM file")
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    v, h, maxval = fields
    if maxval != 255:
        raise ValueError(f"unsupported PGM maxval {maxval}")
    pixels = np.frombuffer(data[pos:pos + h * v], dtype=np.uint8)
    if pixels.size != h * v:
        raise ValueError("truncated PGM payload")
    return FingerprintImage(pixels=pixels.reshape(h, v).copy(),
                            feature_kind=feature_kind, label=label)
