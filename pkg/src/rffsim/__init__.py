"""rffsim: simulation workbench for channel-robust RF fingerprinting.

The pipeline mirrors a LoRa device-authentication receiver: synthesize
preamble pairs, imprint per-device PA nonlinearity at two power levels,
push them through a fading channel, recover spectrograms, and form the
PA nonlinearity quotient whose dB magnitude survives channel changes.
A from-scratch CNN classifies the rendered fingerprints and a metrics
toolkit scores classification and rogue-device detection.
"""

from .signals import (
    LoraConfig,
    ComplexSignal,
    PacketPair,
    upchirp,
    build_preamble,
    build_packet_pair,
    frame_count,
)
from .pa import (
    SalehParams,
    DeviceProfile,
    saleh_am_am,
    saleh_am_pm,
    drive_scale,
    apply_pa,
    sample_device_population,
)
from .channel import (
    ChannelTap,
    ChannelSpec,
    ChannelRealization,
    realize,
    apply_channel,
    snr_measure,
)
from .receiver import (
    StftConfig,
    Spectrogram,
    synchronize,
    extract_preamble,
    rms_normalize,
    stft,
    save_spectrogram,
    load_spectrogram,
)
from .fingerprint import (
    QuotientMatrix,
    FingerprintImage,
    EnrollmentRecord,
    peak_profile,
    pearson_corr,
    enroll_reference,
    distortion_check,
    quotient,
    to_db,
    spectrogram_db,
    render_image,
    quotient_image,
    spectrogram_image,
    save_pgm,
    load_pgm,
)

__version__ = "0.1.0"
