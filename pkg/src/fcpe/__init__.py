"""Fast context-based pitch estimation toolkit.

Log-mel frontend, depthwise-separable convolutional inference engine,
360-bin cent-grid decoding, noise/masking/key-shift augmentation, and an
accuracy + real-time-factor evaluation harness, with a batch CLI.
"""

__version__ = "0.1.0"

from .archive import TensorArchive
from .audio import AudioBuffer, load_wav, resample, save_wav
from .augment import (
    NOISE_BETAS,
    MaskSpec,
    NoiseSpec,
    gen_colored_noise,
    key_shift,
    mix_at_snr,
    spec_mask,
)
from .estimator import MelFrontend, PitchEstimator
from .evaluate import EvalReport, eval_matrix, measure_rtf
from .grid import (
    PitchGrid,
    bce_grad_logits,
    bce_loss,
    cents_from_hz,
    decode_frame,
    decode_track,
    hz_from_cents,
    make_target,
)
from .mel import MelConfig, MelSpectrogram, log_mel, mel_filterbank, read_mel0, write_mel0
from .metrics import ingest_labels, rca, rpa
from .model import (
    LynxNet,
    ModelConfig,
    count_flops,
    count_params,
    forward,
    load_weights,
    receptive_field,
    save_weights,
)
from .track import PitchTrack
from .train import (
    HeadTrainResult,
    ToyTrainConfig,
    grad_check,
    synth_labeled_sines,
    train_linear_head,
)

__all__ = [
    "__version__",
    "AudioBuffer",
    "EvalReport",
    "HeadTrainResult",
    "LynxNet",
    "MaskSpec",
    "MelConfig",
    "MelFrontend",
    "MelSpectrogram",
    "ModelConfig",
    "NOISE_BETAS",
    "NoiseSpec",
    "PitchEstimator",
    "PitchGrid",
    "PitchTrack",
    "TensorArchive",
    "ToyTrainConfig",
    "bce_grad_logits",
    "bce_loss",
    "cents_from_hz",
    "count_flops",
    "count_params",
    "decode_frame",
    "decode_track",
    "eval_matrix",
    "forward",
    "gen_colored_noise",
    "grad_check",
    "hz_from_cents",
    "ingest_labels",
    "key_shift",
    "load_wav",
    "load_weights",
    "log_mel",
    "make_target",
    "measure_rtf",
    "mel_filterbank",
    "mix_at_snr",
    "rca",
    "read_mel0",
    "receptive_field",
    "resample",
    "rpa",
    "save_wav",
    "save_weights",
    "spec_mask",
    "synth_labeled_sines",
    "train_linear_head",
    "write_mel0",
]
