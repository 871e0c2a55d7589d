"""Log-mel spectrogram frontend.

Converts audio into the (T, 128) log-mel matrix the inference engine
consumes: centered STFT frames (reflect padding), Hann window, magnitude
spectrum, HTK-style triangular mel filterbank, natural log with a floor.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .audio import AudioBuffer
from .exceptions import ConfigError, DomainError, FormatError, TruncatedFileError

MEL0_MAGIC = b"MEL0"


def hz_to_mel(f):
    """HTK mel scale: ``2595 * log10(1 + f / 700)``."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (np.power(10.0, np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MelConfig:
    sample_rate: int = 16000
    n_fft: int = 1024
    hop: int = 160
    n_mels: int = 128
    f_min: float = 0.0
    f_max: float = 8000.0
    log_floor: float = 1e-5

    def __post_init__(self):
        if self.sample_rate <= 0 or self.n_fft <= 0 or self.hop <= 0:
            raise ConfigError("sample_rate, n_fft, and hop must be positive")
        if self.hop > self.n_fft:
            raise ConfigError(f"hop ({self.hop}) must not exceed n_fft ({self.n_fft})")
        if self.n_mels < 1:
            raise ConfigError("n_mels must be >= 1")
        if not (0.0 <= self.f_min < self.f_max):
            raise ConfigError("need 0 <= f_min < f_max")
        if self.f_max > self.sample_rate / 2:
            raise ConfigError(
                f"f_max ({self.f_max}) exceeds Nyquist ({self.sample_rate / 2})"
            )
        if self.log_floor <= 0:
            raise ConfigError("log_floor must be > 0")

    @property
    def frame_rate(self) -> float:
        return self.sample_rate / self.hop

    def to_metadata(self) -> dict[str, str]:
        """String key/value echo for embedding in weight archives."""
        return {
            "mel.sample_rate": str(self.sample_rate),
            "mel.n_fft": str(self.n_fft),
            "mel.hop": str(self.hop),
            "mel.n_mels": str(self.n_mels),
            "mel.f_min": repr(self.f_min),
            "mel.f_max": repr(self.f_max),
            "mel.log_floor": repr(self.log_floor),
            "mel.spectrum": "magnitude",
            "mel.scale": "htk",
            "mel.log": "natural",
        }

    @classmethod
    def from_metadata(cls, meta: dict[str, str]) -> "MelConfig":
        if "mel.sample_rate" not in meta:
            return cls()
        return cls(
            sample_rate=int(meta["mel.sample_rate"]),
            n_fft=int(meta["mel.n_fft"]),
            hop=int(meta["mel.hop"]),
            n_mels=int(meta["mel.n_mels"]),
            f_min=float(meta["mel.f_min"]),
            f_max=float(meta["mel.f_max"]),
            log_floor=float(meta["mel.log_floor"]),
        )


@dataclass
class MelSpectrogram:
    """(T, n_mels) log-magnitude matrix plus the config that produced it."""

    data: np.ndarray
    config: MelConfig

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2 or self.data.shape[1] != self.config.n_mels:
            raise ConfigError(
                f"mel data must be (T, {self.config.n_mels}), got {self.data.shape}"
            )

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def frame_rate(self) -> float:
        return self.config.frame_rate

    def times(self) -> np.ndarray:
        return np.arange(self.n_frames, dtype=np.float64) / self.frame_rate


@lru_cache(maxsize=8)
def mel_filterbank(cfg: MelConfig) -> np.ndarray:
    """(n_mels, n_fft//2 + 1) triangular filterbank, linear in mel.

    Rows are nonnegative; interior triangle m overlaps exactly triangles
    m-1 and m+1 (adjacent triangles share an edge in mel space).
    """
    n_bins = cfg.n_fft // 2 + 1
    mel_pts = np.linspace(hz_to_mel(cfg.f_min), hz_to_mel(cfg.f_max), cfg.n_mels + 2)
    bin_mels = hz_to_mel(np.arange(n_bins) * cfg.sample_rate / cfg.n_fft)
    left = mel_pts[:-2, None]
    center = mel_pts[1:-1, None]
    right = mel_pts[2:, None]
    up = (bin_mels[None, :] - left) / (center - left)
    down = (right - bin_mels[None, :]) / (right - center)
    fb = np.maximum(0.0, np.minimum(up, down))
    fb.flags.writeable = False
    return fb


def filter_center_hz(cfg: MelConfig) -> np.ndarray:
    """Center frequency in Hz of each triangular filter."""
    mel_pts = np.linspace(hz_to_mel(cfg.f_min), hz_to_mel(cfg.f_max), cfg.n_mels + 2)
    return mel_to_hz(mel_pts[1:-1])


def _hann_periodic(n: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def stft_magnitude(x: np.ndarray, cfg: MelConfig) -> np.ndarray:
    """(T, n_fft//2+1) magnitude spectrogram with centered frames.

    T = floor(len(x) / hop) + 1; the signal is reflect-padded by n_fft/2 on
    both sides so frame t is centered on sample t * hop.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] == 0:
        raise DomainError("cannot compute a spectrogram of an empty signal")
    pad = cfg.n_fft // 2
    mode = "reflect" if x.shape[0] > 1 else "edge"
    xp = np.pad(x, pad, mode=mode)
    frames = np.lib.stride_tricks.sliding_window_view(xp, cfg.n_fft)[:: cfg.hop]
    return np.abs(np.fft.rfft(frames * _hann_periodic(cfg.n_fft), axis=1))


def log_mel(buf: AudioBuffer, cfg: MelConfig) -> MelSpectrogram:
    """Log-mel spectrogram of an audio buffer.

    The buffer's sample rate must match the config; resample first if not.
    """
    if buf.sample_rate != cfg.sample_rate:
        raise ConfigError(
            f"buffer rate {buf.sample_rate} != config rate {cfg.sample_rate}; "
            "resample the audio first"
        )
    mag = stft_magnitude(buf.samples, cfg)
    mel = mag @ mel_filterbank(cfg).T
    return MelSpectrogram(data=np.log(np.maximum(mel, cfg.log_floor)), config=cfg)


def write_mel0(path, matrix: np.ndarray) -> None:
    """Raw-matrix debug dump: 16-byte header (magic, u32 rows, u32 cols,
    u32 reserved), then row-major little-endian float32 data."""
    m = np.ascontiguousarray(matrix, dtype="<f4")
    if m.ndim != 2:
        raise DomainError(f"matrix must be 2-d, got shape {m.shape}")
    with open(path, "wb") as fh:
        fh.write(MEL0_MAGIC)
        fh.write(struct.pack("<III", m.shape[0], m.shape[1], 0))
        fh.write(m.tobytes())


def read_mel0(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) < 16:
            raise TruncatedFileError("file ended inside the raw-matrix header")
        if header[:4] != MEL0_MAGIC:
            raise FormatError(f"bad raw-matrix magic {header[:4]!r}")
        rows, cols, _ = struct.unpack("<III", header[4:16])
        payload = fh.read(4 * rows * cols)
        if len(payload) < 4 * rows * cols:
            raise TruncatedFileError("file ended inside the raw-matrix payload")
    return np.frombuffer(payload, dtype="<f4").reshape(rows, cols).astype(np.float64)
