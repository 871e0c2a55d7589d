"""Audio and spectrogram corruptions: colored noise, SNR mixing, key
shifting, and time/frequency masking.

All operations are pure given (input, seed); random streams are derived
per call from the seed, never from global RNG state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioBuffer, resample_by_ratio
from .exceptions import ConfigError, DegenerateInputError, DomainError
from .mel import MelSpectrogram

# Spectral exponent beta of the power spectral density ~ 1/f^beta.
NOISE_BETAS = {
    "violet": -1.0,
    "white": 0.0,
    "pink": 1.0,
    "brownian": 2.0,
}


@dataclass(frozen=True)
class NoiseSpec:
    beta: float = 0.0
    seed: int = 0
    length: int = 16000
    sample_rate: int = 16000

    def __post_init__(self):
        if self.length <= 0:
            raise DomainError(f"length must be > 0, got {self.length}")
        if not np.isfinite(self.beta):
            raise DomainError("beta must be finite")
        if self.sample_rate <= 0:
            raise DomainError(f"sample_rate must be > 0, got {self.sample_rate}")


@dataclass(frozen=True)
class MaskSpec:
    kind: str = "blank"
    max_time_frac: float = 0.1
    max_freq_frac: float = 0.15
    n_masks: int = 2
    gaussian_std: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("blank", "gaussian"):
            raise ConfigError(f"mask kind must be 'blank' or 'gaussian', got {self.kind!r}")
        for name in ("max_time_frac", "max_freq_frac"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if self.n_masks < 0:
            raise ConfigError("n_masks must be >= 0")
        if self.gaussian_std < 0:
            raise ConfigError("gaussian_std must be >= 0")


def gen_colored_noise(spec: NoiseSpec) -> AudioBuffer:
    """Unit-RMS noise with power spectral density proportional to 1/f^beta.

    White Gaussian noise is shaped in the frequency domain by the amplitude
    factor f^(-beta/2) (DC zeroed), inverse-transformed, and normalized to
    RMS exactly 1.  Deterministic per seed.
    """
    rng = np.random.default_rng(spec.seed)
    x = rng.standard_normal(spec.length)
    spectrum = np.fft.rfft(x)
    f = np.fft.rfftfreq(spec.length, d=1.0 / spec.sample_rate)
    shaping = np.zeros_like(f)
    shaping[1:] = f[1:] ** (-spec.beta / 2.0)
    y = np.fft.irfft(spectrum * shaping, n=spec.length)
    y /= np.sqrt(np.mean(y * y))
    return AudioBuffer(samples=y, sample_rate=spec.sample_rate)


def mix_at_snr(signal: AudioBuffer, noise: AudioBuffer, snr_db: float) -> AudioBuffer:
    """Add scaled noise so the power ratio over the signal extent hits
    ``snr_db`` exactly; the sum is not re-normalized.

    Noise shorter than the signal is tiled to cover it.
    """
    if signal.sample_rate != noise.sample_rate:
        raise ConfigError(
            f"sample-rate mismatch: signal {signal.sample_rate} vs noise {noise.sample_rate}"
        )
    if len(signal) == 0:
        raise DegenerateInputError("cannot mix into an empty signal")
    n = noise.samples
    if n.shape[0] < len(signal):
        reps = -(-len(signal) // max(n.shape[0], 1))
        n = np.tile(n, reps)
    n = n[: len(signal)]
    p_signal = float(np.mean(signal.samples**2))
    p_noise = float(np.mean(n**2))
    if p_signal == 0.0:
        raise DegenerateInputError("signal has zero power; SNR is undefined")
    if p_noise == 0.0:
        raise DegenerateInputError("noise has zero power over the signal extent")
    gain = np.sqrt(p_signal / p_noise) * 10.0 ** (-snr_db / 20.0)
    return AudioBuffer(
        samples=signal.samples + gain * n, sample_rate=signal.sample_rate
    )


def key_shift(buf: AudioBuffer, semitones: float) -> tuple[AudioBuffer, float]:
    """Transpose by plain resampling: pitch scales by ``r = 2^(semitones/12)``
    and duration by ``1/r``.  Returns (shifted, r) so f0 labels can be
    rescaled by r.
    """
    if not np.isfinite(semitones) or abs(semitones) > 12.0:
        raise DomainError(f"semitones must lie in [-12, 12], got {semitones!r}")
    ratio = float(2.0 ** (semitones / 12.0))
    if semitones == 0.0:
        return AudioBuffer(samples=buf.samples.copy(), sample_rate=buf.sample_rate), 1.0
    y = resample_by_ratio(buf.samples, 1.0 / ratio)
    return AudioBuffer(samples=y, sample_rate=buf.sample_rate), ratio


def spec_mask(mel: MelSpectrogram, spec: MaskSpec) -> MelSpectrogram:
    """Random time and frequency stripe masking of a log-mel matrix.

    Draws ``n_masks`` stripes per axis with widths uniform in
    [0, max_frac * extent].  Blank masking writes the log floor; Gaussian
    masking adds zero-mean noise of ``gaussian_std``.  Deterministic per
    seed; frame and bin counts are always preserved.
    """
    rng = np.random.default_rng(spec.seed)
    data = mel.data.copy()
    T, F = data.shape
    floor = float(np.log(mel.config.log_floor))

    regions: list[tuple[slice, slice]] = []
    max_t = int(spec.max_time_frac * T)
    max_f = int(spec.max_freq_frac * F)
    for _ in range(spec.n_masks):
        w = int(rng.integers(0, max_t + 1))
        start = int(rng.integers(0, max(T - w, 0) + 1))
        regions.append((slice(start, start + w), slice(0, F)))
    for _ in range(spec.n_masks):
        w = int(rng.integers(0, max_f + 1))
        start = int(rng.integers(0, max(F - w, 0) + 1))
        regions.append((slice(0, T), slice(start, start + w)))

    for rows, cols in regions:
        if spec.kind == "blank":
            data[rows, cols] = floor
        else:
            shape = data[rows, cols].shape
            data[rows, cols] += rng.normal(0.0, spec.gaussian_std, size=shape)
    return MelSpectrogram(data=data, config=mel.config)
