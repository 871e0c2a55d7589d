"""Scikit-learn-style facade over the pipeline.

``MelFrontend`` is a transformer from audio buffers to log-mel matrices;
``PitchEstimator`` runs frontend + network + decoder in ``predict``.  Both
expose ``get_params``/``set_params`` so they compose with the wider
ecosystem (pipelines, grid search over thresholds, cloning).
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .audio import AudioBuffer, resample
from .exceptions import ConfigError
from .grid import DECODE_THRESHOLD, PitchGrid, decode_track
from .mel import MelConfig, MelSpectrogram, log_mel
from .model import LynxNet, ModelConfig, forward, load_weights
from .archive import TensorArchive
from .track import PitchTrack


class MelFrontend(BaseEstimator, TransformerMixin):
    """Transformer: AudioBuffer -> MelSpectrogram (resampling on the way in)."""

    def __init__(
        self,
        sample_rate: int = 16000,
        n_fft: int = 1024,
        hop: int = 160,
        n_mels: int = 128,
        f_min: float = 0.0,
        f_max: float = 8000.0,
        log_floor: float = 1e-5,
    ):
        self.sample_rate = sample_rate
        self.n_fft = n_fft
        self.hop = hop
        self.n_mels = n_mels
        self.f_min = f_min
        self.f_max = f_max
        self.log_floor = log_floor

    def config(self) -> MelConfig:
        return MelConfig(
            sample_rate=self.sample_rate,
            n_fft=self.n_fft,
            hop=self.hop,
            n_mels=self.n_mels,
            f_min=self.f_min,
            f_max=self.f_max,
            log_floor=self.log_floor,
        )

    def fit(self, X=None, y=None):
        return self

    def transform(self, X) -> MelSpectrogram | list[MelSpectrogram]:
        if isinstance(X, AudioBuffer):
            return self._one(X)
        return [self._one(buf) for buf in X]

    def _one(self, buf: AudioBuffer) -> MelSpectrogram:
        cfg = self.config()
        if buf.sample_rate != cfg.sample_rate:
            buf = resample(buf, cfg.sample_rate)
        return log_mel(buf, cfg)


class PitchEstimator(BaseEstimator):
    """End-to-end pitch predictor: audio in, PitchTrack out."""

    def __init__(self, net: LynxNet | None = None, threshold: float = DECODE_THRESHOLD):
        self.net = net
        self.threshold = threshold

    @classmethod
    def from_archive(cls, path, cfg: ModelConfig | None = None,
                     threshold: float = DECODE_THRESHOLD) -> "PitchEstimator":
        return cls(net=load_weights(TensorArchive.load(path), cfg), threshold=threshold)

    @classmethod
    def random(cls, cfg: ModelConfig | None = None, seed: int = 0,
               threshold: float = DECODE_THRESHOLD) -> "PitchEstimator":
        """Randomly initialized engine; useful for benchmarks and plumbing tests."""
        return cls(net=LynxNet.random(cfg or ModelConfig(), seed=seed), threshold=threshold)

    def _require_net(self) -> LynxNet:
        if self.net is None:
            raise ConfigError("PitchEstimator has no network; load or pass one")
        return self.net

    @property
    def grid(self) -> PitchGrid:
        return PitchGrid(n_bins=self._require_net().config.n_bins)

    def frontend(self) -> MelFrontend:
        mel = self._require_net().mel_config()
        return MelFrontend(
            sample_rate=mel.sample_rate,
            n_fft=mel.n_fft,
            hop=mel.hop,
            n_mels=mel.n_mels,
            f_min=mel.f_min,
            f_max=mel.f_max,
            log_floor=mel.log_floor,
        )

    def fit(self, X=None, y=None):
        return self

    def predict_proba(self, X) -> np.ndarray:
        """(T, n_bins) per-bin probabilities for one buffer or mel matrix."""
        net = self._require_net()
        if isinstance(X, AudioBuffer):
            X = self.frontend().transform(X)
        return forward(net, X)

    def predict(self, X) -> PitchTrack:
        net = self._require_net()
        mel_cfg = net.mel_config()
        if isinstance(X, AudioBuffer):
            mel = self.frontend().transform(X)
        elif isinstance(X, MelSpectrogram):
            mel = X
        else:
            mel = MelSpectrogram(data=np.asarray(X), config=mel_cfg)
        Y = forward(net, mel)
        return decode_track(
            Y, self.grid, threshold=self.threshold, frame_rate=mel.frame_rate
        )
