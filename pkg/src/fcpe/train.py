"""Desk-scale training of the linear head on frozen features.

Validates targets, loss, analytic gradients, and decoding without full
backpropagation through the conv stack: full-batch gradient descent on the
sigmoid-BCE objective, plus a finite-difference gradient checker.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import expit

from .archive import TensorArchive
from .audio import AudioBuffer
from .exceptions import DivergenceError, DomainError, PitchRangeError, ShapeError
from .grid import PitchGrid
from .track import PitchTrack

SYNTH_PARTIALS = 4
SYNTH_AMPLITUDE = 0.25


@dataclass(frozen=True)
class ToyTrainConfig:
    lr: float = 0.05
    epochs: int = 200
    batch_frames: int = 256
    seed: int = 0
    sigma_cents: float = 25.0

    def __post_init__(self):
        if self.lr < 0:
            raise DomainError(f"lr must be >= 0, got {self.lr}")
        if self.epochs < 1:
            raise DomainError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_frames < 1:
            raise DomainError("batch_frames must be >= 1")


def synth_labeled_sines(
    n_clips: int,
    f0_range: tuple[float, float],
    sample_rate: int,
    duration: float = 1.0,
    segment_s: float = 0.1,
    frame_rate: float = 100.0,
    seed: int = 0,
    grid: PitchGrid | None = None,
) -> list[tuple[AudioBuffer, PitchTrack]]:
    """Harmonic test tones (4 partials, 1/k amplitudes) with exact labels.

    Each clip's f0 is piecewise constant over ``segment_s`` segments, drawn
    uniformly from ``f0_range`` (a degenerate range pins the pitch).  Labels
    are the generator's own step function sampled at frame centers.
    """
    grid = grid or PitchGrid()
    lo, hi = float(f0_range[0]), float(f0_range[1])
    if not (grid.hz_min <= lo <= hi <= grid.hz_max):
        raise PitchRangeError(
            f"f0_range [{lo}, {hi}] outside the grid span "
            f"[{grid.hz_min:.2f}, {grid.hz_max:.2f}] Hz"
        )
    rng = np.random.default_rng(seed)
    n_samples = int(round(duration * sample_rate))
    seg_len = max(1, int(round(segment_s * sample_rate)))
    n_segments = -(-n_samples // seg_len)

    out = []
    for _ in range(n_clips):
        seg_f0 = rng.uniform(lo, hi, size=n_segments) if hi > lo else np.full(n_segments, lo)
        f0_per_sample = np.repeat(seg_f0, seg_len)[:n_samples]
        phase = 2.0 * np.pi * np.cumsum(f0_per_sample) / sample_rate
        x = np.zeros(n_samples)
        for k in range(1, SYNTH_PARTIALS + 1):
            x += np.sin(k * phase) / k
        buf = AudioBuffer(samples=SYNTH_AMPLITUDE * x, sample_rate=sample_rate)

        n_frames = int(np.floor(n_samples * frame_rate / sample_rate)) + 1
        times = np.arange(n_frames, dtype=np.float64) / frame_rate
        centers = np.minimum((times * sample_rate).astype(np.int64), n_samples - 1)
        out.append((buf, PitchTrack(times=times, f0=f0_per_sample[centers])))
    return out


@dataclass
class HeadTrainResult:
    """Trained linear head plus the feature standardization it was fit with."""

    weight: np.ndarray  # (n_bins, d)
    bias: np.ndarray  # (n_bins,)
    feat_mean: np.ndarray
    feat_std: np.ndarray
    losses: np.ndarray = field(repr=False)

    def logits(self, features: np.ndarray) -> np.ndarray:
        f = (np.asarray(features, dtype=np.float64) - self.feat_mean) / self.feat_std
        return f @ self.weight.T + self.bias

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        return expit(self.logits(features))

    def to_archive(self) -> TensorArchive:
        return TensorArchive(
            entries={
                "head.weight": self.weight,
                "head.bias": self.bias,
                "feat.mean": self.feat_mean,
                "feat.std": self.feat_std,
            },
            metadata={"kind": "linear-head", "epochs": str(len(self.losses) - 1)},
        )

    def save_loss_csv(self, path) -> None:
        lines = ["epoch,loss"] + [
            f"{e},{loss:.10g}" for e, loss in enumerate(self.losses)
        ]
        Path(path).write_text("\n".join(lines) + "\n")


def _bce_with_logits(y: np.ndarray, z: np.ndarray) -> float:
    """Mean-per-frame BCE, computed in the numerically stable logit form."""
    per_elem = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    return float(per_elem.sum() / z.shape[0])


def train_linear_head(
    features: np.ndarray, targets: np.ndarray, cfg: ToyTrainConfig = ToyTrainConfig()
) -> HeadTrainResult:
    """Full-batch gradient descent of a sigmoid linear head on frozen features.

    Features are standardized internally (the stored mean/std travel with
    the result), which bounds the objective's curvature so the default step
    size descends monotonically.  Deterministic per config.
    """
    X = np.asarray(features, dtype=np.float64)
    Y = np.asarray(targets, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
        raise ShapeError(
            f"features and targets must be aligned 2-d arrays, got "
            f"{X.shape} vs {Y.shape}"
        )
    if X.shape[0] > cfg.batch_frames:
        rng = np.random.default_rng(cfg.seed)
        keep = rng.choice(X.shape[0], size=cfg.batch_frames, replace=False)
        keep.sort()
        X, Y = X[keep], Y[keep]

    mean = X.mean(axis=0)
    std = np.maximum(X.std(axis=0), 1e-8)
    F = (X - mean) / std
    T, d = F.shape
    n_bins = Y.shape[1]
    W = np.zeros((n_bins, d))
    b = np.zeros(n_bins)

    losses = np.empty(cfg.epochs + 1)
    for epoch in range(cfg.epochs):
        Z = F @ W.T + b
        loss = _bce_with_logits(Y, Z)
        if not np.isfinite(loss):
            raise DivergenceError(f"non-finite loss {loss!r}", epoch=epoch)
        losses[epoch] = loss
        G = (expit(Z) - Y) / T
        W -= cfg.lr * (G.T @ F)
        b -= cfg.lr * G.sum(axis=0)
    final = _bce_with_logits(Y, F @ W.T + b)
    if not np.isfinite(final):
        raise DivergenceError(f"non-finite loss {final!r}", epoch=cfg.epochs)
    losses[cfg.epochs] = final
    return HeadTrainResult(weight=W, bias=b, feat_mean=mean, feat_std=std, losses=losses)


def grad_check(
    loss_fn: Callable[[np.ndarray], tuple[float, np.ndarray]],
    params: np.ndarray,
    eps: float = 1e-4,
) -> float:
    """Max relative discrepancy between the analytic gradient and central
    finite differences, coordinate by coordinate."""
    params = np.asarray(params, dtype=np.float64)
    _, grad = loss_fn(params)
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != params.shape:
        raise ShapeError(f"gradient shape {grad.shape} != params shape {params.shape}")
    worst = 0.0
    flat = params.ravel()
    for i in range(flat.size):
        saved = flat[i]
        flat[i] = saved + eps
        up, _ = loss_fn(params)
        flat[i] = saved - eps
        down, _ = loss_fn(params)
        flat[i] = saved
        numeric = (up - down) / (2.0 * eps)
        analytic = grad.ravel()[i]
        denom = max(abs(numeric), abs(analytic), 1e-12)
        worst = max(worst, abs(numeric - analytic) / denom)
    return worst
