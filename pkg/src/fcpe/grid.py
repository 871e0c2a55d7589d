"""Cent grid, classification targets, BCE loss, and weighted-average decoding.

Pitch is classified over 360 bins spaced 20 cents apart, anchored at C1
(32.70 Hz) and measured in cents relative to a 10 Hz reference.  Decoding
takes a local weighted average of bin cents in a +/-4-bin window around the
probability peak, falling back to 0 Hz (unvoiced) below a confidence
threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, PitchRangeError, ShapeError
from .track import PitchTrack
from .validation import check_prob_matrix, check_prob_vector, check_vector

C1_HZ = 32.70
DEFAULT_F_REF = 10.0
DEFAULT_C_MIN = 1200.0 * math.log2(C1_HZ / DEFAULT_F_REF)

TARGET_SIGMA_CENTS = 25.0
TARGET_TRUNCATE_SIGMAS = 3.0
BCE_EPS = 1e-7
DECODE_THRESHOLD = 0.05
DECODE_HALF_WINDOW = 4


def cents_from_hz(f, f_ref: float = DEFAULT_F_REF):
    """Map frequency in Hz to cents relative to ``f_ref``.

    Accepts scalars or arrays; every value must be finite and positive.
    """
    arr = np.asarray(f, dtype=np.float64)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0.0)):
        raise DomainError("frequency must be finite and > 0 Hz")
    out = 1200.0 * np.log2(arr / f_ref)
    return float(out) if np.isscalar(f) or arr.ndim == 0 else out


def hz_from_cents(c, f_ref: float = DEFAULT_F_REF):
    """Inverse of :func:`cents_from_hz`: ``f_ref * 2**(c / 1200)``."""
    arr = np.asarray(c, dtype=np.float64)
    if arr.size and not np.all(np.isfinite(arr)):
        raise DomainError("cents must be finite")
    out = f_ref * np.exp2(arr / 1200.0)
    return float(out) if np.isscalar(c) or arr.ndim == 0 else out


@dataclass(frozen=True)
class PitchGrid:
    """The 360-bin cent axis: ``c_i = c_min + (i - 1) * bin_step``."""

    f_ref: float = DEFAULT_F_REF
    n_bins: int = 360
    bin_step: float = 20.0
    c_min: float = DEFAULT_C_MIN
    centers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_bins < 1 or self.bin_step <= 0 or self.f_ref <= 0:
            raise DomainError("PitchGrid requires n_bins >= 1, bin_step > 0, f_ref > 0")
        centers = self.c_min + self.bin_step * np.arange(self.n_bins, dtype=np.float64)
        centers.flags.writeable = False
        object.__setattr__(self, "centers", centers)

    @property
    def c_max(self) -> float:
        return float(self.centers[-1])

    @property
    def hz_min(self) -> float:
        return hz_from_cents(self.c_min, self.f_ref)

    @property
    def hz_max(self) -> float:
        return hz_from_cents(self.c_max, self.f_ref)

    def cents_from_hz(self, f):
        return cents_from_hz(f, self.f_ref)

    def hz_from_cents(self, c):
        return hz_from_cents(c, self.f_ref)

    def nearest_bin(self, cents: float) -> int:
        """Index (0-based) of the bin center closest to ``cents``."""
        i = int(round((cents - self.c_min) / self.bin_step))
        return min(max(i, 0), self.n_bins - 1)


def make_target(
    f_true: float,
    grid: PitchGrid,
    sigma_cents: float = TARGET_SIGMA_CENTS,
    truncate_sigmas: float = TARGET_TRUNCATE_SIGMAS,
) -> np.ndarray:
    """Gaussian-blurred one-hot classification target for a true pitch.

    ``y_i = exp(-(c_i - c(f_true))^2 / (2 sigma^2))``, zeroed beyond
    ``truncate_sigmas`` standard deviations to keep targets sparse.
    """
    try:
        f_true = float(f_true)
    except (TypeError, ValueError):
        raise DomainError(f"f_true must be a frequency in Hz, got {f_true!r}") from None
    if not (math.isfinite(f_true) and f_true > 0):
        raise DomainError(f"f_true must be a finite positive frequency, got {f_true!r}")
    c_true = grid.cents_from_hz(f_true)
    margin = 10.0 * grid.bin_step
    if not (grid.c_min - margin <= c_true <= grid.c_max + margin):
        lo = grid.hz_from_cents(grid.c_min - margin)
        hi = grid.hz_from_cents(grid.c_max + margin)
        raise PitchRangeError(
            f"f_true={f_true:.4f} Hz outside supported range [{lo:.4f}, {hi:.4f}] Hz"
        )
    d = grid.centers - c_true
    y = np.exp(-(d * d) / (2.0 * sigma_cents * sigma_cents))
    y[np.abs(d) > truncate_sigmas * sigma_cents] = 0.0
    return y


def bce_loss(y: np.ndarray, y_hat: np.ndarray, eps: float = BCE_EPS) -> float:
    """Binary cross-entropy summed over bins, with ``y_hat`` clamped to
    ``[eps, 1 - eps]`` so the logs stay finite."""
    y = check_vector(y, "y")
    y_hat = check_prob_vector(y_hat, "y_hat", length=y.shape[0])
    p = np.clip(y_hat, eps, 1.0 - eps)
    return float(-np.sum(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def bce_grad_logits(y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Gradient of sigmoid-BCE with respect to the logits: ``sigmoid(z) - y``."""
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if y.shape != z.shape:
        raise ShapeError(f"y and z must have equal shapes, got {y.shape} vs {z.shape}")
    return sigmoid(z) - y


def sigmoid(z: np.ndarray) -> np.ndarray:
    # Split by sign to avoid overflow in exp for large |z|.
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def decode_frame(
    y_hat: np.ndarray,
    grid: PitchGrid,
    threshold: float = DECODE_THRESHOLD,
) -> tuple[float, float]:
    """Decode one probability vector to (f0_hz, confidence).

    Confidence is the peak probability.  Below ``threshold`` the frame is
    unvoiced and f0 is exactly 0.  Otherwise the cent estimate is the
    probability-weighted mean of bin centers within +/-4 bins of the peak
    (window clamped at the grid edges); ties in the peak go to the lowest
    bin index.
    """
    y_hat = check_prob_vector(y_hat, "y_hat", length=grid.n_bins)
    m = int(np.argmax(y_hat))
    conf = float(y_hat[m])
    if conf < threshold:
        return 0.0, conf
    lo = max(m - DECODE_HALF_WINDOW, 0)
    hi = min(m + DECODE_HALF_WINDOW, grid.n_bins - 1)
    w = y_hat[lo : hi + 1]
    c_hat = float(np.dot(w, grid.centers[lo : hi + 1]) / np.sum(w))
    return grid.hz_from_cents(c_hat), conf


def decode_track(
    Y: np.ndarray,
    grid: PitchGrid,
    threshold: float = DECODE_THRESHOLD,
    frame_rate: float = 100.0,
    start_time: float = 0.0,
) -> PitchTrack:
    """Row-wise decode of a (T, n_bins) probability matrix into a PitchTrack."""
    Y = check_prob_matrix(Y, "Y", n_cols=grid.n_bins)
    T = Y.shape[0]
    times = start_time + np.arange(T, dtype=np.float64) / frame_rate
    if T == 0:
        return PitchTrack(times=times, f0=np.zeros(0), confidence=np.zeros(0))

    m = np.argmax(Y, axis=1)
    conf = Y[np.arange(T), m]
    voiced = conf >= threshold
    f0 = np.zeros(T, dtype=np.float64)
    if voiced.any():
        # Gather the +/-4 window via a zero-padded copy; padding weight is
        # zero so clamped edge windows fall out of the sums automatically.
        k = DECODE_HALF_WINDOW
        Yp = np.zeros((T, grid.n_bins + 2 * k), dtype=np.float64)
        Yp[:, k : k + grid.n_bins] = Y
        cp = np.zeros(grid.n_bins + 2 * k, dtype=np.float64)
        cp[k : k + grid.n_bins] = grid.centers
        cols = m[voiced, None] + np.arange(2 * k + 1)[None, :]
        w = np.take_along_axis(Yp[voiced], cols, axis=1)
        c_hat = np.sum(w * cp[cols], axis=1) / np.sum(w, axis=1)
        f0[voiced] = grid.hz_from_cents(c_hat)
    return PitchTrack(times=times, f0=f0, confidence=conf.astype(np.float64))
