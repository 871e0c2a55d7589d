"""Time-aligned f0 estimates with optional per-frame confidence."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ShapeError
from .validation import check_vector

TIME_GRID_TOL = 1e-9


@dataclass
class PitchTrack:
    """A uniform time grid with one f0 value (0 = unvoiced) per frame."""

    times: np.ndarray
    f0: np.ndarray
    confidence: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.times = check_vector(self.times, "times")
        self.f0 = check_vector(self.f0, "f0")
        if self.times.shape[0] != self.f0.shape[0]:
            raise ShapeError(
                f"times and f0 must have equal length, got "
                f"{self.times.shape[0]} vs {self.f0.shape[0]}"
            )
        if self.confidence is not None:
            self.confidence = check_vector(
                self.confidence, "confidence", length=self.f0.shape[0]
            )
        if np.any(self.f0 < 0):
            raise ShapeError("f0 must be >= 0 (0 marks unvoiced frames)")
        if self.times.shape[0] >= 2:
            steps = np.diff(self.times)
            if steps.min() <= 0:
                raise ShapeError("times must be strictly increasing")
            if steps.max() - steps.min() > TIME_GRID_TOL:
                raise ShapeError("times must form a uniform grid")

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def frame_period(self) -> float:
        if len(self) < 2:
            return 0.0
        return float(self.times[1] - self.times[0])

    @property
    def voiced(self) -> np.ndarray:
        return self.f0 > 0.0

    def nearest_indices(self, query_times: np.ndarray) -> np.ndarray:
        """Index of the frame nearest each query time (used for alignment)."""
        q = np.asarray(query_times, dtype=np.float64)
        pos = np.searchsorted(self.times, q)
        pos = np.clip(pos, 1, len(self) - 1) if len(self) > 1 else np.zeros_like(pos)
        left = self.times[pos - 1] if len(self) > 1 else self.times[pos]
        right = self.times[pos]
        idx = np.where(np.abs(q - left) <= np.abs(right - q), pos - 1, pos)
        return idx if len(self) > 1 else np.zeros(q.shape, dtype=int)
