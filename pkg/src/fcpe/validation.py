"""Input validation helpers shared across modules.

These mirror the style of scikit-learn's ``check_array``: coerce to a
well-formed ndarray or raise a descriptive error.
"""
from __future__ import annotations

import numpy as np

from .exceptions import DomainError, ShapeError


def check_finite_scalar(x, name: str) -> float:
    """Coerce ``x`` to a finite float, raising DomainError otherwise."""
    x = float(x)
    if not np.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def check_positive_scalar(x, name: str) -> float:
    x = check_finite_scalar(x, name)
    if x <= 0.0:
        raise DomainError(f"{name} must be > 0, got {x!r}")
    return x


def check_vector(x, name: str, length: int | None = None) -> np.ndarray:
    """Coerce to a 1-d float64 vector, optionally of fixed length."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be 1-d, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise ShapeError(f"{name} must have length {length}, got {arr.shape[0]}")
    return arr


def check_prob_vector(y, name: str = "y_hat", length: int | None = None) -> np.ndarray:
    """Validate a per-bin Bernoulli probability vector (each value in [0, 1])."""
    arr = check_vector(y, name, length)
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise DomainError(f"{name} values must lie in [0, 1]")
    return arr


def check_matrix(x, name: str, n_cols: int | None = None) -> np.ndarray:
    """Coerce to a 2-d float array; rejects ragged nested sequences."""
    try:
        arr = np.asarray(x, dtype=np.float64)
    except ValueError as exc:
        raise ShapeError(f"{name} is ragged or non-numeric: {exc}") from None
    if arr.dtype == object or arr.ndim != 2:
        raise ShapeError(f"{name} must be a 2-d matrix, got shape {arr.shape}")
    if n_cols is not None and arr.shape[1] != n_cols:
        raise ShapeError(f"{name} must have {n_cols} columns, got {arr.shape[1]}")
    return arr


def check_prob_matrix(y, name: str = "Y", n_cols: int | None = None) -> np.ndarray:
    arr = check_matrix(y, name, n_cols)
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise DomainError(f"{name} values must lie in [0, 1]")
    return arr


def check_same_length(a: np.ndarray, b: np.ndarray, name_a: str, name_b: str) -> None:
    if a.shape[0] != b.shape[0]:
        raise ShapeError(
            f"{name_a} and {name_b} must have equal length, "
            f"got {a.shape[0]} vs {b.shape[0]}"
        )
