"""Raw pitch / raw chroma accuracy and label-file ingestion.

Metrics follow the mir_eval convention: only reference-voiced frames count,
an estimate is correct within a cent tolerance (50 by default), and chroma
accuracy folds errors into one octave first.  Estimate and reference are
aligned by nearest frame before scoring.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .exceptions import FormatError, MetricUndefinedError, ParseError
from .grid import cents_from_hz
from .track import PitchTrack

PV_FRAME_PERIOD = 0.02  # MIR-1K label files carry one value per 20 ms


def _cents_or_zero(f0: np.ndarray) -> np.ndarray:
    out = np.zeros_like(f0)
    voiced = f0 > 0
    out[voiced] = cents_from_hz(f0[voiced])
    return out


def align_to_reference(ref: PitchTrack, est: PitchTrack) -> np.ndarray:
    """Estimate f0 resampled onto the reference time grid (nearest frame)."""
    if len(est) == 0:
        return np.zeros(len(ref))
    return est.f0[est.nearest_indices(ref.times)]


def pitch_accuracy_counts(
    ref: PitchTrack, est: PitchTrack, tol_cents: float = 50.0
) -> tuple[int, int, int]:
    """(reference-voiced frames, raw-pitch correct, raw-chroma correct).

    The count form lets callers pool across files before dividing.
    """
    est_f0 = align_to_reference(ref, est)
    voiced = ref.f0 > 0
    n_voiced = int(voiced.sum())
    if n_voiced == 0:
        return 0, 0, 0
    both = voiced & (est_f0 > 0)
    diff = _cents_or_zero(est_f0)[both] - _cents_or_zero(ref.f0)[both]
    n_rpa = int(np.count_nonzero(np.abs(diff) <= tol_cents))
    folded = diff - 1200.0 * np.round(diff / 1200.0)
    n_rca = int(np.count_nonzero(np.abs(folded) <= tol_cents))
    return n_voiced, n_rpa, n_rca


def rpa(ref: PitchTrack, est: PitchTrack, tol_cents: float = 50.0) -> float:
    """Percent of reference-voiced frames with a voiced estimate within
    ``tol_cents`` of the reference pitch."""
    n_voiced, n_rpa, _ = pitch_accuracy_counts(ref, est, tol_cents)
    if n_voiced == 0:
        raise MetricUndefinedError("reference track has no voiced frames")
    return 100.0 * n_rpa / n_voiced


def rca(ref: PitchTrack, est: PitchTrack, tol_cents: float = 50.0) -> float:
    """Raw chroma accuracy: like rpa but the cent error is folded to
    [-600, 600] modulo 1200 first, forgiving octave errors."""
    n_voiced, _, n_rca = pitch_accuracy_counts(ref, est, tol_cents)
    if n_voiced == 0:
        raise MetricUndefinedError("reference track has no voiced frames")
    return 100.0 * n_rca / n_voiced


def _parse_csv_hz(lines: list[str]) -> tuple[np.ndarray, np.ndarray]:
    times, f0 = [], []
    for i, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        parts = text.split(",")
        try:
            t, f = float(parts[0]), float(parts[1])
        except (ValueError, IndexError):
            if i == 1:  # tolerate a column-header line
                continue
            raise ParseError(f"expected 'time,f0_hz', got {text!r}", line_no=i) from None
        times.append(t)
        f0.append(f)
    return np.asarray(times), np.asarray(f0)


def _parse_mir1k_pv(lines: list[str]) -> tuple[np.ndarray, np.ndarray]:
    f0 = []
    for i, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            semitone = float(text)
        except ValueError:
            raise ParseError(f"expected one semitone value, got {text!r}", line_no=i) from None
        f0.append(440.0 * 2.0 ** ((semitone - 69.0) / 12.0) if semitone > 0 else 0.0)
    times = PV_FRAME_PERIOD * np.arange(len(f0), dtype=np.float64)
    return times, np.asarray(f0)


def ingest_labels(path, format: str = "csv_hz", frame_rate: float = 100.0) -> PitchTrack:
    """Read a reference pitch label file onto a uniform ``frame_rate`` grid.

    ``csv_hz`` files carry ``time,f0_hz`` rows (0 = unvoiced); ``mir1k_pv``
    files carry one semitone value per 20 ms frame, converted via
    ``440 * 2**((s - 69) / 12)``.  Values are resampled by nearest-time
    lookup.
    """
    lines = Path(path).read_text().splitlines()
    if format == "csv_hz":
        times, f0 = _parse_csv_hz(lines)
    elif format == "mir1k_pv":
        times, f0 = _parse_mir1k_pv(lines)
    else:
        raise FormatError(f"unknown label format {format!r}")
    if times.size == 0:
        raise FormatError(f"{path}: no label rows")
    if times.size >= 2 and np.any(np.diff(times) <= 0):
        raise FormatError(f"{path}: label times must be strictly increasing")

    source = PitchTrack(times=times, f0=np.maximum(f0, 0.0)) if _uniform(times) else None
    n_frames = int(np.floor(times[-1] * frame_rate)) + 1
    out_times = np.arange(n_frames, dtype=np.float64) / frame_rate
    if source is not None:
        f0_out = source.f0[source.nearest_indices(out_times)]
    else:
        idx = np.abs(times[None, :] - out_times[:, None]).argmin(axis=1)
        f0_out = np.maximum(f0, 0.0)[idx]
    return PitchTrack(times=out_times, f0=f0_out)


def _uniform(times: np.ndarray) -> bool:
    if times.size < 2:
        return True
    steps = np.diff(times)
    return bool(steps.max() - steps.min() <= 1e-9)
