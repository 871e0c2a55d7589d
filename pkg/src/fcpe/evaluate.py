"""Noise-condition evaluation matrix and real-time-factor benchmarking.

``eval_matrix`` scores a pitch predictor over a labeled WAV directory under
a grid of (noise kind, SNR) corruptions, averaging each cell over several
seeded corruption draws; ``measure_rtf`` times the full pipeline against
audio duration.
"""
from __future__ import annotations

import statistics
import time
import warnings
import zlib
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np
from threadpoolctl import threadpool_limits

from .audio import AudioBuffer, load_wav
from .augment import NOISE_BETAS, NoiseSpec, gen_colored_noise, mix_at_snr
from .exceptions import ConfigError, DomainError, MetricUndefinedError
from .metrics import ingest_labels, pitch_accuracy_counts
from .track import PitchTrack

LABEL_EXTENSIONS = {"csv_hz": ".csv", "mir1k_pv": ".pv"}


class PitchPredictor(Protocol):
    """Anything that maps audio to a pitch track (estimator or test stub)."""

    def predict(self, buf: AudioBuffer) -> PitchTrack: ...


@dataclass
class CellStats:
    rpa: float
    rca: float
    n_frames: int
    per_seed: list[tuple[int, float, float, int]] = field(default_factory=list)


@dataclass
class EvalReport:
    clean: CellStats
    cells: dict[tuple[str, float], CellStats]
    provenance: dict = field(default_factory=dict)

    def to_csv_text(self) -> str:
        lines = ["noise_kind,snr_db,seed,rpa,rca,n_frames"]

        def fmt(kind: str, snr, seed, stats_rpa, stats_rca, n) -> str:
            snr_txt = "" if snr is None else f"{snr:g}"
            return f"{kind},{snr_txt},{seed},{stats_rpa:.6f},{stats_rca:.6f},{n}"

        lines.append(fmt("clean", None, "avg", self.clean.rpa, self.clean.rca, self.clean.n_frames))
        for (kind, snr), cell in self.cells.items():
            for seed, r, c, n in cell.per_seed:
                lines.append(fmt(kind, snr, seed, r, c, n))
            lines.append(fmt(kind, snr, "avg", cell.rpa, cell.rca, cell.n_frames))
        return "\n".join(lines) + "\n"

    def format_table(self) -> str:
        """Aligned text table, one row per noise kind, one column per SNR."""
        snrs = sorted({snr for _, snr in self.cells}, reverse=True)
        kinds = list(dict.fromkeys(kind for kind, _ in self.cells))
        header = ["kind".ljust(12), "clean".rjust(9)] + [f"{s:g} dB".rjust(9) for s in snrs]
        rows = ["  ".join(header)]
        for kind in kinds or ["-"]:
            cols = [kind.ljust(12), f"{self.clean.rpa:9.2f}"]
            for s in snrs:
                cell = self.cells.get((kind, s))
                cols.append(f"{cell.rpa:9.2f}" if cell else " " * 9)
            rows.append("  ".join(cols))
        return "\n".join(rows) + "\n"

    def save_csv(self, path) -> None:
        Path(path).write_text(self.to_csv_text())


def derived_seed(base_seed: int, seed_idx: int, file_idx: int, kind: str, snr_db: float) -> int:
    """Stable per-(draw, file, condition) noise seed, independent of process
    hash randomization."""
    entropy = (
        int(base_seed) & 0xFFFFFFFF,
        seed_idx,
        file_idx,
        zlib.crc32(kind.encode()),
        (int(round(snr_db * 100.0)) + (1 << 24)) & 0xFFFFFFFF,
    )
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def corrupt_audio(buf: AudioBuffer, kind: str, snr_db: float, seed: int,
                  noise_cache: dict) -> AudioBuffer:
    if kind in NOISE_BETAS:
        spec = NoiseSpec(
            beta=NOISE_BETAS[kind], seed=seed, length=len(buf), sample_rate=buf.sample_rate
        )
        return mix_at_snr(buf, gen_colored_noise(spec), snr_db)
    if kind.startswith("file:"):
        path = kind[len("file:"):]
        if path not in noise_cache:
            noise_cache[path] = load_wav(path)
        noise = noise_cache[path]
        if noise.sample_rate != buf.sample_rate:
            raise ConfigError(
                f"noise file rate {noise.sample_rate} != signal rate {buf.sample_rate}"
            )
        rng = np.random.default_rng(seed)
        if len(noise) > len(buf):
            start = int(rng.integers(0, len(noise) - len(buf) + 1))
            noise = AudioBuffer(noise.samples[start : start + len(buf)], noise.sample_rate)
        return mix_at_snr(buf, noise, snr_db)
    raise ConfigError(
        f"unknown noise kind {kind!r}; expected one of "
        f"{sorted(NOISE_BETAS)} or 'file:PATH'"
    )


def discover_pairs(dataset_dir, labels_format: str) -> tuple[list[tuple[Path, Path]], list[str]]:
    """Pair every WAV in the directory with its same-stem label file."""
    ext = LABEL_EXTENSIONS.get(labels_format)
    if ext is None:
        raise ConfigError(f"unknown label format {labels_format!r}")
    pairs, unpaired = [], []
    for wav in sorted(Path(dataset_dir).glob("*.wav")):
        label = wav.with_suffix(ext)
        if label.exists():
            pairs.append((wav, label))
        else:
            unpaired.append(wav.name)
    return pairs, unpaired


def eval_matrix(
    model: PitchPredictor,
    dataset_dir,
    conditions: list[tuple[str, float]],
    seeds: int = 5,
    labels_format: str = "csv_hz",
    frame_rate: float = 100.0,
    tol_cents: float = 50.0,
    base_seed: int = 0,
    jobs: int = 1,
) -> EvalReport:
    """Score the predictor clean and under every (noise kind, SNR) cell.

    Each cell is corrupted and re-scored ``seeds`` times with independent
    deterministic draws and the per-seed pooled accuracies are averaged.
    ``jobs`` > 1 distributes per-file work over a thread pool; results are
    identical (corruption seeds are derived per file index, and counts are
    pooled in file order).  Unpaired WAVs are skipped with a warning and
    counted in provenance.
    """
    pairs, unpaired = discover_pairs(dataset_dir, labels_format)
    if unpaired:
        warnings.warn(f"skipping {len(unpaired)} unpaired file(s): {', '.join(unpaired)}")
    if not pairs:
        raise MetricUndefinedError(f"no paired wav/label files in {dataset_dir}")

    clips = [
        (load_wav(wav), ingest_labels(label, labels_format, frame_rate))
        for wav, label in pairs
    ]

    def run_files(work) -> list[PitchTrack]:
        if jobs <= 1:
            return [work(i) for i in range(len(clips))]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(work, range(len(clips))))

    def pooled(est_tracks: list[PitchTrack]) -> tuple[float, float, int]:
        voiced = correct_p = correct_c = 0
        for (_, ref), est in zip(clips, est_tracks):
            v, p, c = pitch_accuracy_counts(ref, est, tol_cents)
            voiced, correct_p, correct_c = voiced + v, correct_p + p, correct_c + c
        if voiced == 0:
            raise MetricUndefinedError("dataset has no voiced reference frames")
        return 100.0 * correct_p / voiced, 100.0 * correct_c / voiced, voiced

    clean_rpa, clean_rca, n_voiced = pooled(run_files(lambda i: model.predict(clips[i][0])))
    clean = CellStats(rpa=clean_rpa, rca=clean_rca, n_frames=n_voiced)

    cells: dict[tuple[str, float], CellStats] = {}
    noise_cache: dict[str, AudioBuffer] = {}
    corruption_passes = 0
    for kind, snr_db in conditions:
        per_seed = []
        for s in range(seeds):

            def corrupt_and_predict(file_idx: int) -> PitchTrack:
                buf = clips[file_idx][0]
                seed = derived_seed(base_seed, s, file_idx, kind, snr_db)
                return model.predict(corrupt_audio(buf, kind, snr_db, seed, noise_cache))

            est_tracks = run_files(corrupt_and_predict)
            corruption_passes += 1
            r, c, n = pooled(est_tracks)
            per_seed.append((s, r, c, n))
        cells[(kind, snr_db)] = CellStats(
            rpa=statistics.fmean(r for _, r, _, _ in per_seed),
            rca=statistics.fmean(c for _, _, c, _ in per_seed),
            n_frames=per_seed[0][3],
            per_seed=per_seed,
        )

    provenance = {
        "dataset": str(dataset_dir),
        "n_files": len(pairs),
        "n_unpaired": len(unpaired),
        "seeds": seeds,
        "base_seed": base_seed,
        "corruption_passes": corruption_passes,
    }
    return EvalReport(clean=clean, cells=cells, provenance=provenance)


def measure_rtf(
    model: PitchPredictor,
    audio: AudioBuffer,
    warmup: int = 2,
    reps: int = 10,
    single_thread: bool = True,
) -> dict[str, float]:
    """Real-time factor: median wall-clock processing time over audio duration.

    Runs single-threaded by default so timings are stable; pass
    ``single_thread=False`` to benchmark multi-threaded throughput.
    """
    if audio.duration < 1.0:
        raise DomainError(
            f"benchmark audio must be at least 1 s, got {audio.duration:.3f} s"
        )
    ctx = threadpool_limits(limits=1) if single_thread else nullcontext()
    with ctx:
        for _ in range(warmup):
            model.predict(audio)
        samples = []
        for _ in range(reps):
            t0 = time.perf_counter()
            model.predict(audio)
            samples.append(time.perf_counter() - t0)
    t_process = statistics.median(samples)
    t_audio = audio.duration
    return {"rtf": t_process / t_audio, "t_process": t_process, "t_audio": t_audio}
