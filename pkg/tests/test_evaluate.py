"""Evaluation matrix plumbing and RTF benchmarking."""
import time

import numpy as np
import pytest

from fcpe import AudioBuffer, PitchTrack, eval_matrix, measure_rtf, save_wav
from fcpe.exceptions import DomainError, MetricUndefinedError


class ConstantPitchStub:
    """Oracle-perfect predictor for datasets labeled at one constant pitch."""

    def __init__(self, f0=220.0, frame_rate=100.0):
        self.f0 = f0
        self.frame_rate = frame_rate

    def predict(self, buf: AudioBuffer) -> PitchTrack:
        n = int(buf.duration * self.frame_rate) + 1
        times = np.arange(n) / self.frame_rate
        return PitchTrack(times=times, f0=np.full(n, self.f0))


class AudioSensitiveStub(ConstantPitchStub):
    """Deterministic function of the waveform, so corruption draws matter."""

    def predict(self, buf: AudioBuffer) -> PitchTrack:
        n = int(buf.duration * self.frame_rate) + 1
        times = np.arange(n) / self.frame_rate
        jitter = float(np.abs(buf.samples).mean())
        return PitchTrack(times=times, f0=np.full(n, self.f0 * (1.0 + 0.001 * jitter)))


@pytest.fixture
def sine_dataset(tmp_path, sine_16k):
    d = tmp_path / "data"
    d.mkdir()
    for i in range(3):
        buf = sine_16k(220.0, seconds=0.5)
        save_wav(d / f"clip{i}.wav", buf)
        n = int(0.5 * 100) + 1
        rows = "\n".join(f"{t / 100.0},220.0" for t in range(n))
        (d / f"clip{i}.csv").write_text(rows + "\n")
    return d


class TestEvalMatrix:
    def test_clean_only_oracle_stub_is_perfect(self, sine_dataset):
        report = eval_matrix(ConstantPitchStub(), sine_dataset, conditions=[], seeds=2)
        assert report.clean.rpa == 100.0
        assert report.clean.rca == 100.0
        assert report.cells == {}

    def test_cell_count_and_corruption_passes(self, sine_dataset):
        conditions = [("white", 20.0), ("pink", 0.0)]
        report = eval_matrix(
            AudioSensitiveStub(), sine_dataset, conditions, seeds=2
        )
        assert set(report.cells) == set(conditions)
        assert report.provenance["corruption_passes"] == 4
        for cell in report.cells.values():
            assert len(cell.per_seed) == 2

    def test_seed_average_is_arithmetic_mean(self, sine_dataset):
        report = eval_matrix(AudioSensitiveStub(), sine_dataset, [("white", -20.0)], seeds=3)
        cell = report.cells[("white", -20.0)]
        assert cell.rpa == pytest.approx(
            np.mean([r for _, r, _, _ in cell.per_seed]), abs=1e-12
        )

    def test_deterministic_given_seeds(self, sine_dataset):
        a = eval_matrix(AudioSensitiveStub(), sine_dataset, [("white", 0.0)], seeds=2)
        b = eval_matrix(AudioSensitiveStub(), sine_dataset, [("white", 0.0)], seeds=2)
        assert a.to_csv_text() == b.to_csv_text()

    def test_different_base_seed_changes_draws(self, sine_16k):
        from fcpe.evaluate import corrupt_audio, derived_seed

        buf = sine_16k(220.0, seconds=0.2)
        seed_a = derived_seed(0, 0, 0, "white", -20.0)
        seed_b = derived_seed(99, 0, 0, "white", -20.0)
        assert seed_a != seed_b
        a = corrupt_audio(buf, "white", -20.0, seed_a, {})
        b = corrupt_audio(buf, "white", -20.0, seed_b, {})
        assert not np.array_equal(a.samples, b.samples)
        # same derived seed reproduces the identical draw
        again = corrupt_audio(buf, "white", -20.0, seed_a, {})
        assert np.array_equal(a.samples, again.samples)

    def test_unpaired_files_warned_and_counted(self, sine_dataset, sine_16k):
        save_wav(sine_dataset / "orphan.wav", sine_16k(220.0, seconds=0.2))
        with pytest.warns(UserWarning, match="orphan"):
            report = eval_matrix(ConstantPitchStub(), sine_dataset, [], seeds=1)
        assert report.provenance["n_unpaired"] == 1
        assert report.provenance["n_files"] == 3

    def test_noise_file_condition(self, sine_dataset, tmp_path, sine_16k):
        noise_path = tmp_path / "hum.wav"
        rng = np.random.default_rng(0)
        save_wav(noise_path, AudioBuffer(rng.standard_normal(16000) * 0.1, 16000))
        report = eval_matrix(
            AudioSensitiveStub(), sine_dataset, [(f"file:{noise_path}", 10.0)], seeds=1
        )
        assert len(report.cells) == 1

    def test_empty_dataset_rejected(self, tmp_path):
        (tmp_path / "empty").mkdir()
        with pytest.raises(MetricUndefinedError):
            eval_matrix(ConstantPitchStub(), tmp_path / "empty", [], seeds=1)

    def test_csv_schema(self, sine_dataset):
        report = eval_matrix(AudioSensitiveStub(), sine_dataset, [("white", 20.0)], seeds=2)
        lines = report.to_csv_text().splitlines()
        assert lines[0] == "noise_kind,snr_db,seed,rpa,rca,n_frames"
        assert lines[1].startswith("clean,,avg,")
        seed_rows = [l for l in lines if l.startswith("white,20,")]
        assert len(seed_rows) == 3  # two seeds + avg
        assert seed_rows[-1].split(",")[2] == "avg"


class SleepStub:
    """t_process == t_audio by construction."""

    def __init__(self, per_second=1.0):
        self.per_second = per_second

    def predict(self, buf: AudioBuffer) -> PitchTrack:
        time.sleep(self.per_second * buf.duration)
        return PitchTrack(times=np.array([0.0]), f0=np.array([100.0]))


class TestMeasureRtf:
    def test_unit_rtf_stub(self):
        audio = AudioBuffer(np.zeros(16000), 16000)
        result = measure_rtf(SleepStub(), audio, warmup=0, reps=3)
        assert result["t_audio"] == 1.0
        assert result["rtf"] == pytest.approx(1.0, abs=0.05)

    def test_self_consistency(self):
        audio = AudioBuffer(np.zeros(16000), 16000)
        result = measure_rtf(SleepStub(0.05), audio, warmup=0, reps=2)
        assert result["rtf"] * result["t_audio"] == pytest.approx(
            result["t_process"], abs=1e-9
        )

    def test_linear_time_stub_rtf_invariant_to_duration(self):
        short = AudioBuffer(np.zeros(16000), 16000)
        long = AudioBuffer(np.zeros(32000), 16000)
        stub = SleepStub(0.1)
        r1 = measure_rtf(stub, short, warmup=0, reps=2)
        r2 = measure_rtf(stub, long, warmup=0, reps=2)
        assert r2["rtf"] == pytest.approx(r1["rtf"], rel=0.2)

    def test_short_audio_rejected(self):
        audio = AudioBuffer(np.zeros(8000), 16000)
        with pytest.raises(DomainError):
            measure_rtf(SleepStub(), audio)


class TestParallelEval:
    def test_jobs_do_not_change_results(self, sine_dataset):
        serial = eval_matrix(AudioSensitiveStub(), sine_dataset, [("white", 0.0)],
                             seeds=2, jobs=1)
        parallel = eval_matrix(AudioSensitiveStub(), sine_dataset, [("white", 0.0)],
                               seeds=2, jobs=4)
        assert serial.to_csv_text() == parallel.to_csv_text()
