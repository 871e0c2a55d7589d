"""WAV reading/writing and band-limited resampling."""
import struct

import numpy as np
import pytest

from fcpe import AudioBuffer, load_wav, resample, save_wav
from fcpe.exceptions import DomainError, FormatError, TruncatedFileError


def write_pcm16_wav(path, samples_i16, sample_rate=16000, channels=1):
    """Hand-rolled writer independent of the library's save_wav."""
    payload = struct.pack(f"<{len(samples_i16)}h", *samples_i16)
    fmt = struct.pack("<HHIIHH", 1, channels, sample_rate,
                      sample_rate * 2 * channels, 2 * channels, 16)
    with open(path, "wb") as fh:
        fh.write(b"RIFF" + struct.pack("<I", 4 + 8 + len(fmt) + 8 + len(payload)) + b"WAVE")
        fh.write(b"fmt " + struct.pack("<I", len(fmt)) + fmt)
        fh.write(b"data" + struct.pack("<I", len(payload)) + payload)


class TestLoadWav:
    def test_silence(self, tmp_path):
        p = tmp_path / "silence.wav"
        write_pcm16_wav(p, [0] * 16000)
        buf = load_wav(p)
        assert buf.sample_rate == 16000
        assert len(buf) == 16000
        assert np.all(buf.samples == 0.0)

    def test_full_scale_square_wave_scaling(self, tmp_path):
        # PCM scaling rule verified against a hand-written 8-sample file.
        p = tmp_path / "square.wav"
        write_pcm16_wav(p, [32767, -32768] * 4)
        buf = load_wav(p)
        expected = np.array([32767 / 32768, -1.0] * 4)
        np.testing.assert_array_equal(buf.samples, expected)

    def test_stereo_averaging_cancels(self, tmp_path):
        p = tmp_path / "stereo.wav"
        half = int(0.5 * 32768)
        write_pcm16_wav(p, [half, -half] * 100, channels=2)
        buf = load_wav(p)
        assert np.all(buf.samples == 0.0)
        assert len(buf) == 100

    def test_float32_round_trip(self, tmp_path):
        p = tmp_path / "f32.wav"
        x = np.linspace(-1.2, 1.2, 50)  # mixes may exceed full scale
        save_wav(p, AudioBuffer(x, 8000), fmt="float32")
        buf = load_wav(p)
        np.testing.assert_allclose(buf.samples, x, atol=1e-7)
        assert buf.sample_rate == 8000

    def test_pcm16_save_round_trip(self, tmp_path):
        p = tmp_path / "p16.wav"
        x = np.linspace(-0.9, 0.9, 64)
        save_wav(p, AudioBuffer(x, 16000), fmt="pcm16")
        buf = load_wav(p)
        np.testing.assert_allclose(buf.samples, x, atol=1.0 / 32768)

    def test_unsupported_codec_names_chunk(self, tmp_path):
        p = tmp_path / "alaw.wav"
        fmt = struct.pack("<HHIIHH", 6, 1, 8000, 8000, 1, 8)  # A-law
        with open(p, "wb") as fh:
            fh.write(b"RIFF" + struct.pack("<I", 36) + b"WAVE")
            fh.write(b"fmt " + struct.pack("<I", len(fmt)) + fmt)
            fh.write(b"data" + struct.pack("<I", 0))
        with pytest.raises(FormatError, match="fmt"):
            load_wav(p)

    def test_truncated_file(self, tmp_path):
        p = tmp_path / "trunc.wav"
        write_pcm16_wav(p, [0] * 100)
        data = p.read_bytes()
        p.write_bytes(data[: len(data) // 2])
        with pytest.raises(TruncatedFileError):
            load_wav(p)

    def test_not_riff(self, tmp_path):
        p = tmp_path / "bad.wav"
        p.write_bytes(b"OggS" + b"\x00" * 100)
        with pytest.raises(FormatError):
            load_wav(p)


class TestResample:
    def test_identity_is_bit_identical(self):
        rng = np.random.default_rng(0)
        buf = AudioBuffer(rng.standard_normal(1000) * 0.1, 16000)
        out = resample(buf, 16000)
        assert np.array_equal(out.samples, buf.samples)
        assert out.samples is not buf.samples

    def test_sine_peak_preserved_48k_to_16k(self):
        sr = 48000
        t = np.arange(sr) / sr
        buf = AudioBuffer(0.5 * np.sin(2 * np.pi * 440.0 * t), sr)
        out = resample(buf, 16000)
        assert len(out) == 16000
        # FFT peak oracle
        spectrum = np.abs(np.fft.rfft(out.samples * np.hanning(len(out))))
        peak_hz = np.argmax(spectrum) * 16000 / len(out)
        assert abs(peak_hz - 440.0) <= 1.0

    def test_sine_peak_preserved_16k_to_48k(self):
        sr = 16000
        t = np.arange(sr) / sr
        buf = AudioBuffer(0.5 * np.sin(2 * np.pi * 440.0 * t), sr)
        out = resample(buf, 48000)
        assert len(out) == 48000
        spectrum = np.abs(np.fft.rfft(out.samples * np.hanning(len(out))))
        peak_hz = np.argmax(spectrum) * 48000 / len(out)
        assert abs(peak_hz - 440.0) <= 1.0

    def test_dc_preserved(self):
        buf = AudioBuffer(np.full(4000, 0.25), 16000)
        out = resample(buf, 44100)
        np.testing.assert_allclose(out.samples, 0.25, atol=1e-3)
        out2 = resample(buf, 8000)
        np.testing.assert_allclose(out2.samples, 0.25, atol=1e-3)

    def test_output_length_rounds(self):
        buf = AudioBuffer(np.zeros(999), 16000)
        out = resample(buf, 22050)
        assert len(out) == round(999 * 22050 / 16000)

    def test_rejects_bad_rate(self):
        buf = AudioBuffer(np.zeros(10), 16000)
        with pytest.raises(DomainError):
            resample(buf, 0)


class TestAudioBuffer:
    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            AudioBuffer(np.array([0.0, np.nan]), 16000)

    def test_rejects_bad_rate(self):
        with pytest.raises(DomainError):
            AudioBuffer(np.zeros(4), 0)

    def test_duration(self):
        assert AudioBuffer(np.zeros(8000), 16000).duration == 0.5
