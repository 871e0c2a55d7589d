"""Scikit-learn facade: params, cloning, end-to-end predict."""
import numpy as np
import pytest
from sklearn.base import clone

from fcpe import AudioBuffer, MelFrontend, ModelConfig, PitchEstimator
from fcpe.exceptions import ConfigError
from fcpe.mel import MelSpectrogram


class TestMelFrontend:
    def test_get_set_params(self):
        fe = MelFrontend()
        params = fe.get_params()
        assert params["hop"] == 160
        fe.set_params(hop=80)
        assert fe.config().hop == 80

    def test_clone(self):
        fe = MelFrontend(n_mels=64)
        assert clone(fe).get_params() == fe.get_params()

    def test_transform_single_buffer(self, sine_16k):
        mel = MelFrontend().transform(sine_16k(440.0, seconds=0.2))
        assert isinstance(mel, MelSpectrogram)
        assert mel.data.shape[1] == 128

    def test_transform_resamples(self, sine_16k):
        buf = AudioBuffer(np.zeros(44100), 44100)
        mel = MelFrontend().transform(buf)
        assert mel.config.sample_rate == 16000

    def test_transform_list(self, sine_16k):
        mels = MelFrontend().transform([sine_16k(220.0, 0.1), sine_16k(330.0, 0.1)])
        assert len(mels) == 2

    def test_fit_returns_self(self):
        fe = MelFrontend()
        assert fe.fit() is fe


@pytest.fixture(scope="module")
def toy_estimator():
    cfg = ModelConfig(n_mels=128, d_model=8, n_layers=1, dw_kernel=3, n_bins=360)
    return PitchEstimator.random(cfg, seed=0)


class TestPitchEstimator:

    def test_predict_shape_and_rate(self, toy_estimator, sine_16k):
        track = toy_estimator.predict(sine_16k(220.0, seconds=0.3))
        assert len(track) == 31
        assert track.frame_period == pytest.approx(0.01)

    def test_predict_proba_range(self, toy_estimator, sine_16k):
        Y = toy_estimator.predict_proba(sine_16k(220.0, seconds=0.2))
        assert Y.shape == (21, 360)
        assert Y.min() >= 0.0 and Y.max() <= 1.0

    def test_predict_accepts_mel_matrix(self, toy_estimator, sine_16k):
        mel = MelFrontend().transform(sine_16k(220.0, seconds=0.2))
        a = toy_estimator.predict(mel)
        b = toy_estimator.predict(mel.data)
        assert np.array_equal(a.f0, b.f0)

    def test_no_net_raises(self, sine_16k):
        with pytest.raises(ConfigError):
            PitchEstimator().predict(sine_16k(220.0, 0.1))

    def test_get_params_threshold(self, toy_estimator):
        assert toy_estimator.get_params()["threshold"] == 0.05

    def test_archive_round_trip(self, toy_estimator, tmp_path, sine_16k):
        from fcpe import save_weights

        p = tmp_path / "toy.fcpewt"
        save_weights(toy_estimator.net).save(p)
        loaded = PitchEstimator.from_archive(p)
        buf = sine_16k(330.0, seconds=0.2)
        assert np.array_equal(loaded.predict(buf).f0, toy_estimator.predict(buf).f0)
