import numpy as np
import pytest

from fcpe import AudioBuffer, MelConfig, ModelConfig, PitchGrid


@pytest.fixture(scope="session")
def grid() -> PitchGrid:
    return PitchGrid()


@pytest.fixture(scope="session")
def toy_model_config() -> ModelConfig:
    return ModelConfig(n_mels=8, d_model=8, n_layers=2, dw_kernel=5, expand=2, n_bins=16)


@pytest.fixture
def sine_16k():
    def make(freq: float, seconds: float = 1.0, sample_rate: int = 16000, amp: float = 0.5):
        t = np.arange(int(seconds * sample_rate)) / sample_rate
        return AudioBuffer(samples=amp * np.sin(2 * np.pi * freq * t), sample_rate=sample_rate)

    return make


@pytest.fixture(scope="session")
def mel_config() -> MelConfig:
    return MelConfig()
