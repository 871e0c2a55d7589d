"""Depthwise-separable convolutional pitch network.

The network maps a (T, n_mels) log-mel matrix to a (T, n_bins) per-bin
probability matrix: a two-layer conv embedding, a stack of residual blocks
(layernorm -> pointwise expand -> gated activation -> depthwise conv ->
activation -> pointwise project), and a sigmoid linear head.  Everything
runs in float32 and is a pure function of (weights, input).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .archive import TensorArchive
from .exceptions import ArchiveError, ConfigError, ShapeError
from .mel import MelConfig, MelSpectrogram

LN_EPS = 1e-5
EMBED_KERNEL = 3


@dataclass(frozen=True)
class ModelConfig:
    n_mels: int = 128
    d_model: int = 512
    n_layers: int = 6
    dw_kernel: int = 31
    expand: int = 2
    use_harmonic_emb: bool = False
    n_bins: int = 360

    def __post_init__(self):
        if self.d_model <= 0 or self.n_mels <= 0 or self.n_bins <= 0:
            raise ConfigError("d_model, n_mels, and n_bins must be positive")
        if self.n_layers < 1:
            raise ConfigError(f"n_layers must be >= 1, got {self.n_layers}")
        if self.dw_kernel < 1 or self.dw_kernel % 2 == 0:
            raise ConfigError(
                f"dw_kernel must be odd for symmetric same-padding, got {self.dw_kernel}"
            )
        if self.expand < 1:
            raise ConfigError(f"expand must be >= 1, got {self.expand}")

    def to_metadata(self) -> dict[str, str]:
        return {
            "model.n_mels": str(self.n_mels),
            "model.d_model": str(self.d_model),
            "model.n_layers": str(self.n_layers),
            "model.dw_kernel": str(self.dw_kernel),
            "model.expand": str(self.expand),
            "model.use_harmonic_emb": str(int(self.use_harmonic_emb)),
            "model.n_bins": str(self.n_bins),
        }

    @classmethod
    def from_metadata(cls, meta: dict[str, str]) -> "ModelConfig":
        try:
            return cls(
                n_mels=int(meta["model.n_mels"]),
                d_model=int(meta["model.d_model"]),
                n_layers=int(meta["model.n_layers"]),
                dw_kernel=int(meta["model.dw_kernel"]),
                expand=int(meta["model.expand"]),
                use_harmonic_emb=bool(int(meta["model.use_harmonic_emb"])),
                n_bins=int(meta["model.n_bins"]),
            )
        except KeyError as exc:
            raise ArchiveError(f"archive metadata missing {exc} (pass a config)") from None


def required_tensor_shapes(cfg: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Every tensor the network needs, keyed by archive name."""
    d, e, k = cfg.d_model, cfg.expand, cfg.dw_kernel
    shapes: dict[str, tuple[int, ...]] = {
        "embed.conv1.weight": (d, cfg.n_mels, EMBED_KERNEL),
        "embed.conv1.bias": (d,),
        "embed.conv2.weight": (d, d, EMBED_KERNEL),
        "embed.conv2.bias": (d,),
    }
    if cfg.use_harmonic_emb:
        shapes["harmonic.embed"] = (d,)
    for i in range(cfg.n_layers):
        p = f"blocks.{i}."
        shapes[p + "norm.gamma"] = (d,)
        shapes[p + "norm.beta"] = (d,)
        shapes[p + "pw1.weight"] = (e * d, d)
        shapes[p + "pw1.bias"] = (e * d,)
        shapes[p + "dw.weight"] = (e * d, k)
        shapes[p + "dw.bias"] = (e * d,)
        shapes[p + "pw2.weight"] = (d, e * d)
        shapes[p + "pw2.bias"] = (d,)
    shapes["head.weight"] = (cfg.n_bins, d)
    shapes["head.bias"] = (cfg.n_bins,)
    return shapes


class LynxNet:
    """Immutable network: a config plus its named float32 tensors."""

    def __init__(
        self,
        config: ModelConfig,
        tensors: dict[str, np.ndarray],
        metadata: dict[str, str] | None = None,
    ):
        required = required_tensor_shapes(config)
        missing = sorted(set(required) - set(tensors))
        if missing:
            raise ArchiveError(f"missing tensors: {', '.join(missing)}")
        mismatched = [
            f"{name}: expected {required[name]}, found {tuple(tensors[name].shape)}"
            for name in required
            if tuple(tensors[name].shape) != required[name]
        ]
        if mismatched:
            raise ArchiveError("shape mismatch: " + "; ".join(sorted(mismatched)))
        self.config = config
        self.metadata = dict(metadata or {})
        self.tensors: dict[str, np.ndarray] = {}
        for name in required:
            arr = np.ascontiguousarray(tensors[name], dtype=np.float32)
            arr.flags.writeable = False
            self.tensors[name] = arr

    def mel_config(self) -> MelConfig:
        """Mel convention recorded alongside the weights (defaults if absent)."""
        return MelConfig.from_metadata(self.metadata)

    def predict_proba(self, X) -> np.ndarray:
        return forward(self, X)

    @classmethod
    def random(cls, cfg: ModelConfig, seed: int = 0, scale: float = 1.0) -> "LynxNet":
        """Fan-in-scaled Gaussian weights, zero biases; deterministic per seed."""
        rng = np.random.default_rng(seed)
        tensors = {}
        for name, shape in required_tensor_shapes(cfg).items():
            if name.endswith(".bias") or name.endswith("norm.beta"):
                tensors[name] = np.zeros(shape, dtype=np.float32)
            elif name.endswith("norm.gamma"):
                tensors[name] = np.ones(shape, dtype=np.float32)
            elif name == "harmonic.embed":
                tensors[name] = rng.standard_normal(shape).astype(np.float32) * 0.01
            else:
                fan_in = int(np.prod(shape[1:])) if len(shape) > 1 else shape[0]
                std = scale / np.sqrt(fan_in)
                tensors[name] = (rng.standard_normal(shape) * std).astype(np.float32)
        return cls(cfg, tensors)

    @classmethod
    def zeros(cls, cfg: ModelConfig) -> "LynxNet":
        tensors = {
            name: np.zeros(shape, dtype=np.float32)
            for name, shape in required_tensor_shapes(cfg).items()
        }
        return cls(cfg, tensors)


def _silu(x: np.ndarray) -> np.ndarray:
    return x * expit(x)


def _layer_norm(x: np.ndarray, gamma: np.ndarray, beta: np.ndarray) -> np.ndarray:
    mu = x.mean(axis=1, keepdims=True)
    xc = x - mu
    var = np.mean(xc * xc, axis=1, keepdims=True)
    return xc / np.sqrt(var + np.float32(LN_EPS)) * gamma + beta


def _conv1d_same(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full conv along time: x (T, Cin), w (Cout, Cin, k) -> (T, Cout)."""
    T = x.shape[0]
    k = w.shape[2]
    pad = k // 2
    xp = np.zeros((T + 2 * pad, x.shape[1]), dtype=np.float32)
    xp[pad : pad + T] = x
    out = np.broadcast_to(b, (T, w.shape[0])).copy()
    for j in range(k):
        out += xp[j : j + T] @ w[:, :, j].T
    return out


def _depthwise_same(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-channel conv along time: x (T, C), w (C, k) -> (T, C)."""
    T = x.shape[0]
    k = w.shape[1]
    pad = k // 2
    xp = np.zeros((T + 2 * pad, x.shape[1]), dtype=np.float32)
    xp[pad : pad + T] = x
    out = np.broadcast_to(b, (T, x.shape[1])).copy()
    for j in range(k):
        out += xp[j : j + T] * w[:, j]
    return out


def forward(net: LynxNet, X) -> np.ndarray:
    """Run the network on a (T, n_mels) log-mel matrix.

    Returns the (T, n_bins) probability matrix, float32 in [0, 1].
    """
    if isinstance(X, MelSpectrogram):
        X = X.data
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != net.config.n_mels:
        raise ShapeError(
            f"input must be (T, {net.config.n_mels}), got {tuple(X.shape)}"
        )
    t = net.tensors
    h = X.astype(np.float32, copy=False)
    h = _silu(_conv1d_same(h, t["embed.conv1.weight"], t["embed.conv1.bias"]))
    h = _conv1d_same(h, t["embed.conv2.weight"], t["embed.conv2.bias"])
    if net.config.use_harmonic_emb:
        h = h + t["harmonic.embed"]
    for i in range(net.config.n_layers):
        p = f"blocks.{i}."
        y = _layer_norm(h, t[p + "norm.gamma"], t[p + "norm.beta"])
        y = _silu(y @ t[p + "pw1.weight"].T + t[p + "pw1.bias"])
        y = _silu(_depthwise_same(y, t[p + "dw.weight"], t[p + "dw.bias"]))
        y = y @ t[p + "pw2.weight"].T + t[p + "pw2.bias"]
        h = h + y
    logits = h @ t["head.weight"].T + t["head.bias"]
    return expit(logits)


def receptive_field(cfg: ModelConfig) -> int:
    """Width in frames of the input window that can influence one output."""
    embed_rf = 1 + 2 * (EMBED_KERNEL - 1)
    return embed_rf + cfg.n_layers * (cfg.dw_kernel - 1)


def count_params(cfg: ModelConfig) -> int:
    """Total learnable scalar count across every tensor of the config."""
    return int(
        sum(np.prod(shape, dtype=np.int64) for shape in required_tensor_shapes(cfg).values())
    )


def macs_per_frame(cfg: ModelConfig) -> int:
    """Multiply-accumulates per output frame over conv and linear ops."""
    d, e, k = cfg.d_model, cfg.expand, cfg.dw_kernel
    embed = cfg.n_mels * d * EMBED_KERNEL + d * d * EMBED_KERNEL
    block = d * (e * d) + (e * d) * k + (e * d) * d
    head = d * cfg.n_bins
    return embed + cfg.n_layers * block + head


def count_flops(cfg: ModelConfig, seconds: float, frame_rate: float = 100.0) -> float:
    """FLOPs (2 per multiply-accumulate) to process ``seconds`` of audio."""
    if seconds <= 0:
        raise ConfigError(f"seconds must be > 0, got {seconds}")
    return 2.0 * macs_per_frame(cfg) * (seconds * frame_rate)


def save_weights(net: LynxNet, extra_metadata: dict[str, str] | None = None) -> TensorArchive:
    """Package the network into an archive with its config echoed in metadata."""
    metadata = dict(net.metadata)
    metadata.update(net.config.to_metadata())
    if extra_metadata:
        metadata.update(extra_metadata)
    return TensorArchive(entries=dict(net.tensors), metadata=metadata)


def load_weights(archive: TensorArchive, cfg: ModelConfig | None = None) -> LynxNet:
    """Build a network from an archive.

    With ``cfg=None`` the config is reconstructed from archive metadata.
    Raises ArchiveError listing every missing tensor, or every shape
    mismatch (expected vs found), if the archive does not satisfy the
    config.
    """
    if cfg is None:
        cfg = ModelConfig.from_metadata(archive.metadata)
    return LynxNet(cfg, archive.entries, metadata=archive.metadata)
