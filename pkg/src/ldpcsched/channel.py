"""BPSK over AWGN: modulation, noise, SNR conversion and channel LLRs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError

_SEED_MASK = 2**64 - 1


def ebno_db_to_noise_variance(ebno_db: float, rate: float) -> float:
    """Per-dimension noise variance for unit-energy BPSK at a given Eb/N0.

    Uses ``sigma^2 = 1 / (2 R Eb/N0)``, so that ``2/sigma^2 = 4 R Eb/N0``.
    """
    if not 0.0 < rate <= 1.0:
        raise ConfigError(f"code rate must lie in (0, 1], got {rate}")
    return 1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0))


@dataclass(frozen=True)
class ChannelConfig:
    ebno_db: float
    rate: float
    seed: int = 0

    def __post_init__(self):
        # validates the rate
        ebno_db_to_noise_variance(self.ebno_db, self.rate)

    @property
    def noise_variance(self) -> float:
        return ebno_db_to_noise_variance(self.ebno_db, self.rate)


def random_stream(master_seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator for the sub-stream ``(master_seed, *keys)``.

    Streams depend only on the key tuple, never on call order, so trials can be
    generated in any order or on any worker with identical results.
    """
    entropy = [int(master_seed) & _SEED_MASK] + [int(k) & _SEED_MASK for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def bpsk_modulate(c) -> np.ndarray:
    """Map bit 0 to +1 and bit 1 to -1."""
    c = np.asarray(c)
    if c.size and not np.isin(c, (0, 1)).all():
        raise ValueError("bpsk_modulate expects bits in {0, 1}")
    return 1.0 - 2.0 * c.astype(np.float64)


def awgn_transmit(x, config: ChannelConfig | float, stream: np.random.Generator) -> np.ndarray:
    """Add i.i.d. N(0, sigma^2) noise. ``config`` may be a bare variance."""
    var = config.noise_variance if isinstance(config, ChannelConfig) else float(config)
    if var <= 0:
        raise ConfigError(f"noise variance must be positive, got {var}")
    x = np.asarray(x, dtype=np.float64)
    return x + np.sqrt(var) * stream.standard_normal(x.shape)


def channel_llrs(y, noise_variance: float) -> np.ndarray:
    """``2 y / sigma^2``; positive values favour bit 0."""
    if not noise_variance > 0:
        raise ConfigError(f"noise variance must be positive, got {noise_variance}")
    return (2.0 / noise_variance) * np.asarray(y, dtype=np.float64)
