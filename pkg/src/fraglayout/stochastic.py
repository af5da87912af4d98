"""Seeded randomness kernel: RNG streams, chaos maps, Levy-flight steps.

All stochastic behaviour in the package flows through :class:`RngStream`
(numpy PCG64) so that runs are bit-reproducible across platforms for a given
seed. Parallel work derives child streams with :func:`substream_seed`.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, ContractViolation

RNG_ALGORITHM = "pcg64"


class RngStream:
    """Single-owner stream of seeded draws. Uniforms lie in [0, 1)."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, size: int | None = None):
        return self._gen.random(size)

    def uniform_open(self) -> float:
        # rejects an exact 0.0 so callers can divide by the draw
        while True:
            u = float(self._gen.random())
            if u != 0.0:
                return u

    def uniform_signed(self, size: int | None = None):
        return self._gen.uniform(-1.0, 1.0, size)

    def normal(self, sigma: float = 1.0, size: int | None = None):
        return self._gen.normal(0.0, sigma, size)

    def integers(self, low: int, high: int):
        """One integer in [low, high) (numpy half-open convention)."""
        return int(self._gen.integers(low, high))

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)


def substream_seed(master_seed: int, *keys: int | str) -> int:
    """Derive a 64-bit child seed from a master seed and labelling keys.

    SHA-256 over the decimal master seed and the stringified keys joined by a
    separator byte; first 8 digest bytes, little-endian. Stable across runs
    and platforms (unlike the builtin hash).
    """
    h = hashlib.sha256(str(int(master_seed)).encode())
    for key in keys:
        h.update(b"\x1f")
        h.update(str(key).encode())
    return int.from_bytes(h.digest()[:8], "little")


# ---------------------------------------------------------------------------
# chaos maps


class ChaosMap(enum.Enum):
    LOGISTIC = "logistic"
    SINE = "sine"
    MODIFIED_SINE = "modified_sine"


@dataclass(frozen=True)
class ChaosState:
    """Current value of a chaotic iteration, confined to [0, 1].

    mu applies to the logistic map only (kept within [0, 4] so iterates stay
    in [0, 1]); beta applies to the plain sine map only (kept within (0, 1]
    for the same reason).
    """

    z: float
    kind: ChaosMap = ChaosMap.MODIFIED_SINE
    mu: float = 4.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.z <= 1.0:
            raise ContractViolation(f"chaos state z={self.z} outside [0, 1]")
        if not 0.0 <= self.mu <= 4.0:
            raise ConfigError(f"logistic mu={self.mu} outside [0, 4]")
        if not 0.0 < self.beta <= 1.0:
            raise ConfigError(f"sine beta={self.beta} outside (0, 1]")


def seed_chaos(rng: RngStream, kind: ChaosMap = ChaosMap.MODIFIED_SINE, **params) -> ChaosState:
    """Fresh chaos state with z0 drawn uniformly from (0, 1); 0 is a fixed point."""
    return ChaosState(z=rng.uniform_open(), kind=kind, **params)


def chaos_step(state: ChaosState, rng: RngStream) -> tuple[ChaosState, float]:
    """Advance the chaotic iteration one step and return (new state, new z).

    logistic:      z' = mu * z * (1 - z)
    sine:          z' = beta * sin(pi * z)
    modified sine: z' = |sin(pi * z / u)|, u a fresh uniform draw in (0, 1)
    """
    z = state.z
    if state.kind is ChaosMap.LOGISTIC:
        z_next = state.mu * z * (1.0 - z)
    elif state.kind is ChaosMap.SINE:
        z_next = state.beta * math.sin(math.pi * z)
    else:
        z_next = abs(math.sin(math.pi * z / rng.uniform_open()))
    return replace(state, z=z_next), z_next


def chaotic_inertia(state: ChaosState, rng: RngStream) -> tuple[ChaosState, float]:
    """One chaotic-random inertia weight: w = 0.5 * r + 0.5 * z_next, in [0, 1)."""
    if state.kind is not ChaosMap.MODIFIED_SINE:
        raise ContractViolation("chaotic inertia is defined on the modified sine map")
    state, z_next = chaos_step(state, rng)
    return state, 0.5 * float(rng.uniform()) + 0.5 * z_next


# ---------------------------------------------------------------------------
# Levy flight


@dataclass(frozen=True)
class LevyConfig:
    """Heavy-tailed step sampler parameters: stability exponent and scale."""

    lam: float = 1.5
    step_scale: float = 0.1

    def __post_init__(self) -> None:
        if not 1.0 <= self.lam <= 3.0:
            raise ConfigError(f"levy exponent lam={self.lam} outside [1, 3]")
        if self.step_scale < 0.0:
            raise ConfigError(f"levy step_scale={self.step_scale} negative")


def mantegna_sigma(lam: float) -> float:
    """Normalizing sigma for the Mantegna sampler at exponent lam."""
    num = math.gamma(1.0 + lam) * math.sin(math.pi * lam / 2.0)
    den = math.gamma((1.0 + lam) / 2.0) * lam * 2.0 ** ((lam - 1.0) / 2.0)
    return abs(num / den) ** (1.0 / lam)


def levy_draws(lam: float, rng: RngStream, n: int) -> np.ndarray:
    """n heavy-tailed Mantegna steps u / |v|^(1/lam); tail ~ T^(-lam)."""
    sigma = mantegna_sigma(lam)
    u = np.asarray(rng.normal(sigma, n))
    v = np.asarray(rng.normal(1.0, n))
    while (zero := v == 0.0).any():  # degenerate divisor, measure-zero but fatal
        v[zero] = rng.normal(1.0, int(zero.sum()))
    return u / np.abs(v) ** (1.0 / lam)


def levy_step(cfg: LevyConfig, rng: RngStream, dims: int) -> np.ndarray:
    """Displacement vector: step_scale * levy_draw * alpha, alpha ~ U[-1, 1] per dim."""
    steps = levy_draws(cfg.lam, rng, dims)
    alpha = np.asarray(rng.uniform_signed(dims))
    return cfg.step_scale * steps * alpha
