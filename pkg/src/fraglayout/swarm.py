"""The seven particle-swarm variants over the fragment-layout problem.

Positions are continuous vectors decoded by the SPV rule; fitness is the
overlap-matrix layout score. The flagship variant couples a constriction
coefficient, a chaotic-random inertia weight, time-varying coefficients and a
Levy-flight escape for stagnant particles.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np

from .errors import ConfigError
from .fragments import FragmentSet, OverlapMatrix, fitness
from .spv import spv_decode
from .stochastic import (
    RNG_ALGORITHM,
    ChaosMap,
    ChaosState,
    LevyConfig,
    RngStream,
    chaos_step,
    chaotic_inertia,
    levy_step,
    seed_chaos,
)


class Variant(enum.Enum):
    SPSO = "SPSO"
    SPSOI = "SPSOI"
    SPSODI = "SPSODI"
    APSO = "APSO"
    APSOI = "APSOI"
    APSODI = "APSODI"
    CPSOLF = "CPSOLF"


BASELINE_VARIANTS = tuple(v for v in Variant if v is not Variant.CPSOLF)
_APSO_FAMILY = (Variant.APSO, Variant.APSOI, Variant.APSODI)


@dataclass(frozen=True)
class VariantConfig:
    """Which update rule to run plus every schedule parameter.

    Coefficient endpoints express both regimes: time-varying schedules
    (cognitive falling, social rising) and constants (start == end). Position
    bounds matter only through SPV ranks, so the unit interval is the default
    search box; v_max and apso_alpha default to fractions of that span.
    """

    variant: Variant
    population: int = 10
    max_itr: int = 50
    c1_start: float = 2.0
    c1_end: float = 2.0
    c2_start: float = 2.0
    c2_end: float = 2.0
    w_const: float = 0.7
    w_hi: float = 0.9
    w_lo: float = 0.4
    max_stagnancy: int = 5
    levy: LevyConfig = field(default_factory=LevyConfig)
    position_range: tuple[float, float] = (0.0, 1.0)
    v_max: float = 0.5
    apso_alpha: float = 0.1
    apso_beta: float = 0.5

    def __post_init__(self) -> None:
        if self.population < 1:
            raise ConfigError(f"population must be >= 1, got {self.population}")
        if self.max_itr < 0:
            raise ConfigError(f"max_itr must be >= 0, got {self.max_itr}")
        for name in ("c1_start", "c1_end", "c2_start", "c2_end"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        if not self.w_lo < self.w_hi:
            raise ConfigError(f"w_lo < w_hi violated: {self.w_lo} >= {self.w_hi}")
        lo, hi = self.position_range
        if not lo < hi:
            raise ConfigError(f"position_range must have lo < hi, got {self.position_range}")
        if self.v_max <= 0:
            raise ConfigError(f"v_max must be > 0, got {self.v_max}")
        if self.apso_alpha <= 0:
            raise ConfigError(f"apso_alpha must be > 0, got {self.apso_alpha}")
        if not 0.0 < self.apso_beta < 1.0:
            raise ConfigError(f"apso_beta must be in (0, 1), got {self.apso_beta}")
        if self.max_stagnancy < 1:
            raise ConfigError(f"max_stagnancy must be >= 1, got {self.max_stagnancy}")
        if self.variant is Variant.CPSOLF:
            # schedules are linear, so checking both endpoints covers every t
            for c1, c2, where in (
                (self.c1_start, self.c2_start, "start"),
                (self.c1_end, self.c2_end, "end"),
            ):
                if c1 + c2 <= 4.0:
                    raise ConfigError(
                        f"constriction needs c1 + c2 > 4 at every iteration; "
                        f"{where} values sum to {c1 + c2}"
                    )

    def to_dict(self) -> dict[str, Any]:
        return {
            "variant": self.variant.value,
            "population": self.population,
            "max_itr": self.max_itr,
            "c1_start": self.c1_start,
            "c1_end": self.c1_end,
            "c2_start": self.c2_start,
            "c2_end": self.c2_end,
            "w_const": self.w_const,
            "w_hi": self.w_hi,
            "w_lo": self.w_lo,
            "max_stagnancy": self.max_stagnancy,
            "levy": {"lam": self.levy.lam, "step_scale": self.levy.step_scale},
            "position_range": list(self.position_range),
            "v_max": self.v_max,
            "apso_alpha": self.apso_alpha,
            "apso_beta": self.apso_beta,
            "rng_algorithm": RNG_ALGORITHM,
            "chaos_map": ChaosMap.MODIFIED_SINE.value if self.variant is Variant.CPSOLF else None,
        }


def default_config(variant: Variant | str, **overrides) -> VariantConfig:
    """Benchmark defaults per variant: time-varying coefficients (2.4 -> 1.7
    cognitive, 1.7 -> 2.4 social) for the chaotic variant, constant 2.0 for
    the rest; inertia 0.7 constant or 0.9 -> 0.4 linear where applicable."""
    if isinstance(variant, str):
        variant = Variant(variant)
    params: dict[str, Any] = {"variant": variant}
    if variant is Variant.CPSOLF:
        params.update(c1_start=2.4, c1_end=1.7, c2_start=1.7, c2_end=2.4)
    if "position_range" in overrides:
        lo, hi = overrides["position_range"]
        params.setdefault("v_max", 0.5 * (hi - lo))
        params.setdefault("apso_alpha", 0.1 * (hi - lo))
    params.update(overrides)
    return VariantConfig(**params)


@dataclass
class Particle:
    """Continuous position/velocity plus the personal-best bookkeeping."""

    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_fitness: int
    stagnancy: int = 0


@dataclass
class SwarmState:
    particles: list[Particle]
    gbest_position: np.ndarray
    gbest_fitness: int
    t: int
    chaos: ChaosState | None
    rng: RngStream


@dataclass(frozen=True)
class RunTrace:
    """Everything one optimization run produced, JSON-serializable."""

    variant: Variant
    seed: int
    config: VariantConfig
    gbest_per_iteration: list[int]
    best_permutation: list[int]
    best_fitness: int
    wall_ms: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "variant": self.variant.value,
            "seed": self.seed,
            "config": self.config.to_dict(),
            "gbest_per_iteration": self.gbest_per_iteration,
            "best_permutation": self.best_permutation,
            "best_fitness": self.best_fitness,
            "wall_ms": self.wall_ms,
        }


# ---------------------------------------------------------------------------
# update rules


def schedule_coefficients(cfg: VariantConfig, t: int) -> tuple[float, float]:
    """Linear cognitive/social coefficients at iteration t of cfg.max_itr."""
    if cfg.max_itr == 0:
        return cfg.c1_start, cfg.c2_start
    frac = t / cfg.max_itr
    c1 = cfg.c1_start + frac * (cfg.c1_end - cfg.c1_start)
    c2 = cfg.c2_start + frac * (cfg.c2_end - cfg.c2_start)
    return c1, c2


def constriction(c1_t: float, c2_t: float) -> float:
    """Constriction coefficient chi = 2 / (phi - 2 + sqrt(phi^2 - 4 phi))."""
    phi = c1_t + c2_t
    if phi <= 4.0:
        raise ConfigError(f"constriction requires c1 + c2 > 4, got {phi}")
    return 2.0 / (phi - 2.0 + math.sqrt(phi * phi - 4.0 * phi))


def velocity_update(
    cfg: VariantConfig,
    particle: Particle,
    gbest_position: np.ndarray,
    w_t: float,
    c1_t: float,
    c2_t: float,
    chi: float | None,
    rng: RngStream,
) -> np.ndarray:
    """New velocity for one particle under cfg.variant, clamped to +-v_max.

    The chaotic variant takes no per-dimension random factors; its stochastic
    drive is the chaotic inertia weight in w_t. The accelerated family pulls
    toward the global best only, with a uniform kick instead of a pbest term.
    """
    x = particle.position
    v = particle.velocity
    if cfg.variant is Variant.CPSOLF:
        assert chi is not None
        new_v = chi * w_t * v + c1_t * (particle.pbest_position - x) + c2_t * (gbest_position - x)
    elif cfg.variant in _APSO_FAMILY:
        r = np.asarray(rng.uniform(x.size))
        new_v = w_t * v + cfg.apso_alpha * (r - 0.5) + cfg.apso_beta * (gbest_position - x)
    else:
        r1 = np.asarray(rng.uniform(x.size))
        r2 = np.asarray(rng.uniform(x.size))
        new_v = (
            w_t * v
            + c1_t * r1 * (particle.pbest_position - x)
            + c2_t * r2 * (gbest_position - x)
        )
    return np.clip(new_v, -cfg.v_max, cfg.v_max)


def reflect(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Fold values back into [lo, hi] by reflection at the bounds.

    Reflection (not clamping) keeps components distinct, which keeps SPV ranks
    diverse; the fold form handles displacements larger than the box.
    """
    span = hi - lo
    y = np.mod(values - lo, 2.0 * span)
    return lo + np.minimum(y, 2.0 * span - y)


def position_update(particle: Particle, cfg: VariantConfig) -> np.ndarray:
    """x + v, reflected into the configured position range."""
    lo, hi = cfg.position_range
    return reflect(particle.position + particle.velocity, lo, hi)


def inertia_weight(
    cfg: VariantConfig, t: int, chaos: ChaosState | None, rng: RngStream
) -> tuple[float, ChaosState | None]:
    """Per-iteration inertia for the variant: 1, constant, linear, or chaotic."""
    if cfg.variant is Variant.CPSOLF:
        assert chaos is not None
        chaos, w = chaotic_inertia(chaos, rng)
        return w, chaos
    if cfg.variant in (Variant.SPSOI, Variant.APSOI):
        return cfg.w_const, chaos
    if cfg.variant in (Variant.SPSODI, Variant.APSODI):
        frac = t / cfg.max_itr if cfg.max_itr else 0.0
        return cfg.w_hi - frac * (cfg.w_hi - cfg.w_lo), chaos
    return 1.0, chaos


# ---------------------------------------------------------------------------
# initialization and the main loop


def _evaluate(position: np.ndarray, matrix: OverlapMatrix) -> int:
    return fitness(spv_decode(position), matrix)


def _fresh_particle(position: np.ndarray, score: int) -> Particle:
    return Particle(
        position=position,
        velocity=np.zeros_like(position),
        pbest_position=position.copy(),
        pbest_fitness=score,
    )


def _assemble_state(
    particles: list[Particle], chaos: ChaosState | None, rng: RngStream
) -> SwarmState:
    best = max(particles, key=lambda p: p.pbest_fitness)
    return SwarmState(
        particles=particles,
        gbest_position=best.pbest_position.copy(),
        gbest_fitness=best.pbest_fitness,
        t=0,
        chaos=chaos,
        rng=rng,
    )


def uniform_initialize(
    cfg: VariantConfig, matrix: OverlapMatrix, rng: RngStream
) -> SwarmState:
    """Uniform random placement inside the position range; zero velocities."""
    lo, hi = cfg.position_range
    d = matrix.dim
    particles = []
    for _ in range(cfg.population):
        x = lo + (hi - lo) * np.asarray(rng.uniform(d))
        particles.append(_fresh_particle(x, _evaluate(x, matrix)))
    return _assemble_state(particles, None, rng)


def chaotic_initialize(
    cfg: VariantConfig,
    fragments: FragmentSet,
    matrix: OverlapMatrix,
    chaos: ChaosState,
    rng: RngStream,
) -> SwarmState:
    """Chaotic placement followed by one greedy Levy refinement per particle.

    Position components come from successive modified-sine iterates mapped
    affinely onto the position range; a candidate at x + levy_step replaces x
    only when strictly fitter, so refinement never loses ground.
    """
    if cfg.variant is not Variant.CPSOLF:
        raise ConfigError("chaotic initialization belongs to the chaotic variant")
    lo, hi = cfg.position_range
    d = fragments.size
    positions = []
    for _ in range(cfg.population):
        comps = np.empty(d)
        for k in range(d):
            chaos, z = chaos_step(chaos, rng)
            comps[k] = lo + (hi - lo) * z
        positions.append(comps)

    particles = []
    for x in positions:
        score = _evaluate(x, matrix)
        candidate = reflect(x + levy_step(cfg.levy, rng, d), lo, hi)
        cand_score = _evaluate(candidate, matrix)
        if cand_score > score:
            x, score = candidate, cand_score
        particles.append(_fresh_particle(x, score))
    return _assemble_state(particles, chaos, rng)


def run(
    cfg: VariantConfig,
    fragments: FragmentSet,
    matrix: OverlapMatrix,
    seed: int,
    observer: Callable[[SwarmState], None] | None = None,
) -> RunTrace:
    """Execute one full optimization and return its trace.

    The gbest history has max_itr + 1 entries (index 0 is the initialized
    swarm). observer, when given, is called once after every iteration with
    the live state; it must not mutate it. Identical (cfg, fragments, matrix,
    seed) reproduce the trace bit for bit, wall time aside.
    """
    if fragments.size != matrix.dim:
        raise ConfigError(
            f"dimension mismatch: {fragments.size} fragments vs {matrix.dim} matrix rows"
        )
    if fragments.size < 2:
        raise ConfigError(f"need at least 2 fragments, got {fragments.size}")

    started = time.perf_counter()
    rng = RngStream(seed)
    if cfg.variant is Variant.CPSOLF:
        chaos = seed_chaos(rng)
        state = chaotic_initialize(cfg, fragments, matrix, chaos, rng)
    else:
        state = uniform_initialize(cfg, matrix, rng)

    trace = [state.gbest_fitness]
    for t in range(cfg.max_itr):
        w_t, state.chaos = inertia_weight(cfg, t, state.chaos, rng)
        c1_t, c2_t = schedule_coefficients(cfg, t)
        chi = constriction(c1_t, c2_t) if cfg.variant is Variant.CPSOLF else None

        for particle in state.particles:
            particle.velocity = velocity_update(
                cfg, particle, state.gbest_position, w_t, c1_t, c2_t, chi, rng
            )
            particle.position = position_update(particle, cfg)
            score = _evaluate(particle.position, matrix)
            if score > particle.pbest_fitness:
                particle.pbest_position = particle.position.copy()
                particle.pbest_fitness = score
                particle.stagnancy = 0
            else:
                particle.stagnancy += 1
            if particle.pbest_fitness > state.gbest_fitness:
                state.gbest_position = particle.pbest_position.copy()
                state.gbest_fitness = particle.pbest_fitness

        if cfg.variant is Variant.CPSOLF:
            lo, hi = cfg.position_range
            for particle in state.particles:
                if particle.stagnancy < cfg.max_stagnancy:
                    continue
                step = levy_step(cfg.levy, rng, fragments.size)
                particle.position = reflect(particle.position + step, lo, hi)
                particle.stagnancy = 0
                score = _evaluate(particle.position, matrix)
                if score > particle.pbest_fitness:
                    particle.pbest_position = particle.position.copy()
                    particle.pbest_fitness = score
                    if score > state.gbest_fitness:
                        state.gbest_position = particle.pbest_position.copy()
                        state.gbest_fitness = score

        state.t = t + 1
        trace.append(state.gbest_fitness)
        if observer is not None:
            observer(state)

    wall_ms = int(round((time.perf_counter() - started) * 1000.0))
    return RunTrace(
        variant=cfg.variant,
        seed=seed,
        config=cfg,
        gbest_per_iteration=trace,
        best_permutation=[int(i) for i in spv_decode(state.gbest_position)],
        best_fitness=state.gbest_fitness,
        wall_ms=wall_ms,
    )
