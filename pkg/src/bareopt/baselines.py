"""Parameter-light reference optimizers: BBPSO, BBFWA, and GBDE.

All three follow the same run protocol as the multi-scale sampler: a metered
objective, a seeded generator, best-so-far tracking with a bounded error
trace, and an optional per-evaluation event callback.  Sampling positions
are clamped to the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .benchmarks import BudgetedObjective
from .records import ErrorTrace, Event, TrialOutcome, build_outcome

__all__ = [
    "BbpsoConfig",
    "BbfwaConfig",
    "GbdeConfig",
    "BbpsoRun",
    "BbfwaRun",
    "GbdeRun",
    "run_bbpso",
    "run_bbfwa",
    "run_gbde",
]


@dataclass
class BbpsoConfig:
    """Bare-bones particle swarm: each particle resamples from a Gaussian
    spanned by its personal best and the global best."""

    np_: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.np_ < 2:
            raise ValueError("np_ must be at least 2")


@dataclass
class BbfwaConfig:
    """Bare-bones fireworks: uniform sparks in a shrinking/growing box around
    the single best position.  ``amp_init`` of None means the full box span."""

    np_: int = 300
    amp_init: float | None = None
    amp_grow: float = 1.2
    amp_shrink: float = 0.9
    amp_floor: float = float(np.finfo(float).eps)
    seed: int = 0

    def __post_init__(self):
        if self.np_ < 1:
            raise ValueError("np_ must be at least 1")
        if not (0 < self.amp_shrink < 1 < self.amp_grow):
            raise ValueError("need 0 < amp_shrink < 1 < amp_grow")
        if self.amp_floor <= 0:
            raise ValueError("amp_floor must be positive")
        if self.amp_init is not None and self.amp_init <= 0:
            raise ValueError("amp_init must be positive")


@dataclass
class GbdeConfig:
    """Gaussian bare-bones differential evolution: mutation samples between
    the best and the parent, with binomial crossover at a per-individual
    crossover rate drawn from N(cr_mean, cr_std) clipped to [0, 1]."""

    np_: int = 100
    cr_mean: float = 0.5
    cr_std: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.np_ < 4:
            raise ValueError("np_ must be at least 4")
        if self.cr_std < 0:
            raise ValueError("cr_std must be nonnegative")


def _clamped_cr(rng, m, mean, std):
    """Per-individual crossover rates, clipped into [0, 1]."""
    return np.clip(rng.normal(mean, std, size=m), 0.0, 1.0)


class _BaselineRun:
    """Shared run scaffolding: budget, best tracking, trace, events."""

    algorithm = ""

    def __init__(self, objective: BudgetedObjective, seed: int,
                 success_threshold: float, callback):
        if success_threshold < 0:
            raise ValueError("success_threshold must be nonnegative")
        self.objective = objective
        self.seed = seed
        self.success_threshold = success_threshold
        self.callback = callback
        self.rng = np.random.default_rng(seed)
        spec = objective.spec
        self.lower = spec.lower_bound
        self.upper = spec.upper_bound
        self.best_position: np.ndarray | None = None
        self.best_fitness = math.inf
        self.trace = ErrorTrace(spec.optimum_value)
        self.finished = False

    def _emit(self, eval_index, particle, kind, delta_f, delta_x, probability,
              position, fitness):
        self.callback(Event(
            eval_index=eval_index,
            particle=particle,
            kind=kind,
            delta_f=float(delta_f),
            delta_x=float(delta_x),
            gamma=math.nan,
            sigma=math.nan,
            probability=float(probability),
            position=np.array(position, dtype=float),
            fitness=float(fitness),
        ))

    def _note_best(self, xs, fs):
        j = int(np.argmin(fs))
        if fs[j] < self.best_fitness:
            self.best_fitness = float(fs[j])
            self.best_position = np.array(xs[j], dtype=float)

    def _success(self) -> bool:
        if self.best_position is None:
            return False
        err = max(self.best_fitness - self.objective.spec.optimum_value, 0.0)
        return err <= self.success_threshold

    def _check_stop(self):
        if self._success() or self.objective.remaining == 0:
            self.finished = True

    def _init_population(self, count):
        """Uniform initial population; returns (positions, fitness, full)."""
        n = self.objective.spec.dim
        positions = self.rng.uniform(self.lower, self.upper, size=(count, n))
        fitness = np.full(count, math.nan)
        m = min(count, self.objective.remaining)
        if m > 0:
            fs = self.objective.evaluate_many(positions[:m])
            fitness[:m] = fs
            self._note_best(positions[:m], fs)
            self.trace.extend(1, fs)
            if self.callback is not None:
                for i in range(m):
                    self._emit(i + 1, i, "init", 0.0, 0.0, 1.0,
                               positions[i], fs[i])
        return positions, fitness, m == count

    def step(self) -> bool:
        raise NotImplementedError

    def run(self) -> TrialOutcome:
        while self.step():
            pass
        return self.outcome()

    def outcome(self) -> TrialOutcome:
        spec = self.objective.spec
        return build_outcome(
            self.algorithm,
            spec.name,
            spec.dim,
            self.seed,
            evals_used=self.objective.evals_used,
            best_position=self.best_position,
            best_fitness=self.best_fitness,
            optimum_value=spec.optimum_value,
            trace=self.trace,
            success_threshold=self.success_threshold,
        )


class BbpsoRun(_BaselineRun):
    algorithm = "bbpso"

    def __init__(self, objective, config: BbpsoConfig | None = None, *,
                 success_threshold: float = 1e-8, callback=None):
        self.config = config if config is not None else BbpsoConfig()
        super().__init__(objective, self.config.seed, success_threshold, callback)
        self.positions, fitness, full = self._init_population(self.config.np_)
        self.pbest = self.positions.copy()
        self.pbest_f = fitness.copy()
        if not full:
            self.finished = True
            return
        g = int(np.argmin(self.pbest_f))
        self.gbest = self.pbest[g].copy()
        self.gbest_f = float(self.pbest_f[g])
        self._check_stop()

    def step(self) -> bool:
        if self.finished:
            return False
        m = min(self.config.np_, self.objective.remaining)
        if m == 0:
            self.finished = True
            return False
        first = self.objective.evals_used + 1
        mid = 0.5 * (self.pbest[:m] + self.gbest)
        sd = np.abs(self.pbest[:m] - self.gbest)
        samples = np.clip(self.rng.normal(mid, sd), self.lower, self.upper)
        fs = self.objective.evaluate_many(samples)
        improved = fs < self.pbest_f[:m]
        if self.callback is not None:
            for i in range(m):
                self._emit(
                    first + i, i,
                    "accept-better" if improved[i] else "reject",
                    fs[i] - self.pbest_f[i],
                    float(np.linalg.norm(samples[i] - self.pbest[i])),
                    1.0 if improved[i] else 0.0,
                    samples[i], fs[i],
                )
        self.positions[:m] = samples
        self.pbest[:m][improved] = samples[improved]
        self.pbest_f[:m][improved] = fs[improved]
        g = int(np.argmin(self.pbest_f))
        if self.pbest_f[g] < self.gbest_f:
            self.gbest = self.pbest[g].copy()
            self.gbest_f = float(self.pbest_f[g])
        self._note_best(samples, fs)
        self.trace.extend(first, fs)
        self._check_stop()
        return not self.finished


class BbfwaRun(_BaselineRun):
    algorithm = "bbfwa"

    def __init__(self, objective, config: BbfwaConfig | None = None, *,
                 success_threshold: float = 1e-8, callback=None):
        self.config = config if config is not None else BbfwaConfig()
        super().__init__(objective, self.config.seed, success_threshold, callback)
        spec = objective.spec
        self.span = spec.span.astype(float)
        if self.config.amp_init is None:
            self.amplitude = self.span.copy()
        else:
            self.amplitude = np.full(spec.dim, float(self.config.amp_init))
        if objective.remaining == 0:
            self.finished = True
            return
        self.center = self.rng.uniform(self.lower, self.upper)
        self.center_f = objective.evaluate(self.center)
        self._note_best(self.center[None, :], np.array([self.center_f]))
        self.trace.extend(1, [self.center_f])
        if self.callback is not None:
            self._emit(1, 0, "init", 0.0, 0.0, 1.0, self.center, self.center_f)
        self._check_stop()

    def step(self) -> bool:
        if self.finished:
            return False
        cfg = self.config
        m = min(cfg.np_, self.objective.remaining)
        if m == 0:
            self.finished = True
            return False
        first = self.objective.evals_used + 1
        n = self.objective.spec.dim
        sparks = self.center + self.rng.uniform(-self.amplitude, self.amplitude,
                                                size=(m, n))
        sparks = np.clip(sparks, self.lower, self.upper)
        fs = self.objective.evaluate_many(sparks)
        j = int(np.argmin(fs))
        improved = fs[j] < self.center_f
        if self.callback is not None:
            for i in range(m):
                taken = improved and i == j
                self._emit(
                    first + i, 0,
                    "accept-better" if taken else "reject",
                    fs[i] - self.center_f,
                    float(np.linalg.norm(sparks[i] - self.center)),
                    1.0 if taken else 0.0,
                    sparks[i], fs[i],
                )
        if improved:
            self.center = sparks[j].copy()
            self.center_f = float(fs[j])
            self.amplitude = self.amplitude * cfg.amp_grow
        else:
            # a tie counts as no improvement
            self.amplitude = self.amplitude * cfg.amp_shrink
        self.amplitude = np.clip(self.amplitude, cfg.amp_floor, self.span)
        self._note_best(sparks, fs)
        self.trace.extend(first, fs)
        self._check_stop()
        return not self.finished


class GbdeRun(_BaselineRun):
    algorithm = "gbde"

    def __init__(self, objective, config: GbdeConfig | None = None, *,
                 success_threshold: float = 1e-8, callback=None):
        self.config = config if config is not None else GbdeConfig()
        super().__init__(objective, self.config.seed, success_threshold, callback)
        self.positions, self.fitness, full = self._init_population(self.config.np_)
        if not full:
            self.finished = True
            return
        self._check_stop()

    def step(self) -> bool:
        if self.finished:
            return False
        cfg = self.config
        m = min(cfg.np_, self.objective.remaining)
        if m == 0:
            self.finished = True
            return False
        first = self.objective.evals_used + 1
        n = self.objective.spec.dim
        b = int(np.argmin(self.fitness))
        best = self.positions[b]

        mid = 0.5 * (best + self.positions[:m])
        sd = np.abs(best - self.positions[:m])
        mutants = np.clip(self.rng.normal(mid, sd), self.lower, self.upper)
        cr = _clamped_cr(self.rng, m, cfg.cr_mean, cfg.cr_std)
        jrand = self.rng.integers(0, n, size=m)
        cross = self.rng.random((m, n)) < cr[:, None]
        cross[np.arange(m), jrand] = True
        trials = np.where(cross, mutants, self.positions[:m])
        fs = self.objective.evaluate_many(trials)
        selected = fs <= self.fitness[:m]
        if self.callback is not None:
            for i in range(m):
                self._emit(
                    first + i, i,
                    "accept-better" if selected[i] else "reject",
                    fs[i] - self.fitness[i],
                    float(np.linalg.norm(trials[i] - self.positions[i])),
                    1.0 if selected[i] else 0.0,
                    trials[i], fs[i],
                )
        self.positions[:m][selected] = trials[selected]
        self.fitness[:m][selected] = fs[selected]
        self._note_best(trials, fs)
        self.trace.extend(first, fs)
        self._check_stop()
        return not self.finished


def run_bbpso(objective, config=None, *, success_threshold=1e-8, callback=None):
    """Run bare-bones PSO to completion on a metered objective."""
    return BbpsoRun(objective, config, success_threshold=success_threshold,
                    callback=callback).run()


def run_bbfwa(objective, config=None, *, success_threshold=1e-8, callback=None):
    """Run bare-bones fireworks to completion on a metered objective."""
    return BbfwaRun(objective, config, success_threshold=success_threshold,
                    callback=callback).run()


def run_gbde(objective, config=None, *, success_threshold=1e-8, callback=None):
    """Run Gaussian bare-bones DE to completion on a metered objective."""
    return GbdeRun(objective, config, success_threshold=success_threshold,
                   callback=callback).run()
