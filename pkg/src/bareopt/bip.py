"""Multi-scale Gaussian sampler with barrier-penetration acceptance.

The optimizer runs a small population through sweeps of Gaussian moves at a
sampling scale sigma_s.  Improving moves are always taken; worsening moves
are taken with a probability that decays with the fitness gap, the jump
distance, and an annealed control parameter gamma.  Once the population has
collapsed below the current scale, the worst particle is replaced by the
population mean and the scale is divided down, restarting the cycle on a
finer grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .benchmarks import BudgetedObjective
from .records import ErrorTrace, Event, TrialOutcome, build_outcome

__all__ = [
    "BipConfig",
    "Particle",
    "BipState",
    "BipRun",
    "run_bip",
    "gaussian_step",
    "tunneling_probability",
    "accept_sample",
    "ground_state_reached",
    "mean_replace_worst",
    "anneal_gamma",
]

BOUNDS_POLICIES = ("clamp", "reflect", "resample")


@dataclass
class BipConfig:
    """Tuning knobs for the multi-scale sampler.

    ``amplitude_a`` scales the acceptance probability for worsening moves;
    zero disables them entirely and the sampler degenerates to greedy
    parallel descent.  ``success_threshold`` stops the run early once the
    best error reaches it; zero means run out the budget.  ``min_scale``
    stops the run once sigma_s is divided below it; zero disables that stop.
    ``mean_replace`` switches the population-collapse step at each scale
    transition, kept as a flag so its effect can be measured.
    """

    k: int = 15
    amplitude_a: float = 1.0
    anneal_tau: float = 1.0
    scale_divisor: float = 2.0
    min_scale: float = 0.0
    bounds_policy: str = "clamp"
    success_threshold: float = 1e-8
    seed: int = 0
    mean_replace: bool = True

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.amplitude_a < 0:
            raise ValueError("amplitude_a must be nonnegative")
        if self.anneal_tau <= 0:
            raise ValueError("anneal_tau must be positive")
        if self.scale_divisor <= 1:
            raise ValueError("scale_divisor must exceed 1")
        if self.min_scale < 0:
            raise ValueError("min_scale must be nonnegative")
        if self.bounds_policy not in BOUNDS_POLICIES:
            raise ValueError(f"bounds_policy must be one of {BOUNDS_POLICIES}")
        if self.success_threshold < 0:
            raise ValueError("success_threshold must be nonnegative")


@dataclass
class Particle:
    position: np.ndarray
    fitness: float


@dataclass
class BipState:
    """Snapshot of the run between sweeps."""

    particles: list[Particle]
    sigma_s: float
    gamma: float
    gamma0: float
    ac: int
    scale_index: int
    best_so_far: Particle


def _apply_bounds(xs, lower, upper, policy, rng, reference=None, sigma=None):
    """Fold candidate positions back into the box."""
    if lower is None or upper is None:
        return xs
    if policy == "clamp":
        return np.clip(xs, lower, upper)
    if policy == "reflect":
        span = upper - lower
        period = 2.0 * span
        with np.errstate(invalid="ignore"):
            y = np.where(period > 0, np.mod(xs - lower, period), 0.0)
            y = np.where(y > span, period - y, y)
        return lower + y
    # resample: redraw out-of-box coordinates around the reference point,
    # falling back to clamp after a bounded number of tries
    out = np.array(xs, dtype=float)
    for _ in range(100):
        bad = (out < lower) | (out > upper)
        if not bad.any():
            return out
        fresh = reference + sigma * rng.standard_normal(out.shape)
        out = np.where(bad, fresh, out)
    return np.clip(out, lower, upper)


def gaussian_step(x, sigma, rng, lower=None, upper=None, policy="clamp"):
    """Propose x + sigma * N(0, I) and fold the result back into the box.

    ``x`` may be one point of shape (n,) or a batch of shape (m, n); the
    proposal has the same shape.  With no bounds given the raw step is
    returned as-is.
    """
    if policy not in BOUNDS_POLICIES:
        raise ValueError(f"policy must be one of {BOUNDS_POLICIES}")
    x = np.asarray(x, dtype=float)
    step = x + sigma * rng.standard_normal(x.shape)
    return _apply_bounds(step, lower, upper, policy, rng, reference=x, sigma=sigma)


def tunneling_probability(delta_f, delta_x, gamma, amplitude_a=1.0):
    """Acceptance chance for a worsening move.

    min(1, A * exp(-delta_x * sqrt(delta_f) / gamma)) for delta_f >= 0.
    Broadcasts over array arguments.  Extreme gaps underflow to exactly 0.
    """
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma <= 0):
        raise ValueError("gamma must be positive")
    delta_f = np.asarray(delta_f, dtype=float)
    if np.any(delta_f < 0):
        raise ValueError("delta_f must be nonnegative for a tunneling decision")
    # a denormal gamma can overflow the quotient to inf; exp(-inf) = 0 is the
    # correct limit, so only the spurious warning needs suppressing
    with np.errstate(over="ignore"):
        exponent = -np.asarray(delta_x, dtype=float) * np.sqrt(delta_f) / gamma
        prob = np.minimum(1.0, amplitude_a * np.exp(exponent))
    if prob.ndim == 0:
        return float(prob)
    return prob


def accept_sample(current: Particle, candidate: Particle, gamma, config: BipConfig, rng):
    """Decide between the current particle and a candidate move.

    Returns (kept_particle, was_tunneling, probability_used).  Improving or
    equal candidates are always taken with probability 1.  Worsening
    candidates are taken with the tunneling probability; with amplitude zero
    they are rejected outright without consulting the generator.
    """
    delta_f = candidate.fitness - current.fitness
    if delta_f <= 0:
        return candidate, False, 1.0
    if config.amplitude_a == 0:
        return current, False, 0.0
    delta_x = float(np.linalg.norm(candidate.position - current.position))
    prob = tunneling_probability(delta_f, delta_x, gamma, config.amplitude_a)
    if rng.random() < prob:
        return candidate, True, prob
    return current, False, prob


def ground_state_reached(particles, sigma_s) -> bool:
    """True when the population spread has fallen below the sampling scale.

    The spread is the largest per-dimension sample standard deviation
    (n-1 normalization).  Accepts a list of particles or an array of
    positions with shape (k, n).
    """
    if len(particles) >= 1 and hasattr(particles[0], "position"):
        positions = np.stack([p.position for p in particles])
    else:
        positions = np.atleast_2d(np.asarray(particles, dtype=float))
    if positions.shape[0] < 2:
        raise ValueError("population spread needs at least 2 particles")
    sigma_k = float(positions.std(axis=0, ddof=1).max())
    return sigma_k < sigma_s


def mean_replace_worst(particles: list[Particle], objective) -> list[Particle]:
    """Replace the worst particle with the population mean (worst included).

    The mean is evaluated before the replacement, consuming one budget unit
    when ``objective`` is metered.  Ties for worst resolve to the lowest
    index.  Returns a new particle list.
    """
    if len(particles) < 2:
        raise ValueError("mean replacement needs at least 2 particles")
    positions = np.stack([p.position for p in particles])
    mean_x = positions.mean(axis=0)
    mean_f = objective.evaluate(mean_x)
    worst = int(np.argmax([p.fitness for p in particles]))
    out = list(particles)
    out[worst] = Particle(mean_x, mean_f)
    return out


def anneal_gamma(gamma0: float, ac: int, tau: float = 1.0) -> float:
    """Exponentially attenuated control parameter gamma0 * exp(-ac / tau)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    if ac < 0:
        raise ValueError("ac must be nonnegative")
    return float(gamma0) * math.exp(-ac / tau)


class BipRun:
    """One seeded run of the multi-scale sampler over a metered objective.

    ``step()`` advances a single population sweep (plus any scale transition
    it triggers) and returns False once the run has ended; ``run()`` drives
    the loop to completion and returns the TrialOutcome.  An optional
    ``callback`` receives an Event for every evaluation and scale change.
    """

    def __init__(
        self,
        objective: BudgetedObjective,
        config: BipConfig | None = None,
        *,
        callback=None,
        init_position=None,
    ):
        self.objective = objective
        self.config = config if config is not None else BipConfig()
        self.callback = callback
        spec = objective.spec
        self.lower = spec.lower_bound
        self.upper = spec.upper_bound
        self.span = spec.max_span
        self.rng = np.random.default_rng(self.config.seed)
        self.scale_index = 0
        self.sigma_s = self.span
        self.ac = 0
        self.gamma0 = self.sigma_s
        self.gamma = self.sigma_s
        self.best_position: np.ndarray | None = None
        self.best_fitness = math.inf
        self.trace = ErrorTrace(spec.optimum_value)
        self.finished = False
        k, n = self.config.k, spec.dim

        if init_position is not None:
            start = np.asarray(init_position, dtype=float)
            if start.shape != (n,):
                raise ValueError(f"init_position must have shape ({n},)")
            if np.any(start < self.lower) or np.any(start > self.upper):
                raise ValueError("init_position lies outside the box")
            self.positions = np.tile(start, (k, 1))
        else:
            self.positions = self.rng.uniform(self.lower, self.upper, size=(k, n))
        self.fitness = np.full(k, math.nan)

        m = min(k, objective.remaining)
        if m > 0:
            fs = objective.evaluate_many(self.positions[:m])
            self.fitness[:m] = fs
            self._note_best(self.positions[:m], fs)
            self.trace.extend(1, fs)
            if self.callback is not None:
                for i in range(m):
                    self._emit(
                        eval_index=i + 1,
                        particle=i,
                        kind="init",
                        delta_f=0.0,
                        delta_x=0.0,
                        probability=1.0,
                        position=self.positions[i],
                        fitness=float(fs[i]),
                    )
        if m < k:
            # Budget could not even cover initialization; report what we saw.
            self.finished = True
        elif self._success():
            self.finished = True

    # -- bookkeeping ----------------------------------------------------

    def _emit(self, *, eval_index, particle, kind, delta_f, delta_x, probability,
              position, fitness, gamma=None):
        self.callback(Event(
            eval_index=eval_index,
            particle=particle,
            kind=kind,
            delta_f=float(delta_f),
            delta_x=float(delta_x),
            gamma=float(self.gamma if gamma is None else gamma),
            sigma=float(self.sigma_s),
            probability=float(probability),
            position=None if position is None else np.array(position, dtype=float),
            fitness=float(fitness),
        ))

    def _note_best(self, xs, fs):
        j = int(np.argmin(fs))
        if fs[j] < self.best_fitness:
            self.best_fitness = float(fs[j])
            self.best_position = np.array(xs[j], dtype=float)

    def _best_error(self) -> float:
        return max(self.best_fitness - self.objective.spec.optimum_value, 0.0)

    def _success(self) -> bool:
        return self.best_position is not None and self._best_error() <= self.config.success_threshold

    @property
    def state(self) -> BipState:
        particles = [
            Particle(self.positions[i].copy(), float(self.fitness[i]))
            for i in range(self.config.k)
        ]
        best = Particle(
            None if self.best_position is None else self.best_position.copy(),
            self.best_fitness,
        )
        return BipState(
            particles=particles,
            sigma_s=self.sigma_s,
            gamma=self.gamma,
            gamma0=self.gamma0,
            ac=self.ac,
            scale_index=self.scale_index,
            best_so_far=best,
        )

    # -- main loop ------------------------------------------------------

    def step(self) -> bool:
        """Advance one population sweep; returns False once the run is over."""
        if self.finished:
            return False
        cfg = self.config
        k = cfg.k
        m = min(k, self.objective.remaining)
        if m == 0:
            self.finished = True
            return False

        first_index = self.objective.evals_used + 1
        current = self.positions[:m]
        candidates = gaussian_step(
            current, self.sigma_s, self.rng, self.lower, self.upper, cfg.bounds_policy
        )
        cand_f = self.objective.evaluate_many(candidates)
        delta_f = cand_f - self.fitness[:m]
        delta_x = np.linalg.norm(candidates - current, axis=1)

        accept = delta_f <= 0
        prob = np.where(accept, 1.0, 0.0)
        worse = ~accept
        # gamma underflows to exactly 0 on very long scales; the tunneling
        # probability limit is 0, so worse candidates are simply rejected
        if cfg.amplitude_a > 0 and self.gamma > 0 and worse.any():
            t = tunneling_probability(
                delta_f[worse], delta_x[worse], self.gamma, cfg.amplitude_a
            )
            draws = self.rng.random(int(worse.sum()))
            tunneled = draws < t
            prob[worse] = t
            accept_worse = np.zeros(m, dtype=bool)
            accept_worse[np.flatnonzero(worse)[tunneled]] = True
            accept = accept | accept_worse
        else:
            accept_worse = np.zeros(m, dtype=bool)

        if self.callback is not None:
            for i in range(m):
                if delta_f[i] <= 0:
                    kind = "accept-better"
                elif accept[i]:
                    kind = "accept-tunnel"
                else:
                    kind = "reject"
                self._emit(
                    eval_index=first_index + i,
                    particle=i,
                    kind=kind,
                    delta_f=delta_f[i],
                    delta_x=delta_x[i],
                    probability=prob[i],
                    position=candidates[i],
                    fitness=cand_f[i],
                )

        self.positions[:m][accept] = candidates[accept]
        self.fitness[:m][accept] = cand_f[accept]
        self._note_best(candidates, cand_f)
        self.trace.extend(first_index, cand_f)

        self.ac += 1
        self.gamma = anneal_gamma(self.gamma0, self.ac, cfg.anneal_tau)

        if self._success() or self.objective.remaining == 0:
            self.finished = True
            return False
        if m == k and ground_state_reached(self.positions, self.sigma_s):
            self._transition_scale()
        return not self.finished

    def _transition_scale(self):
        """Collapse step and scale division at the end of a scale."""
        cfg = self.config
        if cfg.mean_replace:
            # one metered evaluation; remaining >= 1 is guaranteed by step()
            mean_x = self.positions.mean(axis=0)
            eval_index = self.objective.evals_used + 1
            mean_f = self.objective.evaluate(mean_x)
            worst = int(np.argmax(self.fitness))
            if self.callback is not None:
                self._emit(
                    eval_index=eval_index,
                    particle=worst,
                    kind="mean-replace",
                    delta_f=mean_f - self.fitness[worst],
                    delta_x=float(np.linalg.norm(mean_x - self.positions[worst])),
                    probability=1.0,
                    position=mean_x,
                    fitness=mean_f,
                )
            self.positions[worst] = mean_x
            self.fitness[worst] = mean_f
            self._note_best(mean_x[None, :], np.array([mean_f]))
            self.trace.extend(eval_index, [mean_f])

        self.scale_index += 1
        self.sigma_s = self.span / cfg.scale_divisor ** self.scale_index
        self.ac = 0
        self.gamma0 = self.sigma_s
        self.gamma = self.sigma_s
        if self.callback is not None:
            self._emit(
                eval_index=self.objective.evals_used,
                particle=-1,
                kind="scale-halve",
                delta_f=0.0,
                delta_x=0.0,
                probability=1.0,
                position=None,
                fitness=math.nan,
            )
        if self._success() or self.objective.remaining == 0:
            self.finished = True
        elif cfg.min_scale > 0 and self.sigma_s < cfg.min_scale:
            self.finished = True

    def run(self) -> TrialOutcome:
        while self.step():
            pass
        return self.outcome()

    def outcome(self) -> TrialOutcome:
        spec = self.objective.spec
        return build_outcome(
            "bip",
            spec.name,
            spec.dim,
            self.config.seed,
            evals_used=self.objective.evals_used,
            best_position=self.best_position,
            best_fitness=self.best_fitness,
            optimum_value=spec.optimum_value,
            trace=self.trace,
            success_threshold=self.config.success_threshold,
        )


def run_bip(
    objective: BudgetedObjective,
    config: BipConfig | None = None,
    *,
    callback=None,
    init_position=None,
) -> TrialOutcome:
    """Run the multi-scale sampler to completion on a metered objective."""
    return BipRun(
        objective, config, callback=callback, init_position=init_position
    ).run()
