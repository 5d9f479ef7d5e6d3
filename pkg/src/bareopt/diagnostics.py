"""Run diagnostics: trajectory logs, position density, transmission traces.

These tools exist to look inside a run: where the particles actually went,
how often worsening moves got through, and what the population was worth at
the end.  They are first-class for the multi-scale sampler; the baselines
emit the same event stream in a reduced vocabulary (init, accept-better,
reject), so the log utilities still apply.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .benchmarks import BudgetedObjective, ObjectiveSpec, get_objective
from .bip import BipConfig
from .harness import run_single
from .records import ACCEPTED_KINDS, Event, TrialOutcome

__all__ = [
    "TrajectoryLog",
    "WaveHistogram",
    "record_run",
    "wave_modulus",
    "transmission_trace",
    "expected_solution_value",
    "replay_best",
    "export_events_csv",
    "export_histogram_json",
    "export_trace_json",
    "diagnostics_basename",
]


@dataclass
class TrajectoryLog:
    """Complete event stream of one run plus enough metadata to interpret it.

    ``amplitude`` is the worsening-move amplitude the run used (0 for
    algorithms without tunneling), needed to tell a tunneling-disabled run
    apart from one whose probabilities merely underflowed.
    """

    algorithm: str
    function: str
    dim: int
    seed: int
    lower_bound: np.ndarray
    upper_bound: np.ndarray
    optimum_value: float
    amplitude: float
    events: list[Event] = field(default_factory=list)

    def positions(self, kinds=ACCEPTED_KINDS) -> np.ndarray:
        """Stacked positions of the given event kinds, shape (m, dim)."""
        rows = [e.position for e in self.events
                if e.kind in kinds and e.position is not None]
        if not rows:
            return np.empty((0, self.dim))
        return np.stack(rows)

    def final_population(self) -> dict[int, Event]:
        """Last position-defining event per particle index."""
        latest: dict[int, Event] = {}
        for e in self.events:
            if e.kind in ACCEPTED_KINDS and e.particle >= 0:
                latest[e.particle] = e
        return latest


def record_run(
    algorithm: str,
    function: str,
    dim: int,
    *,
    max_fes: int,
    seed: int,
    success_threshold: float = 0.0,
    overrides: dict | None = None,
    init_position=None,
) -> tuple[TrialOutcome, TrajectoryLog]:
    """Run one trial with an event collector attached.

    Defaults to success_threshold 0 so the full budget is observed, which is
    usually what a diagnostic run wants.
    """
    spec = get_objective(function, dim)
    if algorithm == "bip":
        amplitude = float((overrides or {}).get("amplitude_a", BipConfig().amplitude_a))
    else:
        amplitude = 0.0
    log = TrajectoryLog(
        algorithm=algorithm,
        function=function,
        dim=dim,
        seed=seed,
        lower_bound=spec.lower_bound,
        upper_bound=spec.upper_bound,
        optimum_value=spec.optimum_value,
        amplitude=amplitude,
    )
    outcome = run_single(
        algorithm, function, dim,
        max_fes=max_fes, seed=seed, success_threshold=success_threshold,
        overrides=overrides, init_position=init_position,
        callback=log.events.append,
    )
    return outcome, log


@dataclass
class WaveHistogram:
    """Position density over the box.

    For dim <= 2 the counts form a joint grid; above that each row of
    ``counts`` is an independent per-dimension marginal.  ``normalized``
    scales counts so each (joint or marginal) density integrates to 1.
    """

    edges: list[np.ndarray]
    counts: np.ndarray
    normalized: np.ndarray
    marginal: bool

    def mode_cell(self) -> tuple[int, ...]:
        """Grid index of the densest cell (joint histograms only)."""
        if self.marginal:
            raise ValueError("mode_cell is defined for joint histograms only")
        return tuple(int(i) for i in
                     np.unravel_index(int(np.argmax(self.counts)), self.counts.shape))

    def cell_bounds(self, cell) -> list[tuple[float, float]]:
        if self.marginal:
            raise ValueError("cell_bounds is defined for joint histograms only")
        return [(float(self.edges[d][i]), float(self.edges[d][i + 1]))
                for d, i in enumerate(cell)]

    def cell_contains(self, cell, point) -> bool:
        """True when the point lies inside the cell (edges inclusive)."""
        point = np.asarray(point, dtype=float)
        return all(lo <= point[d] <= hi
                   for d, (lo, hi) in enumerate(self.cell_bounds(cell)))


def wave_modulus(log: TrajectoryLog, bins_per_dim: int = 50) -> WaveHistogram:
    """Histogram of accepted particle positions over the box.

    Counts every position a particle actually held (initialization,
    accepted moves, mean replacements); rejected candidates are excluded.
    """
    if bins_per_dim < 1:
        raise ValueError("bins_per_dim must be at least 1")
    points = log.positions()
    if points.shape[0] == 0:
        raise ValueError("log holds no accepted positions")
    box = list(zip(log.lower_bound, log.upper_bound))
    if log.dim <= 2:
        counts, edges = np.histogramdd(points, bins=bins_per_dim, range=box)
        widths = [e[1] - e[0] for e in edges]
        volume = float(np.prod(widths))
        normalized = counts / (counts.sum() * volume)
        return WaveHistogram(edges=list(edges), counts=counts,
                             normalized=normalized, marginal=False)
    counts = np.empty((log.dim, bins_per_dim))
    normalized = np.empty((log.dim, bins_per_dim))
    edges = []
    for d in range(log.dim):
        c, e = np.histogram(points[:, d], bins=bins_per_dim, range=box[d])
        counts[d] = c
        normalized[d] = c / (c.sum() * (e[1] - e[0]))
        edges.append(e)
    return WaveHistogram(edges=edges, counts=counts,
                         normalized=normalized, marginal=True)


def transmission_trace(log: TrajectoryLog) -> list[tuple[int, float]]:
    """Probabilities of all tunneling decisions in evaluation order.

    Includes both accepted and rejected decisions.  A run with tunneling
    disabled (amplitude 0) never makes such a decision, so its trace is
    empty even though its rejections are logged.
    """
    if log.amplitude == 0:
        return []
    return [(e.eval_index, e.probability) for e in log.events
            if e.kind in ("accept-tunnel", "reject")]


def expected_solution_value(log: TrajectoryLog, objective=None) -> float:
    """Mean fitness of the final population snapshot.

    Uses the logged fitness values; pass the objective (spec or metered) to
    re-evaluate the final positions instead, which must agree.
    """
    final = log.final_population()
    if not final:
        raise ValueError("log holds no population")
    if objective is None:
        return float(np.mean([e.fitness for e in final.values()]))
    spec = objective.spec if isinstance(objective, BudgetedObjective) else objective
    if not isinstance(spec, ObjectiveSpec):
        raise TypeError("objective must be an ObjectiveSpec or BudgetedObjective")
    positions = np.stack([e.position for e in final.values()])
    return float(np.mean(spec.evaluate_many(positions)))


def replay_best(log: TrajectoryLog) -> list[tuple[int, float]]:
    """Best-so-far fitness after every evaluation, reconstructed from the log.

    Covers every evaluated point, including rejected candidates (which can
    never beat the incumbent, but belong to the evaluation count).
    """
    out = []
    best = math.inf
    for e in log.events:
        if e.kind == "scale-halve":
            continue
        if e.fitness < best:
            best = e.fitness
        out.append((e.eval_index, best))
    return out


# --- exports ------------------------------------------------------------------


def diagnostics_basename(algorithm: str, function: str, dim: int, seed: int) -> str:
    return f"{algorithm}_{function}_{dim}d_seed{seed}"


def export_events_csv(log: TrajectoryLog, path) -> None:
    """Write the event stream as CSV, one row per event."""
    path = Path(path)
    pos_cols = [f"pos_{d}" for d in range(log.dim)]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "evaluation_index", "particle_index", "event", "delta_f", "delta_x",
            "gamma", "sigma", "probability_used", "fitness", *pos_cols,
        ])
        for e in log.events:
            pos = [""] * log.dim if e.position is None else [str(v) for v in e.position]
            writer.writerow([
                e.eval_index, e.particle, e.kind, str(e.delta_f), str(e.delta_x),
                str(e.gamma), str(e.sigma), str(e.probability), str(e.fitness), *pos,
            ])


def export_histogram_json(hist: WaveHistogram, path, meta: dict | None = None) -> None:
    payload = {
        "marginal": hist.marginal,
        "edges": [e.tolist() for e in hist.edges],
        "counts": hist.counts.tolist(),
        "normalized": hist.normalized.tolist(),
    }
    if meta:
        payload.update(meta)
    Path(path).write_text(json.dumps(payload))


def export_trace_json(trace: list[tuple[int, float]], path,
                      meta: dict | None = None) -> None:
    payload = {"trace": [[int(i), float(p)] for i, p in trace]}
    if meta:
        payload.update(meta)
    Path(path).write_text(json.dumps(payload))
