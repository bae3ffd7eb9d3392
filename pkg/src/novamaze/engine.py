"""Automated search: the fitness / novelty / waypoint modes, run records,
and the aggregate statistics used for mode comparisons.

One SearchDriver owns a generational loop over one maze. Selection pressure
depends on the mode; archival (when an archive is attached) is independent of
selection so an objective-driven search can still feed a behavior archive.
Budgets are evaluation-denominated and enforced to the single evaluation.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import EngineConfig, NeatConfig
from .genome import Genome, InnovationContext, clone_into_context, init_genome, mutate
from .maze import Behavior, MazeMap
from .novelty import NoveltyArchive, adjust_threshold, batch_sparseness, maybe_archive
from .population import Population
from .sim import EvalCounter, goal_distance_fitness, waypoint_fitness
from .kernel import run_episode

MODES = ("fitness", "novelty", "waypoint")

ProgressFn = Callable[[int], None]


class Outcome:
    """One evaluated genome: where it ended up and how."""

    __slots__ = ("genome", "behavior", "solved", "solve_step", "hidden",
                 "trajectory", "score", "novelty")

    def __init__(self, genome: Genome, behavior: Behavior, solved: bool,
                 solve_step: int, hidden: int, trajectory: np.ndarray | None) -> None:
        self.genome = genome
        self.behavior = behavior
        self.solved = solved
        self.solve_step = solve_step
        self.hidden = hidden
        self.trajectory = trajectory
        self.score = 0.0
        self.novelty: float | None = None


class TopTracker:
    """Running top-n outcomes by score, distinct by genome id, sorted desc.

    Re-offers of the same genome (elites get re-evaluated every round) keep
    only the best-scoring entry; ties resolve toward the earlier discovery.
    """

    def __init__(self, n: int) -> None:
        self.n = n
        self._best: dict[int, tuple[float, int, Outcome]] = {}
        self._seq = 0

    def offer(self, outcome: Outcome, score: float) -> None:
        self._seq += 1
        key = outcome.genome.id
        current = self._best.get(key)
        if current is not None and (score, -self._seq) <= current[:2]:
            return
        self._best[key] = (score, -self._seq, outcome)
        if len(self._best) > 2 * self.n:
            ranked = sorted(self._best.items(),
                            key=lambda kv: kv[1][:2], reverse=True)
            self._best = dict(ranked[: self.n])

    def outcomes(self) -> list[Outcome]:
        ranked = sorted(self._best.values(), key=lambda v: v[:2], reverse=True)
        return [outcome for _, _, outcome in ranked[: self.n]]


def seed_pool(
    seeds: Sequence[Genome],
    size: int,
    config: NeatConfig,
    ctx: InnovationContext,
    rng: random.Random,
) -> list[Genome]:
    """Pool built from user-selected genomes: originals verbatim, then one
    mutate pass per copy cycling through the seeds until the pool is full."""
    if not seeds:
        raise ValueError("seeds must be nonempty")
    pool = list(seeds[:size])
    i = 0
    while len(pool) < size:
        pool.append(mutate(seeds[i % len(seeds)], config, ctx, rng))
        i += 1
    return pool


class SearchDriver:
    """Generational search of one mode over one maze.

    The driver tracks every final position it produces, notices the first
    solving evaluation, and stops precisely on budget, per-call evaluation
    caps, stop signals, or a caller-provided predicate.
    """

    def __init__(
        self,
        mode: str,
        maze: MazeMap,
        config: EngineConfig,
        ctx: InnovationContext,
        rng: random.Random,
        counter: EvalCounter | None = None,
        archive: NoveltyArchive | None = None,
    ) -> None:
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
        if mode == "waypoint" and not maze.waypoints:
            raise ValueError("waypoint mode needs a map with waypoints")
        self.mode = mode
        self.maze = maze
        self.config = config
        self.ctx = ctx
        self.rng = rng
        self.counter = counter or EvalCounter()
        self.archive = archive
        self.evals = 0
        self.final_positions: list[tuple[float, float]] = []
        self.solved_outcome: Outcome | None = None
        self.first_solve_evals: int | None = None
        self.generations = 0
        self.population: Population | None = None
        sim = config.simulation
        self._buffer = np.empty((sim.max_steps + 1, 5), dtype=np.float64)
        self._solve_radius = sim.solve_radius

    def initial_population(self, seeds: Sequence[Genome] | None = None) -> list[Genome]:
        size = self.config.neat.population_size
        if seeds:
            return seed_pool(seeds, size, self.config.neat, self.ctx, self.rng)
        return [init_genome(self.config.neat, self.ctx, self.rng) for _ in range(size)]

    def evaluate_one(self, genome: Genome, keep_trajectory: bool = False) -> Outcome:
        n_states, solved, solve_step = run_episode(
            genome, self.maze, self.config.simulation, self._buffer
        )
        self.counter.tick()
        self.evals += 1
        x = float(self._buffer[n_states - 1, 0])
        y = float(self._buffer[n_states - 1, 1])
        behavior = Behavior(x, y)
        self.final_positions.append((x, y))
        trajectory = self._buffer[:n_states].copy() if keep_trajectory else None
        outcome = Outcome(genome, behavior, solved, solve_step,
                          genome.hidden_count(), trajectory)
        if solved and self.solved_outcome is None:
            if outcome.trajectory is None:
                outcome.trajectory = self._buffer[:n_states].copy()
            self.solved_outcome = outcome
            self.first_solve_evals = self.evals
        return outcome

    def _score_and_archive(self, outcomes: list[Outcome]) -> list[Outcome]:
        """Set per-outcome scores; archive behaviors when an archive is attached.

        Returns the outcomes that were newly archived (with novelty scores
        set), in evaluation order.
        """
        if not outcomes:
            return []
        if self.mode == "fitness":
            for o in outcomes:
                o.score = goal_distance_fitness(o.behavior, self.maze)
        elif self.mode == "waypoint":
            for o in outcomes:
                o.score = waypoint_fitness(o.trajectory, self.maze,
                                           self._solve_radius)
        archived: list[Outcome] = []
        if self.archive is not None:
            points = np.array([o.behavior for o in outcomes], dtype=np.float64)
            rhos = batch_sparseness(points, self.archive)
            for o, rho in zip(outcomes, rhos):
                o.novelty = float(rho)
                if self.mode == "novelty":
                    o.score = float(rho)
                if maybe_archive(o.behavior, float(rho), self.archive):
                    archived.append(o)
            while self.archive.evals_since_adjust >= self.archive.config.adjust_every:
                adjust_threshold(self.archive)
        elif self.mode == "novelty":
            raise ValueError("novelty mode requires an archive")
        return archived

    def run(
        self,
        *,
        budget: int,
        seeds: Sequence[Genome] | None = None,
        stop=None,
        progress: ProgressFn | None = None,
        eval_cap: int | None = None,
        keep_trajectories: bool = False,
        collect: list[Outcome] | None = None,
        top: TopTracker | None = None,
        done: Callable[[], bool] | None = None,
        stop_on_solve: bool = True,
    ) -> str:
        """Search until a terminal condition; returns the reason:
        'solved' | 'budget' | 'cap' | 'stopped' | 'done'.

        budget bounds this driver's lifetime evaluations; eval_cap bounds this
        call alone. collect receives newly archived outcomes; top tracks the
        best outcomes by current mode score; done() is polled between
        generations (used by callers that wait for a collection quota).
        """
        keep = keep_trajectories or top is not None or collect is not None \
            or self.mode == "waypoint"
        cap_start = self.evals
        if self.population is None:
            members = self.initial_population(seeds)
            self.population = Population(self.config.neat, self.ctx, self.rng, members)
        while True:
            allowed = budget - self.evals
            if eval_cap is not None:
                allowed = min(allowed, cap_start + eval_cap - self.evals)
            outcomes: list[Outcome] = []
            reason = None
            for genome in self.population.members:
                if stop is not None and stop.is_set():
                    reason = "stopped"
                    break
                if len(outcomes) >= allowed:
                    reason = "budget" if self.evals >= budget else "cap"
                    break
                outcome = self.evaluate_one(genome, keep_trajectory=keep)
                outcomes.append(outcome)
                if outcome.solved and stop_on_solve:
                    reason = "solved"
                    break
            archived = self._score_and_archive(outcomes)
            if collect is not None:
                collect.extend(archived)
            if top is not None:
                for o in outcomes:
                    top.offer(o, o.score)
            if not keep_trajectories:
                wanted = set(archived) if collect is not None else set()
                if top is not None:
                    wanted.update(top.outcomes())
                wanted.add(self.solved_outcome)
                for o in outcomes:
                    if o not in wanted:
                        o.trajectory = None
            if progress is not None:
                progress(self.evals)
            if reason is not None:
                return reason
            if done is not None and done():
                return "done"
            if self.evals >= budget:
                return "budget"
            if eval_cap is not None and self.evals - cap_start >= eval_cap:
                return "cap"
            scores = {o.genome.id: o.score for o in outcomes}
            self.population.advance(scores)
            self.generations += 1


def _as_engine_config(config: EngineConfig | NeatConfig | None) -> EngineConfig:
    if config is None:
        return EngineConfig()
    if isinstance(config, NeatConfig):
        merged = EngineConfig()
        merged.neat = config
        return merged
    return config


def run_search(
    mode: str,
    maze: MazeMap,
    config: EngineConfig | NeatConfig | None = None,
    *,
    seeds: Sequence[Genome] | None = None,
    budget: int = 250000,
    seed: int | None = None,
    rng: random.Random | None = None,
    stop_signal=None,
    progress: ProgressFn | None = None,
) -> "RunRecord":
    """One automated run: initialize, loop evaluate/score/reproduce, record.

    Terminates on first solution, budget exhaustion, or stop signal. The
    returned record carries every individual's final position and, for
    novelty mode, the archive contents.
    """
    config = _as_engine_config(config)
    config.validate()
    if budget < config.neat.population_size:
        raise ValueError("budget must cover at least one full population")
    if rng is None:
        rng = random.Random(seed)
    ctx = InnovationContext()
    if seeds:
        seeds = clone_into_context(seeds, ctx)
    archive = NoveltyArchive(config.novelty) if mode == "novelty" else None
    driver = SearchDriver(mode, maze, config, ctx, rng, archive=archive)
    started = time.perf_counter()
    driver.run(budget=budget, seeds=seeds, stop=stop_signal, progress=progress)
    wall = time.perf_counter() - started
    solved = driver.solved_outcome is not None
    return RunRecord(
        mode=mode,
        map_name=maze.name,
        seed=seed,
        budget=budget,
        evaluations_used=driver.evals,
        solved=solved,
        solution=driver.solved_outcome.genome.to_json() if solved else None,
        solution_hidden=driver.solved_outcome.hidden if solved else None,
        final_positions=driver.final_positions,
        wall_seconds=wall,
        events=None,
        archive=archive.to_json() if archive is not None else None,
        record_id=f"{mode}-{maze.name}-s{seed}" if seed is not None else f"{mode}-{maze.name}",
    )


@dataclass
class RunRecord:
    """Everything one run produced; serializable, deterministic modulo wall clock."""

    mode: str
    map_name: str
    seed: int | None
    budget: int
    evaluations_used: int
    solved: bool
    solution: dict | None
    solution_hidden: int | None
    final_positions: list[tuple[float, float]]
    wall_seconds: float
    events: list[dict] | None
    archive: dict | None
    record_id: str

    def to_json(self) -> dict:
        return {
            "record_id": self.record_id,
            "mode": self.mode,
            "map": self.map_name,
            "seed": self.seed,
            "budget": self.budget,
            "evaluations_used": self.evaluations_used,
            "solved": self.solved,
            "solution": self.solution,
            "solution_hidden": self.solution_hidden,
            "final_positions": [[x, y] for x, y in self.final_positions],
            "wall_seconds": self.wall_seconds,
            "events": self.events,
            "archive": self.archive,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RunRecord":
        return cls(
            mode=data["mode"],
            map_name=data["map"],
            seed=data["seed"],
            budget=data["budget"],
            evaluations_used=data["evaluations_used"],
            solved=data["solved"],
            solution=data["solution"],
            solution_hidden=data["solution_hidden"],
            final_positions=[(p[0], p[1]) for p in data["final_positions"]],
            wall_seconds=data["wall_seconds"],
            events=data["events"],
            archive=data["archive"],
            record_id=data["record_id"],
        )

    def fingerprint(self) -> bytes:
        """Canonical bytes with wall-clock fields stripped, for replay checks."""
        doc = self.to_json()
        doc.pop("wall_seconds", None)
        if doc.get("events"):
            doc["events"] = [
                {k: v for k, v in event.items() if k != "t"}
                for event in doc["events"]
            ]
        return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()

    def validate(self, maze: MazeMap | None = None,
                 config: EngineConfig | None = None) -> None:
        """Assert record invariants; with a maze, replay the solution genome."""
        if self.evaluations_used > self.budget:
            raise ValueError("evaluations_used exceeds budget")
        if self.evaluations_used < 0:
            raise ValueError("evaluations_used must be >= 0")
        if self.solved:
            if self.solution is None:
                raise ValueError("solved record lacks a solution genome")
            if maze is not None:
                from .sim import evaluate

                sim_config = (config or EngineConfig()).simulation
                genome = Genome.from_json(self.solution)
                result = evaluate(genome, maze, sim_config)
                if not result.trajectory.solved:
                    raise ValueError("solution genome does not replay to solved")


@dataclass
class AggregateStats:
    """Success-conditioned summary of a record batch."""

    runs: int
    successes: int
    mean_evals: float | None
    sd_evals: float | None
    mean_hidden: float | None
    sd_hidden: float | None
    mean_seconds: float

    def to_row(self) -> dict:
        return {
            "runs": self.runs,
            "successes": self.successes,
            "mean_evals": self.mean_evals,
            "sd_evals": self.sd_evals,
            "mean_hidden": self.mean_hidden,
            "sd_hidden": self.sd_hidden,
            "mean_seconds": self.mean_seconds,
        }


def _mean_sd(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def run_statistics(records: Sequence[RunRecord]) -> AggregateStats:
    """Aggregate a batch: evaluation stats over successes only, absent with
    zero successes (no comparison is possible then)."""
    if not records:
        raise ValueError("records must be nonempty")
    successes = [r for r in records if r.solved]
    mean_evals = sd_evals = mean_hidden = sd_hidden = None
    if successes:
        mean_evals, sd_evals = _mean_sd([r.evaluations_used for r in successes])
        hidden = [r.solution_hidden for r in successes if r.solution_hidden is not None]
        if hidden:
            mean_hidden, sd_hidden = _mean_sd(hidden)
    mean_seconds, _ = _mean_sd([r.wall_seconds for r in records])
    return AggregateStats(
        runs=len(records),
        successes=len(successes),
        mean_evals=mean_evals,
        sd_evals=sd_evals,
        mean_hidden=mean_hidden,
        sd_hidden=sd_hidden,
        mean_seconds=mean_seconds,
    )


def welch_t(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Welch's two-sample t statistic (unequal variances)."""
    if len(xs) < 2 or len(ys) < 2:
        raise ValueError("need at least two samples per group")
    mx, sx = _mean_sd(xs)
    my, sy = _mean_sd(ys)
    se = math.sqrt(sx * sx / len(xs) + sy * sy / len(ys))
    if se == 0.0:
        return 0.0 if mx == my else math.copysign(math.inf, mx - my)
    return (mx - my) / se
