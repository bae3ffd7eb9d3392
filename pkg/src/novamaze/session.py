"""Interactive evolution sessions: an on-screen population of n candidates,
user (or scripted) selection, and the Step / Novelty / Optimize operations
over one session-lifetime behavior archive and evaluation ledger.

A Session is synchronous and single-owner; the service layer wraps operations
in background workers and serializes them per session. Scripted selectors make
the whole protocol drivable headless, which is how the batch comparisons and
the determinism checks run it.
"""

from __future__ import annotations

import dataclasses
import json
import math
import random
import time
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import EngineConfig
from .engine import Outcome, RunRecord, SearchDriver, TopTracker
from .genome import Genome, InnovationContext, crossover, init_genome, mutate
from .kernel import run_episode
from .maze import Behavior, MazeMap, get_map
from .novelty import NoveltyArchive, adjust_threshold, maybe_archive, sparseness
from .sim import EvalCounter, waypoint_fitness

AWAITING = "awaiting-selection"
RUNNING_NOVELTY = "running-novelty"
RUNNING_OPTIMIZE = "running-optimize"
SOLVED = "solved"
BUDGET_EXHAUSTED = "budget-exhausted"

SELECTOR_POLICIES = ("random", "greedy-goal", "waypoint-oracle")

ProgressFn = Callable[[int], None]


class SessionError(ValueError):
    """Protocol violation: bad selection, wrong status, or budget shortfall."""


class Session:
    """One interactive run: screen, archive, ledger, and event log."""

    def __init__(
        self,
        config: EngineConfig,
        maze: MazeMap,
        rng: random.Random | None = None,
    ) -> None:
        config.validate()
        sc = config.session
        self.config = config
        self.session_config = sc
        self.maze = maze
        self.rng = rng if rng is not None else random.Random(sc.seed)
        self.ctx = InnovationContext()
        self.archive = NoveltyArchive(config.novelty)
        self.counter = EvalCounter()
        self.population: list[Outcome] = []
        self.selected: list[int] = []
        self.events: list[dict] = []
        self.final_positions: list[tuple[float, float]] = []
        self.restarts = 0
        self.publishes = 0
        self.status = AWAITING
        self.solution: Outcome | None = None
        self.first_solve_evals: int | None = None
        self._started = time.perf_counter()
        # Search operations run wider pools than the screen; same engine
        # settings otherwise.
        self._op_neat = dataclasses.replace(config.neat,
                                            population_size=sc.pool_size)
        self._op_config = dataclasses.replace(config, neat=self._op_neat)
        sim = config.simulation
        self._buffer = np.empty((sim.max_steps + 1, 5), dtype=np.float64)
        self._populate_screen()

    # -- bookkeeping ----------------------------------------------------

    @property
    def evaluations_used(self) -> int:
        return self.counter.count

    @property
    def budget_remaining(self) -> int:
        return self.session_config.budget - self.counter.count

    def screen_ids(self) -> list[int]:
        return [o.genome.id for o in self.population]

    def _log(self, op: str, ids: Sequence[int], before: int) -> None:
        self.events.append({
            "t": time.time(),
            "op": op,
            "ids": list(ids),
            "evals_before": before,
            "evals_after": self.counter.count,
        })

    def _note_solution(self, outcome: Outcome, evals_at_solve: int) -> None:
        if self.solution is None:
            self.solution = outcome
            self.first_solve_evals = evals_at_solve

    def _evaluate(self, genome: Genome) -> Outcome:
        n_states, solved, solve_step = run_episode(
            genome, self.maze, self.config.simulation, self._buffer
        )
        self.counter.tick()
        x = float(self._buffer[n_states - 1, 0])
        y = float(self._buffer[n_states - 1, 1])
        self.final_positions.append((x, y))
        outcome = Outcome(genome, Behavior(x, y), solved, solve_step,
                          genome.hidden_count(), self._buffer[:n_states].copy())
        if solved:
            self._note_solution(outcome, self.counter.count)
        return outcome

    def _score_and_archive(self, fresh: list[Outcome],
                           screen: list[Outcome]) -> None:
        """Novelty-score the fresh candidates against the full screen plus the
        archive (snapshot semantics: all scores computed before any of this
        batch is archived), then archive them in order."""
        reference = [o.behavior for o in screen]
        for o in fresh:
            o.novelty = sparseness(o.behavior, reference, self.archive)
        for o in fresh:
            maybe_archive(o.behavior, o.novelty, self.archive)
        while self.archive.evals_since_adjust >= self.archive.config.adjust_every:
            adjust_threshold(self.archive)

    def _populate_screen(self) -> None:
        n = self.session_config.screen_size
        if self.budget_remaining < n:
            raise SessionError("session budget cannot cover the initial screen")
        fresh = [self._evaluate(init_genome(self.config.neat, self.ctx, self.rng))
                 for _ in range(n)]
        self._score_and_archive(fresh, fresh)
        self.population = fresh
        self.selected = []
        self._refresh_terminal_status()

    def _refresh_terminal_status(self) -> None:
        if self.status != SOLVED and self.budget_remaining <= 0:
            self.status = BUDGET_EXHAUSTED
        elif self.status not in (SOLVED, BUDGET_EXHAUSTED):
            self.status = AWAITING

    def _selected_outcomes(self) -> list[Outcome]:
        chosen = set(self.selected)
        return [o for o in self.population if o.genome.id in chosen]

    def require_operable(self) -> None:
        if self.status != AWAITING:
            raise SessionError(f"operation requires status {AWAITING!r}, "
                               f"session is {self.status!r}")
        if not self.selected:
            raise SessionError("operation requires a nonempty selection")

    def _driver(self, mode: str) -> SearchDriver:
        return SearchDriver(mode, self.maze, self._op_config, self.ctx,
                            self.rng, counter=self.counter,
                            archive=self.archive)

    def _absorb(self, driver: SearchDriver) -> None:
        self.final_positions.extend(driver.final_positions)
        if driver.solved_outcome is not None and driver.first_solve_evals is not None:
            base = self.counter.count - driver.evals
            self._note_solution(driver.solved_outcome,
                                base + driver.first_solve_evals)

    # -- operations -----------------------------------------------------

    def select(self, ids: Iterable[int]) -> None:
        """Replace the selection; spends nothing, rejects unknown ids."""
        wanted = list(dict.fromkeys(int(i) for i in ids))
        if not wanted:
            raise SessionError("selection must be nonempty")
        on_screen = set(self.screen_ids())
        unknown = [i for i in wanted if i not in on_screen]
        if unknown:
            raise SessionError(f"ids not on screen: {unknown}")
        order = {gid: k for k, gid in enumerate(self.screen_ids())}
        before = self.counter.count
        self.selected = sorted(wanted, key=order.__getitem__)
        self._log("select", self.selected, before)

    def step_op(self) -> None:
        """One interactive generation: keep the selected candidates, fill the
        screen with their mutated offspring, score and archive the newcomers."""
        self.require_operable()
        n = self.session_config.screen_size
        if self.budget_remaining < n:
            raise SessionError("step needs budget for a full screen of offspring")
        before = self.counter.count
        used_ids = list(self.selected)
        parents = self._selected_outcomes()
        fresh: list[Outcome] = []
        for _ in range(n - len(parents)):
            if len(parents) >= 2:
                a, b = self.rng.sample(parents, 2)
                a_nov = a.novelty if a.novelty is not None else 0.0
                b_nov = b.novelty if b.novelty is not None else 0.0
                child = crossover(a.genome, b.genome, a_nov >= b_nov,
                                  self.ctx, self.rng,
                                  self.config.neat.disabled_inherit_prob)
            else:
                child = parents[0].genome
            child = mutate(child, self.config.neat, self.ctx, self.rng)
            fresh.append(self._evaluate(child))
        screen = parents + fresh
        self._score_and_archive(fresh, screen)
        self.population = screen
        self.selected = []
        self._log("step", used_ids, before)
        self._refresh_terminal_status()

    def novelty_op(self, progress: ProgressFn | None = None,
                   stop=None) -> None:
        """Archive-driven search from the selected genomes until the screen's
        worth of new archive entries is collected; the threshold decays at the
        per-invocation cap so a stalled search keeps moving."""
        self.require_operable()
        sc = self.session_config
        before = self.counter.count
        used_ids = list(self.selected)
        seeds = [o.genome for o in self._selected_outcomes()]
        self.status = RUNNING_NOVELTY
        driver = self._driver("novelty")
        collected: list[Outcome] = []
        goal = sc.screen_size
        adapter = (lambda _evals: progress(self.counter.count)) if progress else None
        try:
            while True:
                reason = driver.run(
                    budget=sc.budget - before,
                    seeds=seeds,
                    stop=stop,
                    progress=adapter,
                    eval_cap=sc.novelty_op_cap,
                    collect=collected,
                    done=lambda: len(collected) >= goal,
                    stop_on_solve=False,
                )
                if reason == "cap" and len(collected) < goal:
                    self.archive.force_decay()
                    continue
                break
        finally:
            self.status = AWAITING
            self._absorb(driver)
        if len(collected) >= goal:
            ranked = sorted(
                range(len(collected)),
                key=lambda i: (-(collected[i].novelty or 0.0), i),
            )
            self.population = [collected[i] for i in ranked[:goal]]
            self.selected = []
        self._log("novelty", used_ids, before)
        self._refresh_terminal_status()

    def optimize_op(self, progress: ProgressFn | None = None,
                    stop=None) -> None:
        """Goal-distance search from the selected genomes; the screen tracks
        the fittest distinct individuals found, and a solution ends the session."""
        self.require_operable()
        sc = self.session_config
        before = self.counter.count
        used_ids = list(self.selected)
        seeds = [o.genome for o in self._selected_outcomes()]
        self.status = RUNNING_OPTIMIZE
        driver = self._driver("fitness")
        top = TopTracker(sc.screen_size)
        adapter = (lambda _evals: progress(self.counter.count)) if progress else None
        try:
            driver.run(
                budget=sc.budget - before,
                seeds=seeds,
                stop=stop,
                progress=adapter,
                top=top,
            )
        finally:
            self.status = AWAITING
            self._absorb(driver)
        best = top.outcomes()
        if best:
            known = {o.genome.id for o in best}
            filler = [o for o in self.population if o.genome.id not in known]
            self.population = (best + filler)[: sc.screen_size]
            self.selected = []
        self._log("optimize", used_ids, before)
        if driver.solved_outcome is not None:
            self.status = SOLVED
        else:
            self._refresh_terminal_status()

    def restart(self) -> None:
        """Fresh random screen; archive, ledger, and event log carry over."""
        if self.status != AWAITING:
            raise SessionError(f"restart requires status {AWAITING!r}, "
                               f"session is {self.status!r}")
        n = self.session_config.screen_size
        if self.budget_remaining < n:
            raise SessionError("restart needs budget for a fresh screen")
        before = self.counter.count
        self._populate_screen()
        self.restarts += 1
        self._log("restart", [], before)

    def publish(self, store=None) -> RunRecord:
        """Snapshot the session as a run record; repeated publishes share
        content (modulo timing) under distinct record ids."""
        before = self.counter.count
        record_events = [dict(e) for e in self.events if e["op"] != "publish"]
        seed = self.session_config.seed
        record = RunRecord(
            mode="naiec",
            map_name=self.maze.name,
            seed=seed,
            budget=self.session_config.budget,
            evaluations_used=self.counter.count,
            solved=self.solution is not None,
            solution=self.solution.genome.to_json() if self.solution else None,
            solution_hidden=self.solution.hidden if self.solution else None,
            final_positions=list(self.final_positions),
            wall_seconds=time.perf_counter() - self._started,
            events=record_events,
            archive=self.archive.to_json(),
            record_id=f"naiec-{self.maze.name}-s{seed}-p{self.publishes + 1}",
        )
        if store is not None:
            store.save(record)
        self.publishes += 1
        self._log("publish", [], before)
        return record

    def events_jsonl(self) -> str:
        return "\n".join(json.dumps(e, sort_keys=True) for e in self.events)


def create_session(config: EngineConfig | None = None,
                   *, maps_dir=None,
                   rng: random.Random | None = None) -> Session:
    """Build a session from config: resolves the map by name and seeds the rng."""
    config = config if config is not None else EngineConfig()
    maze = get_map(config.session.map_name, directory=maps_dir)
    return Session(config, maze, rng=rng)


def scripted_select(policy: str, session: Session, rng: random.Random,
                    count: int = 2) -> list[int]:
    """Headless stand-in for a human: pick `count` screen candidates.

    random is a uniform subset; greedy-goal takes the smallest final distances
    to goal; waypoint-oracle (which sees the waypoints the agents never do)
    takes the highest ordered-progress scores. Ties keep screen order.
    """
    if policy not in SELECTOR_POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of "
                         f"{SELECTOR_POLICIES}")
    screen = session.population
    count = min(count, len(screen))
    if policy == "random":
        picked = rng.sample(range(len(screen)), count)
        return [screen[i].genome.id for i in sorted(picked)]
    if policy == "greedy-goal":
        gx, gy = session.maze.goal
        def key(i: int) -> tuple[float, int]:
            x, y = screen[i].behavior
            return (math.sqrt((x - gx) ** 2 + (y - gy) ** 2), i)
    else:
        def key(i: int) -> tuple[float, int]:
            score = waypoint_fitness(screen[i].trajectory, session.maze,
                                     session.config.simulation.solve_radius)
            return (-score, i)
    ranked = sorted(range(len(screen)), key=key)
    return [screen[i].genome.id for i in sorted(ranked[:count])]


def run_scripted_session(
    policy: str,
    maze: MazeMap,
    config: EngineConfig | None = None,
    *,
    seed: int | None = None,
    store=None,
    progress: ProgressFn | None = None,
    stop=None,
    optimize_within: float = 50.0,
    selection_count: int = 2,
) -> RunRecord:
    """Drive a full session with a scripted selector and a fixed policy:
    alternate Novelty and Step, switching to Optimize as soon as any on-screen
    candidate ends within `optimize_within` units of the goal."""
    config = config if config is not None else EngineConfig()
    if seed is not None:
        config = dataclasses.replace(
            config, session=dataclasses.replace(config.session, seed=seed))
    config = dataclasses.replace(
        config, session=dataclasses.replace(config.session,
                                            map_name=maze.name))
    session = Session(config, maze)
    gx, gy = maze.goal
    next_search = "novelty"
    while session.status == AWAITING:
        if stop is not None and stop.is_set():
            break
        ids = scripted_select(policy, session, session.rng, selection_count)
        session.select(ids)
        near = min(
            math.sqrt((o.behavior[0] - gx) ** 2 + (o.behavior[1] - gy) ** 2)
            for o in session.population
        )
        if near <= optimize_within:
            session.optimize_op(progress=progress, stop=stop)
        elif next_search == "novelty" or session.budget_remaining < config.session.screen_size:
            session.novelty_op(progress=progress, stop=stop)
            next_search = "step"
        else:
            session.step_op()
            next_search = "novelty"
    record = session.publish(store)
    return record
