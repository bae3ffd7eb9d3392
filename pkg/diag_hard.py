"""Scratch diagnostic: how fitness cracks the hard map, where waypoint stalls."""
import sys
import math
import random
import numpy as np

from novamaze.config import EngineConfig
from novamaze.engine import SearchDriver, TopTracker, run_search, seed_pool
from novamaze.genome import Genome, InnovationContext
from novamaze.kernel import run_episode
from novamaze.maze import get_map
from novamaze.novelty import NoveltyArchive
from novamaze.sim import waypoint_fitness


def trace(genome_json, maze, config):
    genome = Genome.from_json(genome_json)
    buf = np.zeros((config.simulation.max_steps + 1, 5))
    n, solved, step = run_episode(genome, maze, config.simulation, buf)
    rows = buf[:n]
    length = float(np.sum(np.hypot(np.diff(rows[:, 0]), np.diff(rows[:, 1]))))
    return rows, solved, step, length


def describe(rows, maze):
    # y-extent inside each inter-divider column, plus crossing order
    xs, ys = rows[:, 0], rows[:, 1]
    cuts = [0, 46, 92, 138, 184, 230, 246, 276, 320]
    print("    column y-ranges:")
    for lo, hi in zip(cuts, cuts[1:]):
        mask = (xs >= lo) & (xs < hi)
        if mask.any():
            print(f"      x[{lo:3.0f},{hi:3.0f}): y {ys[mask].min():6.1f} "
                  f"to {ys[mask].max():6.1f}  ({mask.sum()} states)")
    # where did it cross each divider line
    for x_wall in (46, 92, 138, 184, 230, 246, 276):
        for i in range(1, len(xs)):
            if (xs[i - 1] < x_wall) != (xs[i] < x_wall):
                print(f"      crosses x={x_wall} at y={ys[i]:.1f} "
                      f"(step {i}, {'right' if xs[i] > xs[i-1] else 'LEFT'})")


def fitness_anatomy(seeds):
    maze = get_map("hard")
    config = EngineConfig()
    for seed in seeds:
        rec = run_search("fitness", maze, config, budget=250_000, seed=seed)
        print(f"fitness s{seed}: solved={rec.solved} evals={rec.evaluations_used}")
        if rec.solved:
            rows, ok, step, length = trace(rec.solution, maze, config)
            print(f"    replay solved={ok} steps={step} path={length:.0f} units")
            describe(rows, maze)
        sys.stdout.flush()


def waypoint_stall(seeds, budget=80_000):
    maze = get_map("hard")
    config = EngineConfig()
    for seed in seeds:
        rng = random.Random(seed)
        ctx = InnovationContext()
        driver = SearchDriver("waypoint", maze, config, ctx, rng)
        top = TopTracker(6)
        reason = driver.run(budget=budget, top=top, keep_trajectories=False)
        best = top.outcomes()
        print(f"waypoint s{seed}: {reason} evals={driver.evals} "
              f"best={[f'{o.score:.2f}' for o in best]}")
        print(f"    pins={[(round(o.behavior[0]), round(o.behavior[1])) for o in best]}")
        sys.stdout.flush()


if __name__ == "__main__":
    which = sys.argv[1] if len(sys.argv) > 1 else "both"
    if which in ("fitness", "both"):
        fitness_anatomy([1, 3])
    if which in ("waypoint", "both"):
        waypoint_stall([0, 2, 3])
