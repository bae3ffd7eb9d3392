"""Calibration probe: small seed grid over modes and maps, stats to stdout."""

import sys
import time

from novamaze.config import EngineConfig
from novamaze.engine import run_search
from novamaze.maze import get_map


def probe(map_name: str, mode: str, seeds, budget: int = 250000) -> None:
    cfg = EngineConfig()
    maze = get_map(map_name)
    solved_evals = []
    hidden = []
    n_solved = 0
    for seed in seeds:
        t0 = time.time()
        rec = run_search(mode, maze, cfg, budget=budget, seed=seed)
        wall = time.time() - t0
        if rec.solved:
            n_solved += 1
            solved_evals.append(rec.evaluations_used)
            hidden.append(rec.solution_hidden)
        print(f"  {map_name}/{mode} s{seed}: solved={rec.solved} "
              f"evals={rec.evaluations_used} hidden={rec.solution_hidden} "
              f"wall={wall:.1f}s", flush=True)
    n = len(list(seeds))
    mean_e = sum(solved_evals) / len(solved_evals) if solved_evals else float("nan")
    mean_h = sum(hidden) / len(hidden) if hidden else float("nan")
    print(f"{map_name}/{mode}: {n_solved}/{n} solved, "
          f"mean evals {mean_e:.0f}, mean hidden {mean_h:.2f}", flush=True)


if __name__ == "__main__":
    seeds = range(int(sys.argv[1]) if len(sys.argv) > 1 else 8)
    plan = sys.argv[2:] or ["medium/novelty", "medium/fitness",
                            "hard/novelty", "hard/fitness", "hard/waypoint"]
    for item in plan:
        map_name, mode = item.split("/")
        probe(map_name, mode, seeds)
