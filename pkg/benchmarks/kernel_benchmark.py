"""Throughput comparison of the compiled episode kernel against the
pure-Python reference, plus an end-to-end search timing.

Run:  python3 benchmarks/kernel_benchmark.py [n_episodes]
"""

import random
import sys
import time

import numpy as np

from novamaze.config import NeatConfig, SimConfig
from novamaze.engine import run_search
from novamaze.genome import InnovationContext, init_genome, mutate
from novamaze.kernel import KERNEL_KIND, run_episode
from novamaze.maze import get_map


def genome_pool(n, seed=0):
    cfg = NeatConfig()
    ctx = InnovationContext()
    rng = random.Random(seed)
    pool = [init_genome(cfg, ctx, rng)]
    while len(pool) < n:
        pool.append(mutate(pool[rng.randrange(len(pool))], cfg, ctx, rng))
    return pool


def time_episodes(pool, maze, config, force_python):
    buffer = np.empty((config.max_steps + 1, 5), dtype=np.float64)
    started = time.perf_counter()
    steps = 0
    for genome in pool:
        n_states, _, _ = run_episode(genome, maze, config, buffer,
                                     force_python=force_python)
        steps += n_states - 1
    elapsed = time.perf_counter() - started
    return elapsed, steps


def main() -> int:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 300
    config = SimConfig()
    pool = genome_pool(n, seed=7)
    print(f"active kernel: {KERNEL_KIND}")
    print(f"{n} episodes per map, identical genome pool on both paths\n")
    header = f"{'map':<8} {'compiled':>12} {'pure':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for map_name in ("open", "medium", "hard"):
        maze = get_map(map_name)
        fast, steps = time_episodes(pool, maze, config, force_python=False)
        slow, _ = time_episodes(pool, maze, config, force_python=True)
        rate_fast = steps / fast
        rate_slow = steps / slow
        note = "" if KERNEL_KIND == "compiled" else "  (same path)"
        print(f"{map_name:<8} {rate_fast:>9.0f}/s {rate_slow:>9.0f}/s "
              f"{slow / fast:>8.1f}x{note}")
    print("\nfull novelty search, medium map, 5000 evaluation budget:")
    started = time.perf_counter()
    record = run_search("novelty", get_map("medium"), budget=5000, seed=0)
    elapsed = time.perf_counter() - started
    print(f"  {record.evaluations_used} evaluations in {elapsed:.2f}s "
          f"({record.evaluations_used / elapsed:.0f} evals/s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
