"""Adversarial map probe: how easily do cheap policies crack a maze?

Classes probed:
  rand    3000 generation-zero genomes (uniform init weights)
  drift   1500 genomes after 1..30 mutation passes
  const   constant-control genomes (bias->outputs only), grid over weights
  follow  hand-built wall-follower P-controllers, both chiralities

Reports solves, closest-approach percentiles, and 10x10 cell coverage.
A map is acceptably hard when rand/const/follow show zero solves and
drift shows at most a stray one.
"""

import math
import random
import sys

from novamaze.config import NeatConfig, SimConfig
from novamaze.genome import (
    ConnectionGene, Genome, InnovationContext, NodeGene, init_genome, mutate,
)
from novamaze.maze import get_map
from novamaze.sim import evaluate

SIM = SimConfig()


def fixed_nodes():
    nodes = [NodeGene(0, "bias")]
    nodes += [NodeGene(i, "sensor") for i in range(1, 11)]
    nodes += [NodeGene(11, "output"), NodeGene(12, "output")]
    return tuple(nodes)


def weight_genome(links):
    conns = tuple(ConnectionGene(i + 1, src, dst, w, True)
                  for i, (src, dst, w) in enumerate(links))
    return Genome(1, fixed_nodes(), conns)


def run(genome, maze):
    res = evaluate(genome, maze)
    tr = res.trajectory
    gx, gy = maze.goal
    pos = tr.positions
    d = ((pos[:, 0] - gx) ** 2 + (pos[:, 1] - gy) ** 2) ** 0.5
    cells = set()
    w, h = maze.bounds
    for x, y in pos[::4]:
        cells.add((min(9, int(10 * x / w)), min(9, int(10 * y / h))))
    return tr.solved, float(d.min()), cells


def probe_class(name, genomes, maze):
    solves = 0
    mins = []
    cover = set()
    for g in genomes:
        solved, dmin, cells = run(g, maze)
        solves += solved
        mins.append(dmin)
        cover |= cells
    mins.sort()
    n = len(mins)
    pct = lambda p: mins[min(n - 1, int(p * n))]
    print(f"  {name:7s} n={n:5d} solves={solves:3d} "
          f"min={mins[0]:6.1f} p05={pct(0.05):6.1f} p25={pct(0.25):6.1f} "
          f"p50={pct(0.50):6.1f} coverage={len(cover)}/100")
    return solves


def rand_genomes(n, seed):
    rng = random.Random(seed)
    cfg = NeatConfig()
    out = []
    for _ in range(n):
        ctx = InnovationContext()
        out.append(init_genome(cfg, ctx, rng))
    return out


def drift_genomes(n, seed):
    rng = random.Random(seed)
    cfg = NeatConfig()
    out = []
    for _ in range(n):
        ctx = InnovationContext()
        g = init_genome(cfg, ctx, rng)
        for _ in range(rng.randint(1, 30)):
            g = mutate(g, cfg, ctx, rng)
        out.append(g)
    return out


def const_genomes():
    out = []
    for wt in [x / 5.0 for x in range(-10, 11)]:
        for wv in (0.5, 1.0, 2.0, 4.0, 8.0):
            out.append(weight_genome([(0, 11, wt), (0, 12, wv)]))
    return out


def follower_genomes():
    # turn = g*(left_diag - right_diag) + h*(left - right) + c  (bias units)
    # vel  = strong forward push
    out = []
    for g in (-4.0, -2.0, -1.0, 1.0, 2.0, 4.0):
        for h in (-2.0, -1.0, 0.0, 1.0, 2.0):
            for c in (-0.5, -0.25, 0.0, 0.25, 0.5):
                out.append(weight_genome([
                    (4, 11, g), (2, 11, -g),
                    (5, 11, h), (1, 11, -h),
                    (0, 11, c),
                    (0, 12, 4.0), (3, 12, 2.0),
                ]))
    return out


def main():
    maps = sys.argv[1:] or ["medium", "hard"]
    for name in maps:
        maze = get_map(name)
        print(f"{name}: bounds={maze.bounds} walls={len(maze.walls)}")
        probe_class("const", const_genomes(), maze)
        probe_class("follow", follower_genomes(), maze)
        probe_class("rand", rand_genomes(3000, 7), maze)
        probe_class("drift", drift_genomes(1500, 11), maze)


if __name__ == "__main__":
    main()
