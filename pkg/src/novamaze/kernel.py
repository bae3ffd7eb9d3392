"""Episode kernel selection.

The compiled extension is used when importable; otherwise the pure-Python
reference in sim.py runs. Both produce bit-identical trajectories (asserted
by the parity tests), so the choice affects speed only. Set NOVAMAZE_PURE=1
to force the pure path.
"""

from __future__ import annotations

import os

import numpy as np

from .config import SimConfig
from .genome import Genome
from .maze import MazeMap
from .network import build_phenotype
from . import sim

_compiled = None
if os.environ.get("NOVAMAZE_PURE", "") in ("", "0"):
    try:
        from . import _kernel as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

KERNEL_KIND = "compiled" if _compiled is not None else "python"


def genome_arrays(genome: Genome) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    """Flatten a phenotype into the arrays the compiled kernel consumes."""
    net = build_phenotype(genome)
    n_links = len(net.link_src)
    src = np.fromiter(net.link_src, dtype=np.int32, count=n_links)
    dst = np.fromiter(net.link_dst, dtype=np.int32, count=n_links)
    weight = np.fromiter(net.link_weight, dtype=np.float64, count=n_links)
    return net.n_nodes, src, dst, weight


def run_episode(
    genome: Genome,
    maze: MazeMap,
    config: SimConfig,
    out: np.ndarray,
    force_python: bool = False,
) -> tuple[int, bool, int]:
    """Simulate one episode into out[(max_steps+1), 5]; see sim.episode_python."""
    if out.shape[0] < config.max_steps + 1 or out.shape[1] != 5:
        raise ValueError("output buffer must have shape (max_steps + 1, 5)")
    if _compiled is None or force_python:
        net = build_phenotype(genome)
        return sim.episode_python(net, maze, config, out)
    n_nodes, src, dst, weight = genome_arrays(genome)
    n_states, solved, solve_step = _compiled.run_episode(
        n_nodes, src, dst, weight,
        maze.walls_array,
        maze.start[0], maze.start[1], maze.start[2],
        maze.goal[0], maze.goal[1],
        config.max_steps, config.solve_radius, config.robot_radius,
        config.rangefinder_range, config.turn_gain, config.velocity_gain,
        config.max_angular_velocity, config.max_linear_velocity,
        out,
    )
    return n_states, bool(solved), solve_step
