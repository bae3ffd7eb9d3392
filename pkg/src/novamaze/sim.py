"""Robot simulation: sensors, kinematics, collision response, episode evaluation.

This module is the reference semantics. The compiled kernel in _kernel.pyx
mirrors these formulas operation for operation (same order, same constants,
same epsilon guards), which is what lets the test suite demand bit-identical
trajectories from both implementations.

Collision model: the robot is a disc of radius 2 moving against zero-thickness
segments. Each step's displacement is clipped at the first capsule contact and
the remaining displacement loses its into-wall component (slide-along-wall),
iterated up to four contacts per step. Velocity state is untouched by contact;
only the displacement is reshaped.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .config import SimConfig
from .genome import Genome
from .maze import Behavior, MazeMap, RobotState
from .network import Network, build_phenotype, steep_sigmoid

# Rangefinder directions relative to heading: -90, -45, 0, +45, +90, 180 deg.
# Exact values, shared verbatim with the compiled kernel.
SQ2 = 0.7071067811865476
RF_COS = (0.0, SQ2, 1.0, SQ2, 0.0, -1.0)
RF_SIN = (-1.0, -SQ2, 0.0, SQ2, 1.0, 0.0)
N_RANGEFINDERS = 6

TOUCH_EPS = 1e-9      # contact slop: within this of the surface counts as touching
SLIDE_ITERATIONS = 4  # max contacts resolved per step

QUARTER_PI = math.pi / 4.0
HALF_PI = math.pi / 2.0
TWO_PI = math.pi * 2.0

DEFAULT_SIM = SimConfig()


def sense(state: RobotState, maze: MazeMap, config: SimConfig = DEFAULT_SIM) -> list[float]:
    """Ten sensor readings in [0,1]: six rangefinders, four pie-slice goal flags.

    Rangefinders measure distance from the robot center to the nearest wall
    along fixed relative angles, divided by max range and clamped to 1. The
    pie-slice quadrants [-45,45), [45,135), [135,225), [225,315) degrees
    (relative to heading) partition the circle; exactly one flag reads 1.
    """
    px, py, heading = state.x, state.y, state.heading
    ch = math.cos(heading)
    sh = math.sin(heading)
    out = []
    rng = config.rangefinder_range
    for i in range(N_RANGEFINDERS):
        dx = ch * RF_COS[i] - sh * RF_SIN[i]
        dy = sh * RF_COS[i] + ch * RF_SIN[i]
        best = rng
        for x1, y1, x2, y2 in maze.walls:
            ex = x2 - x1
            ey = y2 - y1
            denom = dx * ey - dy * ex
            if denom == 0.0:
                continue
            qx = x1 - px
            qy = y1 - py
            t = (qx * ey - qy * ex) / denom
            u = (qx * dy - qy * dx) / denom
            if t >= 0.0 and 0.0 <= u <= 1.0 and t < best:
                best = t
        out.append(best / rng)
    gx, gy = maze.goal
    rel = math.atan2(gy - py, gx - px) - heading
    shifted = math.fmod(rel + QUARTER_PI, TWO_PI)
    if shifted < 0.0:
        shifted += TWO_PI
    idx = int(shifted / HALF_PI)
    if idx > 3:
        idx = 3
    for q in range(4):
        out.append(1.0 if q == idx else 0.0)
    return out


def _capsule_contact(
    px: float, py: float, dx: float, dy: float,
    x1: float, y1: float, x2: float, y2: float, r: float,
) -> tuple[float, float, float]:
    """First contact of a moving disc with one segment.

    Returns (t, nx, ny) with t in [0,1) and the outward surface normal, or
    (2.0, 0, 0) when this segment does not constrain the step. A disc already
    within TOUCH_EPS of the surface contacts at t=0 if moving inward and is
    ignored entirely if moving away (a convex surface cannot be re-entered).
    """
    ex = x2 - x1
    ey = y2 - y1
    length_sq = ex * ex + ey * ey
    qx = px - x1
    qy = py - y1
    if length_sq == 0.0:
        u = 0.0
    else:
        u = (qx * ex + qy * ey) / length_sq
        if u < 0.0:
            u = 0.0
        elif u > 1.0:
            u = 1.0
    cx = x1 + u * ex
    cy = y1 + u * ey
    wx = px - cx
    wy = py - cy
    dist_sq = wx * wx + wy * wy
    touch = r + TOUCH_EPS
    if dist_sq <= touch * touch:
        dist = math.sqrt(dist_sq)
        if dist == 0.0:
            return 2.0, 0.0, 0.0
        nx = wx / dist
        ny = wy / dist
        if dx * nx + dy * ny < 0.0:
            return 0.0, nx, ny
        return 2.0, 0.0, 0.0

    best = 2.0
    bnx = 0.0
    bny = 0.0
    if length_sq > 0.0:
        inv_len = 1.0 / math.sqrt(length_sq)
        lnx = -ey * inv_len
        lny = ex * inv_len
        s0 = qx * lnx + qy * lny
        sd = dx * lnx + dy * lny
        if sd != 0.0:
            target = r if s0 > 0.0 else -r
            t = (target - s0) / sd
            if 0.0 <= t < 1.0:
                hx = px + dx * t
                hy = py + dy * t
                uu = ((hx - x1) * ex + (hy - y1) * ey) / length_sq
                if 0.0 <= uu <= 1.0 and t < best:
                    best = t
                    if s0 > 0.0:
                        bnx, bny = lnx, lny
                    else:
                        bnx, bny = -lnx, -lny
    a = dx * dx + dy * dy
    if a != 0.0:
        for cx0, cy0 in ((x1, y1), (x2, y2)):
            ox = px - cx0
            oy = py - cy0
            b = ox * dx + oy * dy
            c = ox * ox + oy * oy - r * r
            disc = b * b - a * c
            if disc <= 0.0:
                continue
            t = (-b - math.sqrt(disc)) / a
            if 0.0 <= t < 1.0 and t < best:
                best = t
                bnx = (px + dx * t - cx0) / r
                bny = (py + dy * t - cy0) / r
    return best, bnx, bny


def resolve_motion(
    x: float, y: float, dx: float, dy: float,
    walls: Sequence[tuple[float, float, float, float]], radius: float,
) -> tuple[float, float]:
    """Advance a disc by (dx, dy), truncating and sliding at wall contacts."""
    for _ in range(SLIDE_ITERATIONS):
        if dx == 0.0 and dy == 0.0:
            break
        best = 2.0
        nx = 0.0
        ny = 0.0
        for x1, y1, x2, y2 in walls:
            t, cnx, cny = _capsule_contact(x, y, dx, dy, x1, y1, x2, y2, radius)
            if t < best:
                best = t
                nx = cnx
                ny = cny
        if best >= 1.0:
            x += dx
            y += dy
            break
        x += dx * best
        y += dy * best
        rx = dx * (1.0 - best)
        ry = dy * (1.0 - best)
        dot = rx * nx + ry * ny
        if dot < 0.0:
            rx -= nx * dot
            ry -= ny * dot
        dx = rx
        dy = ry
    return x, y


def step(
    state: RobotState,
    outputs: tuple[float, float],
    maze: MazeMap,
    config: SimConfig = DEFAULT_SIM,
) -> RobotState:
    """One kinematics step from network outputs (turn, velocity) in [-0.5, 0.5].

    Angular velocity integrates turn * 0.4 rad (clamped to +-0.5 rad/step),
    linear velocity integrates velocity * 1.0 (clamped to +-3 units/step),
    heading integrates angular velocity, and the position advances along the
    new heading with slide-along-wall contact response.
    """
    turn, velocity = outputs
    av = state.angular_velocity + turn * config.turn_gain
    if av > config.max_angular_velocity:
        av = config.max_angular_velocity
    elif av < -config.max_angular_velocity:
        av = -config.max_angular_velocity
    lv = state.linear_velocity + velocity * config.velocity_gain
    if lv > config.max_linear_velocity:
        lv = config.max_linear_velocity
    elif lv < -config.max_linear_velocity:
        lv = -config.max_linear_velocity
    heading = state.heading + av
    ch = math.cos(heading)
    sh = math.sin(heading)
    x, y = resolve_motion(
        state.x, state.y, lv * ch, lv * sh, maze.walls, config.robot_radius
    )
    return RobotState(x, y, heading, lv, av)


def episode_python(
    network: Network,
    maze: MazeMap,
    config: SimConfig,
    out: np.ndarray,
) -> tuple[int, bool, int]:
    """Pure-Python episode kernel. Fills out[(max_steps+1), 5] rows with
    (x, y, heading, linear_velocity, angular_velocity); returns
    (state count, solved, solve step or -1).

    When the full dynamical state (pose, velocities, activations) repeats
    exactly between steps, every later state is equal too, so the remaining
    rows are filled without simulating.
    """
    network.reset()
    state = RobotState(maze.start[0], maze.start[1], maze.start[2], 0.0, 0.0)
    out[0, 0] = state.x
    out[0, 1] = state.y
    out[0, 2] = state.heading
    out[0, 3] = 0.0
    out[0, 4] = 0.0
    gx, gy = maze.goal
    solve_sq = config.solve_radius * config.solve_radius
    prev = None
    prev_acts: list[float] | None = None
    for i in range(1, config.max_steps + 1):
        sensors = sense(state, maze, config)
        outputs = network.activate(sensors)
        state = step(state, outputs, maze, config)
        out[i, 0] = state.x
        out[i, 1] = state.y
        out[i, 2] = state.heading
        out[i, 3] = state.linear_velocity
        out[i, 4] = state.angular_velocity
        ddx = state.x - gx
        ddy = state.y - gy
        if ddx * ddx + ddy * ddy <= solve_sq:
            return i + 1, True, i
        if prev is not None and state == prev and network.activations == prev_acts:
            for j in range(i + 1, config.max_steps + 1):
                out[j, 0] = state.x
                out[j, 1] = state.y
                out[j, 2] = state.heading
                out[j, 3] = state.linear_velocity
                out[j, 4] = state.angular_velocity
            return config.max_steps + 1, False, -1
        prev = state
        prev_acts = list(network.activations)
    return config.max_steps + 1, False, -1


class Trajectory:
    """Time-ordered robot states for one episode (initial state included)."""

    __slots__ = ("array", "solved", "solve_step")

    def __init__(self, array: np.ndarray, solved: bool, solve_step: int | None) -> None:
        self.array = array
        self.solved = solved
        self.solve_step = solve_step

    def __len__(self) -> int:
        return len(self.array)

    @property
    def positions(self) -> np.ndarray:
        return self.array[:, :2]

    @property
    def states(self) -> list[RobotState]:
        return [RobotState(*row) for row in self.array]

    @property
    def final_position(self) -> Behavior:
        return Behavior(float(self.array[-1, 0]), float(self.array[-1, 1]))


class EvalCounter:
    """Counts evaluations; one instance per experiment or session."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def tick(self) -> None:
        self.count += 1


class EvalResult:
    __slots__ = ("trajectory", "behavior", "hidden_nodes")

    def __init__(self, trajectory: Trajectory, behavior: Behavior, hidden_nodes: int) -> None:
        self.trajectory = trajectory
        self.behavior = behavior
        self.hidden_nodes = hidden_nodes


def evaluate(
    genome: Genome,
    maze: MazeMap,
    config: SimConfig = DEFAULT_SIM,
    counter: EvalCounter | None = None,
) -> EvalResult:
    """Run one episode for a genome: build phenotype, reset, simulate.

    Stops early on reaching the goal (within the solve radius). Counts as
    exactly one evaluation on the supplied counter.
    """
    from .kernel import run_episode  # late import: kernel selection happens once

    buffer = np.empty((config.max_steps + 1, 5), dtype=np.float64)
    n_states, solved, solve_step = run_episode(genome, maze, config, buffer)
    if counter is not None:
        counter.tick()
    trajectory = Trajectory(
        buffer[:n_states].copy(), solved, solve_step if solved else None
    )
    return EvalResult(trajectory, trajectory.final_position, genome.hidden_count())


def goal_distance_fitness(behavior: Behavior | tuple[float, float], maze: MazeMap) -> float:
    """Bounds diagonal minus distance to goal: maximal exactly at the goal."""
    bx, by = behavior
    gx, gy = maze.goal
    dx = bx - gx
    dy = by - gy
    return maze.diagonal - math.sqrt(dx * dx + dy * dy)


def waypoint_fitness(
    trajectory: Trajectory | np.ndarray,
    maze: MazeMap,
    solve_radius: float = 5.0,
) -> float:
    """Ordered-progress score: waypoints reached plus normalized headway.

    f = n + (1 - d): n counts waypoints reached in order (within the solve
    radius, all earlier ones already reached; the goal is the final waypoint),
    and d is the closest approach to waypoint n+1 over the trajectory suffix
    from the state that reached waypoint n, divided by the n -> n+1 spacing
    and clamped to [0,1]. A full traversal scores exactly the waypoint count
    (goal included).
    """
    if isinstance(trajectory, Trajectory):
        points = trajectory.positions
    else:
        points = np.asarray(trajectory, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] < 2:
            raise ValueError("trajectory must be an (n, 2) array of positions")
        points = points[:, :2]
    if len(points) == 0:
        raise ValueError("trajectory must contain at least one state")
    if not maze.waypoints:
        raise ValueError("map has no waypoints")
    chain = maze.waypoint_chain()
    targets = chain[1:]
    radius_sq = solve_radius * solve_radius
    reached = 0
    cursor = 0
    for target in targets:
        delta = points[cursor:] - target
        dist_sq = np.einsum("ij,ij->i", delta, delta)
        hits = np.nonzero(dist_sq <= radius_sq)[0]
        if len(hits) == 0:
            break
        cursor += int(hits[0])
        reached += 1
    if reached == len(targets):
        return float(len(targets))
    target = np.asarray(targets[reached])
    anchor = np.asarray(chain[reached])
    delta = points[cursor:] - target
    nearest = math.sqrt(float(np.min(np.einsum("ij,ij->i", delta, delta))))
    spacing = float(np.linalg.norm(target - anchor))
    d = nearest / spacing if spacing > 0.0 else 1.0
    if d > 1.0:
        d = 1.0
    elif d < 0.0:
        d = 0.0
    return reached + (1.0 - d)
