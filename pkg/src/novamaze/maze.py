"""Maze geometry: maps, validation, and the segment primitives the simulator uses.

Walls are zero-thickness segments; the robot is a disc of configurable radius
(default 2). All distance helpers use sqrt(dx*dx + dy*dy) rather than hypot so
the compiled kernel, which mirrors these formulas in C, produces bit-identical
values.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np


class MapError(ValueError):
    """A map document failed validation; the message names the offending field."""


class Behavior(NamedTuple):
    """Where an episode ended; the individual's point in behavior space."""

    x: float
    y: float


class RobotState(NamedTuple):
    x: float
    y: float
    heading: float
    linear_velocity: float
    angular_velocity: float


class MazeMap:
    """Immutable maze description; safe to share across evaluators."""

    __slots__ = ("name", "bounds", "start", "goal", "waypoints", "walls",
                 "_walls_array")

    def __init__(
        self,
        name: str,
        bounds: tuple[float, float],
        start: tuple[float, float, float],
        goal: tuple[float, float],
        waypoints: tuple[tuple[float, float], ...],
        walls: tuple[tuple[float, float, float, float], ...],
    ) -> None:
        self.name = name
        self.bounds = bounds
        self.start = start
        self.goal = goal
        self.waypoints = waypoints
        self.walls = walls
        self._walls_array: np.ndarray | None = None

    @property
    def walls_array(self) -> np.ndarray:
        if self._walls_array is None:
            arr = np.array(self.walls, dtype=np.float64)
            arr.setflags(write=False)
            self._walls_array = arr
        return self._walls_array

    @property
    def diagonal(self) -> float:
        w, h = self.bounds
        return math.sqrt(w * w + h * h)

    def waypoint_chain(self) -> list[tuple[float, float]]:
        """start, the waypoints in order, then the goal as the final waypoint."""
        return [(self.start[0], self.start[1]), *self.waypoints, self.goal]

    def to_json(self) -> dict:
        return {
            "version": 1,
            "name": self.name,
            "bounds": list(self.bounds),
            "start": list(self.start),
            "goal": list(self.goal),
            "waypoints": [list(p) for p in self.waypoints],
            "walls": [list(w) for w in self.walls],
        }


def box_walls(w: float, h: float) -> list[tuple[float, float, float, float]]:
    """The four boundary segments every map must include."""
    return [(0.0, 0.0, w, 0.0), (w, 0.0, w, h), (w, h, 0.0, h), (0.0, h, 0.0, 0.0)]


def segment_point_distance(
    px: float, py: float, x1: float, y1: float, x2: float, y2: float
) -> float:
    ex = x2 - x1
    ey = y2 - y1
    length_sq = ex * ex + ey * ey
    if length_sq == 0.0:
        dx = px - x1
        dy = py - y1
        return math.sqrt(dx * dx + dy * dy)
    u = ((px - x1) * ex + (py - y1) * ey) / length_sq
    if u < 0.0:
        u = 0.0
    elif u > 1.0:
        u = 1.0
    cx = x1 + u * ex
    cy = y1 + u * ey
    dx = px - cx
    dy = py - cy
    return math.sqrt(dx * dx + dy * dy)


def ray_segment_distance(
    px: float, py: float, dx: float, dy: float,
    x1: float, y1: float, x2: float, y2: float,
) -> float:
    """Distance along the unit ray (dx, dy) to the segment, or inf on a miss.

    Parallel (including collinear) ray and segment count as a miss; the robot
    can never lie on a wall, so the degenerate overlap case is unreachable in
    simulation.
    """
    ex = x2 - x1
    ey = y2 - y1
    denom = dx * ey - dy * ex
    if denom == 0.0:
        return math.inf
    qx = x1 - px
    qy = y1 - py
    t = (qx * ey - qy * ex) / denom
    u = (qx * dy - qy * dx) / denom
    if t >= 0.0 and 0.0 <= u <= 1.0:
        return t
    return math.inf


def _orientation(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def segments_intersect(a1, a2, b1, b2) -> bool:
    d1 = _orientation(*b1, *b2, *a1)
    d2 = _orientation(*b1, *b2, *a2)
    d3 = _orientation(*a1, *a2, *b1)
    d4 = _orientation(*a1, *a2, *b2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True

    def on_segment(px, py, qx, qy, rx, ry):
        return (min(px, qx) <= rx <= max(px, qx)
                and min(py, qy) <= ry <= max(py, qy))

    if d1 == 0 and on_segment(*b1, *b2, *a1):
        return True
    if d2 == 0 and on_segment(*b1, *b2, *a2):
        return True
    if d3 == 0 and on_segment(*a1, *a2, *b1):
        return True
    if d4 == 0 and on_segment(*a1, *a2, *b2):
        return True
    return False


def segment_segment_distance(a1, a2, b1, b2) -> float:
    if segments_intersect(a1, a2, b1, b2):
        return 0.0
    return min(
        segment_point_distance(*a1, *b1, *b2),
        segment_point_distance(*a2, *b1, *b2),
        segment_point_distance(*b1, *a1, *a2),
        segment_point_distance(*b2, *a1, *a2),
    )


def _require(document: dict, field: str, kind: type) -> object:
    if field not in document:
        raise MapError(f"map document is missing required field {field!r}")
    value = document[field]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise MapError(f"field {field!r} must be a number")
        return float(value)
    if not isinstance(value, kind):
        raise MapError(f"field {field!r} must be of type {kind.__name__}")
    return value


def _point(value, field: str, length: int) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)) or len(value) != length:
        raise MapError(f"field {field!r} must be a list of {length} numbers")
    out = []
    for v in value:
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise MapError(f"field {field!r} must contain finite numbers")
        out.append(float(v))
    return tuple(out)


def load_map(
    document: dict | str | Path,
    *,
    robot_radius: float = 2.0,
    solve_radius: float = 5.0,
) -> MazeMap:
    """Validate a map document (or a path to one) into a MazeMap.

    Rejects geometry the simulator cannot run: missing boundary walls, a start
    or goal too close to a wall for the robot disc, a start already within the
    solve radius of the goal (every genome would count as a solution), or a
    waypoint chain whose consecutive points lack line of sight with clearance.
    """
    if isinstance(document, (str, Path)):
        document = json.loads(Path(document).read_text(encoding="utf-8"))
    if not isinstance(document, dict):
        raise MapError("map document must be a JSON object")
    version = _require(document, "version", int)
    if version != 1:
        raise MapError(f"unsupported map version {version!r}")
    name = _require(document, "name", str)
    if not name:
        raise MapError("field 'name' must be a nonempty string")
    w, h = _point(_require(document, "bounds", list), "bounds", 2)
    if w <= 0 or h <= 0:
        raise MapError("field 'bounds' must be positive")
    start = _point(_require(document, "start", list), "start", 3)
    goal = _point(_require(document, "goal", list), "goal", 2)

    raw_walls = _require(document, "walls", list)
    if not raw_walls:
        raise MapError("field 'walls' must be a nonempty list of segments")
    walls = tuple(_point(seg, "walls", 4) for seg in raw_walls)
    for x1, y1, x2, y2 in walls:
        if not (0 <= x1 <= w and 0 <= x2 <= w and 0 <= y1 <= h and 0 <= y2 <= h):
            raise MapError("field 'walls' contains a segment outside bounds")
        if x1 == x2 and y1 == y2:
            raise MapError("field 'walls' contains a zero-length segment")
    boundary = {tuple(seg) for seg in box_walls(w, h)}
    present = set()
    for x1, y1, x2, y2 in walls:
        present.add((x1, y1, x2, y2))
        present.add((x2, y2, x1, y1))
    missing = [seg for seg in boundary if seg not in present]
    if missing:
        raise MapError("field 'walls' must include the four outer boundary segments")

    raw_waypoints = _require(document, "waypoints", list)
    waypoints = tuple(_point(p, "waypoints", 2) for p in raw_waypoints)

    def clearance(px: float, py: float) -> float:
        return min(segment_point_distance(px, py, *seg) for seg in walls)

    for label, (px, py) in (("start", start[:2]), ("goal", goal),
                            *((f"waypoints[{i}]", p) for i, p in enumerate(waypoints))):
        if not (0 < px < w and 0 < py < h):
            raise MapError(f"field {label!r} must lie strictly inside bounds")
        if clearance(px, py) < robot_radius:
            raise MapError(
                f"field {label!r} is within robot radius {robot_radius} of a wall"
            )

    sdx = start[0] - goal[0]
    sdy = start[1] - goal[1]
    if math.sqrt(sdx * sdx + sdy * sdy) <= solve_radius:
        raise MapError(
            f"field 'start' is within the solve radius ({solve_radius}) of 'goal'"
        )

    if waypoints:
        chain = [start[:2], *waypoints, goal]
        for i in range(len(chain) - 1):
            a, b = chain[i], chain[i + 1]
            for seg in walls:
                gap = segment_segment_distance(a, b, (seg[0], seg[1]), (seg[2], seg[3]))
                if gap < robot_radius:
                    raise MapError(
                        "field 'waypoints' chain is not mutually reachable: leg "
                        f"{i} passes within {gap:.3f} of wall {seg}"
                    )

    return MazeMap(name, (w, h), start, goal, waypoints, walls)


def get_map(name: str, *, directory: str | Path | None = None) -> MazeMap:
    """Load a shipped map by name, or from a directory of *.maze.json files."""
    if directory is not None:
        path = Path(directory) / f"{name}.maze.json"
        if not path.exists():
            raise MapError(f"unknown map {name!r} in {directory}")
        return load_map(path)
    ref = resources.files(__package__) / "maps" / f"{name}.maze.json"
    if not ref.is_file():
        raise MapError(f"unknown map {name!r}")
    return load_map(json.loads(ref.read_text(encoding="utf-8")))


def list_maps(directory: str | Path | None = None) -> list[str]:
    if directory is not None:
        return sorted(p.name[: -len(".maze.json")]
                      for p in Path(directory).glob("*.maze.json"))
    ref = resources.files(__package__) / "maps"
    return sorted(
        entry.name[: -len(".maze.json")]
        for entry in ref.iterdir()
        if entry.name.endswith(".maze.json")
    )
