import random

import pytest

from novamaze.config import EngineConfig, NeatConfig
from novamaze.genome import InnovationContext, init_genome
from novamaze.maze import MazeMap, box_walls


@pytest.fixture
def neat_config():
    return NeatConfig()


@pytest.fixture
def engine_config():
    return EngineConfig()


@pytest.fixture
def ctx():
    return InnovationContext()


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def base_genome(neat_config, ctx, rng):
    return init_genome(neat_config, ctx, rng)


def empty_square(side: float = 200.0, goal=(150.0, 100.0)) -> MazeMap:
    """Boundary-only square map, start at center facing +x."""
    return MazeMap(
        name="square",
        bounds=(side, side),
        start=(side / 2.0, side / 2.0, 0.0),
        goal=goal,
        waypoints=(),
        walls=tuple(box_walls(side, side)),
    )


@pytest.fixture
def square_map():
    return empty_square()
