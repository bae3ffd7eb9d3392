"""Tunable parameters and the file-based override loader.

Defaults reproduce the reference setup used throughout the test suite:
population 250, structural mutation rates 5/10/1%, weight power 0.8,
speciation threshold 0.2, novelty k=15 with an adaptive archive threshold
starting at 3.0, and 400-step episodes.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib


@dataclass
class NeatConfig:
    population_size: int = 250
    add_node_prob: float = 0.05
    add_link_prob: float = 0.10
    remove_link_prob: float = 0.01
    weight_mutation_power: float = 0.8
    init_weight_range: float = 1.0
    weight_clamp: float = 8.0
    allow_recurrent: bool = True
    speciation_threshold: float = 0.2
    compatibility_modifier: float = 0.3
    # Genomes with fewer node genes than this are compared unnormalized (N=1).
    small_genome_nodes: int = 20
    disabled_inherit_prob: float = 0.75
    survival_fraction: float = 0.5
    stagnation_rounds: int = 15
    elitism: int = 1

    def validate(self) -> None:
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        for name in ("add_node_prob", "add_link_prob", "remove_link_prob",
                     "disabled_inherit_prob", "survival_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.weight_mutation_power < 0:
            raise ValueError("weight_mutation_power must be >= 0")
        if self.weight_clamp <= 0:
            raise ValueError("weight_clamp must be positive")
        if self.speciation_threshold < 0:
            raise ValueError("speciation_threshold must be >= 0")
        if self.stagnation_rounds < 1:
            raise ValueError("stagnation_rounds must be >= 1")
        if self.elitism < 0:
            raise ValueError("elitism must be >= 0")


@dataclass
class SimConfig:
    max_steps: int = 400
    solve_radius: float = 5.0
    robot_radius: float = 2.0
    rangefinder_range: float = 100.0
    turn_gain: float = 0.4
    velocity_gain: float = 1.0
    max_angular_velocity: float = 0.5
    max_linear_velocity: float = 3.0

    def validate(self) -> None:
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        for name in ("solve_radius", "robot_radius", "rangefinder_range",
                     "max_angular_velocity", "max_linear_velocity"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class NoveltyConfig:
    k: int = 15
    initial_threshold: float = 3.0
    threshold_floor: float = 0.3
    adjust_every: int = 2500
    raise_factor: float = 1.2
    raise_above: int = 4
    decay_factor: float = 0.95

    def validate(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.initial_threshold <= 0:
            raise ValueError("initial_threshold must be positive")
        if self.threshold_floor < 0:
            raise ValueError("threshold_floor must be >= 0")
        if self.adjust_every < 1:
            raise ValueError("adjust_every must be >= 1")
        if not self.raise_factor >= 1.0:
            raise ValueError("raise_factor must be >= 1")
        if not 0.0 < self.decay_factor <= 1.0:
            raise ValueError("decay_factor must be in (0, 1]")


@dataclass
class SessionConfig:
    screen_size: int = 12
    pool_size: int = 250
    novelty_op_cap: int = 25000
    budget: int = 250000
    map_name: str = "medium"
    seed: int = 0

    def validate(self) -> None:
        if self.screen_size < 2:
            raise ValueError("screen_size must be >= 2")
        if self.pool_size < self.screen_size:
            raise ValueError("pool_size must be >= screen_size")
        if self.novelty_op_cap < 1:
            raise ValueError("novelty_op_cap must be >= 1")
        if self.budget < self.screen_size:
            raise ValueError("budget must cover at least one screen population")


@dataclass
class EngineConfig:
    neat: NeatConfig = field(default_factory=NeatConfig)
    simulation: SimConfig = field(default_factory=SimConfig)
    novelty: NoveltyConfig = field(default_factory=NoveltyConfig)
    session: SessionConfig = field(default_factory=SessionConfig)

    def validate(self) -> None:
        self.neat.validate()
        self.simulation.validate()
        self.novelty.validate()
        self.session.validate()


_SECTIONS = {
    "neat": NeatConfig,
    "simulation": SimConfig,
    "novelty": NoveltyConfig,
    "session": SessionConfig,
}


def _apply_section(obj: Any, section: str, values: dict) -> None:
    known = {f.name for f in dataclasses.fields(obj)}
    for key, value in values.items():
        if key not in known:
            raise ValueError(f"unknown key {key!r} in config section [{section}]")
        setattr(obj, key, value)


def load_config(path: str | os.PathLike | None = None) -> EngineConfig:
    """Build an EngineConfig, applying overrides from a TOML or JSON file.

    With no explicit path the NOVAMAZE_CONFIG environment variable is
    consulted; if that is unset too, defaults are returned. Sections are
    named neat / simulation / novelty / session and may each be partial.
    """
    cfg = EngineConfig()
    if path is None:
        path = os.environ.get("NOVAMAZE_CONFIG") or None
    if path is not None:
        raw = Path(path).read_bytes()
        if str(path).endswith(".json"):
            data = json.loads(raw.decode("utf-8"))
        else:
            data = tomllib.loads(raw.decode("utf-8"))
        if not isinstance(data, dict):
            raise ValueError("config file must contain a table of sections")
        for section, values in data.items():
            if section not in _SECTIONS:
                raise ValueError(f"unknown config section {section!r}")
            if not isinstance(values, dict):
                raise ValueError(f"config section [{section}] must be a table")
            _apply_section(getattr(cfg, section), section, values)
    cfg.validate()
    return cfg
