"""novamaze: neuroevolution of maze-navigating robots.

Topology-evolving networks (weights and structure both under mutation, aligned
by innovation numbers), a deceptive-maze robot simulator with a compiled fast
path, novelty-driven and objective-driven search modes, and an interactive
session protocol where a user steers evolution between Step, Novelty, and
Optimize operations over one permanent behavior archive.
"""

from .config import (EngineConfig, NeatConfig, NoveltyConfig, SessionConfig,
                     SimConfig, load_config)
from .engine import (AggregateStats, Outcome, RunRecord, SearchDriver,
                     run_search, run_statistics, welch_t)
from .experiment import (ExperimentPlan, PlanItem, RecordStore,
                         run_experiment, stats_from_directory)
from .genome import (ConnectionGene, Genome, InnovationContext, NodeGene,
                     compatibility_distance, crossover, init_genome, mutate)
from .kernel import KERNEL_KIND
from .maze import (Behavior, MapError, MazeMap, RobotState, box_walls,
                   get_map, list_maps, load_map)
from .network import Network, build_phenotype
from .novelty import (NoveltyArchive, adjust_threshold, batch_sparseness,
                      maybe_archive, sparseness)
from .population import Population, reproduce, speciate
from .session import (Session, SessionError, create_session,
                      run_scripted_session, scripted_select)
from .sim import (EvalCounter, EvalResult, Trajectory, evaluate,
                  goal_distance_fitness, sense, step, waypoint_fitness)

__version__ = "0.1.0"

__all__ = [
    "AggregateStats", "Behavior", "ConnectionGene", "EngineConfig",
    "EvalCounter", "EvalResult", "ExperimentPlan", "Genome",
    "InnovationContext", "KERNEL_KIND", "MapError", "MazeMap", "NeatConfig",
    "Network", "NodeGene", "NoveltyArchive", "NoveltyConfig", "Outcome",
    "PlanItem", "Population", "RecordStore", "RobotState", "RunRecord",
    "SearchDriver", "Session", "SessionConfig", "SessionError", "SimConfig",
    "Trajectory", "adjust_threshold", "batch_sparseness", "box_walls",
    "build_phenotype", "compatibility_distance", "create_session",
    "crossover", "evaluate", "get_map", "goal_distance_fitness",
    "init_genome", "list_maps", "load_config", "load_map", "maybe_archive",
    "mutate", "reproduce", "run_experiment", "run_scripted_session",
    "run_search", "run_statistics", "scripted_select", "sense", "sparseness",
    "speciate", "stats_from_directory", "step", "waypoint_fitness",
    "welch_t", "__version__",
]
