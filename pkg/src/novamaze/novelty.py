"""Behavior-space novelty: sparseness scoring, the permanent archive, and the
adaptive archival threshold.

Sparseness of a behavior is the mean Euclidean distance to its k nearest
neighbors among the current population plus every archived behavior, the
scored individual excluded. The archive is append-only for the lifetime of a
run or session; its threshold rho_min adapts on a fixed evaluation cadence.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .config import NoveltyConfig
from .maze import Behavior


class NoveltyArchive:
    """Append-only behavior archive with the adaptive rho_min schedule."""

    __slots__ = ("config", "entries", "rho_min", "k", "evals_since_adjust",
                 "archived_since_adjust", "rho_history", "_points")

    def __init__(self, config: NoveltyConfig | None = None) -> None:
        self.config = config or NoveltyConfig()
        self.config.validate()
        self.entries: list[tuple[float, float]] = []
        self.rho_min = self.config.initial_threshold
        self.k = self.config.k
        self.evals_since_adjust = 0
        self.archived_since_adjust = 0
        self.rho_history = [self.rho_min]
        self._points: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.entries)

    def points(self) -> np.ndarray:
        """Archive entries as an (m, 2) array; cached between appends."""
        if self._points is None or len(self._points) != len(self.entries):
            self._points = np.array(self.entries, dtype=np.float64).reshape(-1, 2)
        return self._points

    def force_decay(self) -> float:
        """Lower rho_min one decay step (used when a search stalls)."""
        self.rho_min = max(self.config.threshold_floor,
                           self.rho_min * self.config.decay_factor)
        self.rho_history.append(self.rho_min)
        return self.rho_min

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "rho_min": self.rho_min,
            "rho_history": list(self.rho_history),
            "entries": [[x, y] for x, y in self.entries],
        }


def _reference_points(
    x: object,
    population: Sequence[tuple[float, float]],
    archive: NoveltyArchive,
) -> list[tuple[float, float]]:
    refs = [tuple(p) for p in population if p is not x]
    refs.extend(archive.entries)
    return refs


def sparseness(
    x: Behavior | tuple[float, float],
    population: Sequence[tuple[float, float]],
    archive: NoveltyArchive,
) -> float:
    """Mean distance from x to its k nearest reference behaviors.

    The reference set is population plus archive with x itself excluded by
    object identity. Fewer than k references average over what exists; an
    empty reference set is maximally novel by convention (2 * rho_min).
    """
    refs = _reference_points(x, population, archive)
    if not refs:
        return archive.rho_min * 2.0
    pts = np.asarray(refs, dtype=np.float64)
    dx = pts[:, 0] - x[0]
    dy = pts[:, 1] - x[1]
    dists = np.sqrt(dx * dx + dy * dy)
    take = min(archive.k, len(dists))
    if take < len(dists):
        nearest = np.partition(dists, take - 1)[:take]
    else:
        nearest = dists
    return float(nearest.mean())


def batch_sparseness(points: np.ndarray, archive: NoveltyArchive) -> np.ndarray:
    """Sparseness of each row of points against (points - self) + archive.

    Equivalent to calling sparseness() per row with the others as population;
    vectorized because novelty scoring is on every generation's hot path.
    """
    pop = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = len(pop)
    arch = archive.points()
    refs = np.concatenate([pop, arch]) if len(arch) else pop
    if len(refs) <= 1:
        return np.full(n, archive.rho_min * 2.0)
    diff = pop[:, None, :] - refs[None, :, :]
    dx = diff[:, :, 0]
    dy = diff[:, :, 1]
    dists = np.sqrt(dx * dx + dy * dy)
    idx = np.arange(n)
    dists[idx, idx] = np.inf  # self-exclusion
    take = min(archive.k, len(refs) - 1)
    nearest = np.partition(dists, take - 1, axis=1)[:, :take]
    return nearest.mean(axis=1)


def maybe_archive(
    x: Behavior | tuple[float, float],
    rho: float,
    archive: NoveltyArchive,
) -> bool:
    """Append x iff rho strictly exceeds rho_min; always counts the evaluation."""
    archive.evals_since_adjust += 1
    if rho > archive.rho_min:
        archive.entries.append((float(x[0]), float(x[1])))
        archive.archived_since_adjust += 1
        return True
    return False


def adjust_threshold(archive: NoveltyArchive) -> float:
    """Periodic rho_min update: raise when archiving freely, decay when starved."""
    cfg = archive.config
    if archive.archived_since_adjust > cfg.raise_above:
        archive.rho_min *= cfg.raise_factor
    elif archive.archived_since_adjust == 0:
        archive.rho_min *= cfg.decay_factor
    if archive.rho_min < cfg.threshold_floor:
        archive.rho_min = cfg.threshold_floor
    archive.evals_since_adjust = 0
    archive.archived_since_adjust = 0
    archive.rho_history.append(archive.rho_min)
    return archive.rho_min
