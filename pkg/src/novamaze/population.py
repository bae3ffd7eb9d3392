"""Speciation and generational reproduction.

Scores fed to reproduce() may be objective fitness, novelty, or any other
non-negative signal; selection pressure is agnostic to its meaning. Species
shield new structure: quotas are computed from mean adjusted score
(score / species size), parents come from each species' top half, and the
single best genome survives verbatim.
"""

from __future__ import annotations

import math
import random
from typing import Iterable, Sequence

from .config import NeatConfig
from .genome import Genome, InnovationContext, crossover, mutate

Partition = list[tuple[int, list[Genome]]]


class _Profile:
    """Per-genome precompute so speciation avoids re-walking gene lists."""

    __slots__ = ("innovations", "weights", "n_nodes", "n_connections")

    def __init__(self, genome: Genome) -> None:
        self.weights = {c.innovation: c.weight for c in genome.connections}
        self.innovations = frozenset(self.weights)
        self.n_nodes = len(genome.nodes)
        self.n_connections = len(genome.connections)


def _profile_distance(
    a: _Profile, b: _Profile, config: NeatConfig, cutoff: float = math.inf
) -> float:
    """Compatibility distance; values at or above cutoff may be lower bounds.

    The mismatch and weight terms never subtract, so once a partial sum
    reaches the cutoff the < cutoff comparison the caller makes is already
    settled and the remaining work can be skipped.
    """
    if max(a.n_nodes, b.n_nodes) < config.small_genome_nodes:
        n = 1.0
    else:
        n = float(max(a.n_connections, b.n_connections, 1))
    size_a, size_b = len(a.innovations), len(b.innovations)
    floor = abs(size_a - size_b) / n
    if floor >= cutoff:
        return floor
    matching = a.innovations & b.innovations
    mismatch = size_a + size_b - 2 * len(matching)
    base = mismatch / n
    if base >= cutoff or not matching:
        return base
    diff = 0.0
    wa, wb = a.weights, b.weights
    for innov in matching:
        diff += abs(wa[innov] - wb[innov])
    return base + config.compatibility_modifier * (diff / len(matching))


def speciate(
    population: Sequence[Genome],
    config: NeatConfig,
    representatives: Sequence[tuple[int, Genome]],
    first_new_id: int = 1,
) -> Partition:
    """Partition a population against the previous round's representatives.

    Each genome joins the first species whose representative is strictly
    within the speciation threshold; otherwise it founds a new species (and
    becomes its representative for the rest of this pass). Existing species
    keep their order; new ids count up from first_new_id. Empty species are
    dropped from the result.
    """
    if not population:
        raise ValueError("population must be nonempty")
    threshold = config.speciation_threshold
    ids = [sid for sid, _ in representatives]
    reps = [_Profile(g) for _, g in representatives]
    members: list[list[Genome]] = [[] for _ in representatives]
    next_id = first_new_id
    for genome in population:
        profile = _Profile(genome)
        for i, rep in enumerate(reps):
            if _profile_distance(profile, rep, config, threshold) < threshold:
                members[i].append(genome)
                break
        else:
            ids.append(next_id)
            next_id += 1
            reps.append(profile)
            members.append([genome])
    return [(sid, group) for sid, group in zip(ids, members) if group]


def reproduce(
    partition: Partition,
    scores: dict[int, float],
    config: NeatConfig,
    ctx: InnovationContext,
    rng: random.Random,
    stagnant: frozenset[int] = frozenset(),
) -> list[Genome]:
    """Produce the next generation from a scored species partition.

    Quotas are proportional to mean adjusted score (species mean / species
    size), zeroed for stagnant species unless they hold the global elite;
    all-zero scores degrade to uniform quotas. Parents are the top half of
    each species by score; offspring are crossover-plus-mutate when a species
    has at least two members, mutate alone otherwise. The best genome overall
    is copied unchanged.
    """
    if not partition:
        raise ValueError("partition must be nonempty")
    for _, group in partition:
        for g in group:
            s = scores[g.id]
            if not math.isfinite(s) or s < 0.0:
                raise ValueError(f"score for genome {g.id} must be finite and >= 0")

    elite = None
    elite_species = None
    for sid, group in partition:
        for g in group:
            if elite is None or scores[g.id] > scores[elite.id]:
                elite, elite_species = g, sid

    weights = []
    for sid, group in partition:
        if sid in stagnant and sid != elite_species:
            weights.append(0.0)
            continue
        mean = sum(scores[g.id] for g in group) / len(group)
        weights.append(mean / len(group))
    if sum(weights) <= 0.0:
        weights = [0.0 if (sid in stagnant and sid != elite_species) else 1.0
                   for sid, _ in partition]
        if sum(weights) <= 0.0:
            weights = [1.0] * len(partition)

    slots = config.population_size - min(config.elitism, 1)
    quotas = _largest_remainder(weights, slots)

    offspring: list[Genome] = []
    if elite is not None and config.elitism > 0:
        offspring.append(elite)
    for (sid, group), quota in zip(partition, quotas):
        if quota == 0:
            continue
        ranked = sorted(group, key=lambda g: scores[g.id], reverse=True)
        pool = ranked[: max(1, math.ceil(len(ranked) * config.survival_fraction))]
        for _ in range(quota):
            if len(group) >= 2:
                p1 = pool[rng.randrange(len(pool))]
                p2 = pool[rng.randrange(len(pool))]
                s1, s2 = scores[p1.id], scores[p2.id]
                child = crossover(p1, p2, s1 >= s2, ctx, rng,
                                  config.disabled_inherit_prob)
            else:
                child = pool[0]
            offspring.append(mutate(child, config, ctx, rng))
    return offspring


def _largest_remainder(weights: Sequence[float], total: int) -> list[int]:
    """Integer quotas summing exactly to total, proportional to weights."""
    weight_sum = sum(weights)
    raw = [w / weight_sum * total for w in weights]
    quotas = [int(r) for r in raw]
    shortfall = total - sum(quotas)
    remainders = sorted(
        range(len(raw)), key=lambda i: (raw[i] - quotas[i], -i), reverse=True
    )
    for i in remainders[:shortfall]:
        quotas[i] += 1
    return quotas


class Species:
    """Bookkeeping for one species across rounds."""

    __slots__ = ("id", "representative", "best_score", "staleness")

    def __init__(self, sid: int, representative: Genome) -> None:
        self.id = sid
        self.representative = representative
        self.best_score = -math.inf
        self.staleness = 0


class Population:
    """Generational coordinator: speciate, score, reproduce, repeat."""

    def __init__(
        self,
        config: NeatConfig,
        ctx: InnovationContext,
        rng: random.Random,
        members: list[Genome],
    ) -> None:
        self.config = config
        self.ctx = ctx
        self.rng = rng
        self.members = members
        self.species: list[Species] = []
        self._next_species_id = 1
        self.generation = 0

    def advance(self, scores: dict[int, float]) -> list[Genome]:
        """Replace members with the next generation given this round's scores."""
        partition = speciate(
            self.members,
            self.config,
            [(s.id, s.representative) for s in self.species],
            first_new_id=self._next_species_id,
        )
        by_id = {s.id: s for s in self.species}
        alive: list[Species] = []
        for sid, group in partition:
            state = by_id.get(sid)
            if state is None:
                state = Species(sid, group[0])
                self._next_species_id = max(self._next_species_id, sid + 1)
            best = max(scores[g.id] for g in group)
            if best > state.best_score:
                state.best_score = best
                state.staleness = 0
            else:
                state.staleness += 1
            state.representative = group[self.rng.randrange(len(group))]
            alive.append(state)
        self.species = alive
        stagnant = frozenset(
            s.id for s in alive if s.staleness >= self.config.stagnation_rounds
        )
        self.members = reproduce(
            partition, scores, self.config, self.ctx, self.rng, stagnant
        )
        self.generation += 1
        return self.members
