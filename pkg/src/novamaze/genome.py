"""NEAT genomes: gene records, innovation bookkeeping, and variation operators.

Every genome shares a fixed sensor/actuator frame: node 0 is the bias, nodes
1-10 are the ten sensors, nodes 11 (turn) and 12 (velocity) are outputs, and
hidden nodes take ids from 13 upward. Structural novelty is tracked through a
per-experiment InnovationContext so that genes with equal innovation numbers
always describe the same link, which is what makes crossover and the
compatibility distance meaningful.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Iterable

from .config import NeatConfig

BIAS_ID = 0
SENSOR_IDS = tuple(range(1, 11))
OUTPUT_IDS = (11, 12)
N_SENSORS = len(SENSOR_IDS)
FIXED_NODE_COUNT = 13  # bias + sensors + outputs, identical in every genome

NODE_KINDS = ("bias", "sensor", "output", "hidden")


@dataclass(frozen=True)
class NodeGene:
    id: int
    kind: str


@dataclass(frozen=True)
class ConnectionGene:
    innovation: int
    src: int
    dst: int
    weight: float
    enabled: bool


@dataclass(frozen=True)
class Genome:
    id: int
    nodes: tuple[NodeGene, ...]
    connections: tuple[ConnectionGene, ...]

    def hidden_count(self) -> int:
        return len(self.nodes) - FIXED_NODE_COUNT

    def enabled_connections(self) -> tuple[ConnectionGene, ...]:
        return tuple(c for c in self.connections if c.enabled)

    def node_ids(self) -> set[int]:
        return {n.id for n in self.nodes}

    def same_structure(self, other: "Genome") -> bool:
        """True when node sets and connection genes match exactly (ids aside)."""
        return self.nodes == other.nodes and self.connections == other.connections

    def validate(self) -> None:
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids")
        present = set(ids)
        if not present >= set(range(FIXED_NODE_COUNT)):
            raise ValueError("genome is missing fixed interface nodes")
        innovs = [c.innovation for c in self.connections]
        if len(set(innovs)) != len(innovs):
            raise ValueError("duplicate innovation numbers")
        seen_pairs = set()
        for c in self.connections:
            if c.src not in present or c.dst not in present:
                raise ValueError(f"connection {c.innovation} references a missing node")
            if c.dst < 11:
                raise ValueError(f"connection {c.innovation} feeds a sensor or bias node")
            if (c.src, c.dst) in seen_pairs:
                raise ValueError(f"duplicate link {c.src}->{c.dst}")
            seen_pairs.add((c.src, c.dst))

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "nodes": [[n.id, n.kind] for n in self.nodes],
            "connections": [
                [c.innovation, c.src, c.dst, c.weight, c.enabled]
                for c in self.connections
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Genome":
        g = cls(
            id=int(data["id"]),
            nodes=tuple(NodeGene(int(i), str(k)) for i, k in data["nodes"]),
            connections=tuple(
                ConnectionGene(int(i), int(s), int(d), float(w), bool(e))
                for i, s, d, w, e in data["connections"]
            ),
        )
        g.validate()
        return g


class InnovationContext:
    """Registry of structural events for one experiment.

    Two genomes that independently add the same link, or split the same
    connection, receive identical innovation numbers (and node id), keeping
    the population alignable. A second split of the same connection inside a
    genome that already carries the first split's node gets a fresh record.
    """

    def __init__(self) -> None:
        self._next_innovation = 1
        self._next_node = FIXED_NODE_COUNT
        self._next_genome = 1
        self._links: dict[tuple[int, int], int] = {}
        # (src, dst) of the split connection -> list of (node, in_innov, out_innov)
        self._splits: dict[tuple[int, int], list[tuple[int, int, int]]] = {}

    def new_genome_id(self) -> int:
        gid = self._next_genome
        self._next_genome += 1
        return gid

    def link_innovation(self, src: int, dst: int) -> int:
        key = (src, dst)
        found = self._links.get(key)
        if found is None:
            found = self._next_innovation
            self._next_innovation += 1
            self._links[key] = found
        return found

    def split_innovations(
        self, src: int, dst: int, existing_nodes: set[int]
    ) -> tuple[int, int, int]:
        """Return (new_node, in_innovation, out_innovation) for splitting src->dst."""
        records = self._splits.setdefault((src, dst), [])
        for record in records:
            if record[0] not in existing_nodes:
                return record
        node = self._next_node
        self._next_node += 1
        in_innov = self._next_innovation
        out_innov = self._next_innovation + 1
        self._next_innovation += 2
        record = (node, in_innov, out_innov)
        records.append(record)
        return record


def init_genome(config: NeatConfig, ctx: InnovationContext, rng: random.Random) -> Genome:
    """Fully connected minimal genome: bias and sensors wired to both outputs.

    22 connections, innovations assigned source-major so equal seeds yield
    identical gene layouts across runs.
    """
    nodes = [NodeGene(BIAS_ID, "bias")]
    nodes += [NodeGene(i, "sensor") for i in SENSOR_IDS]
    nodes += [NodeGene(i, "output") for i in OUTPUT_IDS]
    connections = []
    for src in (BIAS_ID,) + SENSOR_IDS:
        for dst in OUTPUT_IDS:
            innov = ctx.link_innovation(src, dst)
            weight = rng.uniform(-config.init_weight_range, config.init_weight_range)
            connections.append(ConnectionGene(innov, src, dst, weight, True))
    return Genome(ctx.new_genome_id(), tuple(nodes), tuple(connections))


def _would_cycle(connections: list[ConnectionGene], src: int, dst: int) -> bool:
    """True if adding dst->... path already reaches src (so src->dst closes a loop)."""
    if src == dst:
        return True
    out: dict[int, list[int]] = {}
    for c in connections:
        if c.enabled:
            out.setdefault(c.src, []).append(c.dst)
    stack, seen = [dst], set()
    while stack:
        node = stack.pop()
        if node == src:
            return True
        if node in seen:
            continue
        seen.add(node)
        stack.extend(out.get(node, ()))
    return False


def _open_pairs(
    nodes: tuple[NodeGene, ...],
    connections: list[ConnectionGene],
    config: NeatConfig,
) -> list[tuple[int, int]]:
    taken = {(c.src, c.dst) for c in connections}
    targets = [n.id for n in nodes if n.kind in ("output", "hidden")]
    pairs = []
    for s in nodes:
        for d in targets:
            if (s.id, d) in taken:
                continue
            if not config.allow_recurrent and _would_cycle(connections, s.id, d):
                continue
            pairs.append((s.id, d))
    return pairs


def mutate(
    genome: Genome,
    config: NeatConfig,
    ctx: InnovationContext,
    rng: random.Random,
) -> Genome:
    """Apply one round of structural and weight mutation.

    Draw order is fixed (add-node, add-link, remove-link, then weight jitter)
    so a seeded rng replays the same offspring. Splitting a connection keeps
    the old gene disabled, wires the new node in with weight 1.0, and carries
    the old weight on the outgoing side.
    """
    nodes = list(genome.nodes)
    connections = list(genome.connections)

    if rng.random() < config.add_node_prob:
        enabled = [i for i, c in enumerate(connections) if c.enabled]
        if enabled:
            i = enabled[rng.randrange(len(enabled))]
            old = connections[i]
            node_ids = {n.id for n in nodes}
            node, in_innov, out_innov = ctx.split_innovations(old.src, old.dst, node_ids)
            connections[i] = replace(old, enabled=False)
            nodes.append(NodeGene(node, "hidden"))
            connections.append(ConnectionGene(in_innov, old.src, node, 1.0, True))
            connections.append(ConnectionGene(out_innov, node, old.dst, old.weight, True))

    if rng.random() < config.add_link_prob:
        pairs = _open_pairs(tuple(nodes), connections, config)
        if pairs:
            src, dst = pairs[rng.randrange(len(pairs))]
            innov = ctx.link_innovation(src, dst)
            weight = rng.uniform(-config.init_weight_range, config.init_weight_range)
            connections.append(ConnectionGene(innov, src, dst, weight, True))

    if rng.random() < config.remove_link_prob and connections:
        del connections[rng.randrange(len(connections))]

    power = config.weight_mutation_power
    if power > 0.0:
        clamp = config.weight_clamp
        connections = [
            ConnectionGene(
                c.innovation,
                c.src,
                c.dst,
                min(clamp, max(-clamp, c.weight + rng.uniform(-power, power))),
                c.enabled,
            )
            for c in connections
        ]

    return Genome(ctx.new_genome_id(), tuple(nodes), tuple(connections))


def crossover(
    a: Genome,
    b: Genome,
    a_fitter: bool,
    ctx: InnovationContext,
    rng: random.Random,
    disabled_inherit_prob: float = 0.75,
) -> Genome:
    """Recombine two genomes; the child inherits the fitter parent's structure.

    Matching genes (same innovation) take their weight from either parent
    uniformly at random; disjoint and excess genes come from the fitter parent
    only. A gene disabled in either parent stays disabled in the child with
    probability disabled_inherit_prob.
    """
    fitter, weaker = (a, b) if a_fitter else (b, a)
    weaker_by_innov = {c.innovation: c for c in weaker.connections}
    child_connections = []
    for gene in fitter.connections:
        other = weaker_by_innov.get(gene.innovation)
        if other is None:
            weight = gene.weight
            disabled_somewhere = not gene.enabled
        else:
            weight = gene.weight if rng.random() < 0.5 else other.weight
            disabled_somewhere = not (gene.enabled and other.enabled)
        enabled = True
        if disabled_somewhere:
            enabled = not (rng.random() < disabled_inherit_prob)
        child_connections.append(
            ConnectionGene(gene.innovation, gene.src, gene.dst, weight, enabled)
        )
    return Genome(ctx.new_genome_id(), fitter.nodes, tuple(child_connections))


def compatibility_distance(a: Genome, b: Genome, config: NeatConfig) -> float:
    """Structural distance: (excess + disjoint) / N + modifier * mean |dw|.

    N is 1 while both genomes stay small (fewer than small_genome_nodes node
    genes), otherwise the connection count of the larger genome. Distance is
    symmetric and zero for identical structure and weights.
    """
    weights_a = {c.innovation: c.weight for c in a.connections}
    weights_b = {c.innovation: c.weight for c in b.connections}
    matching = weights_a.keys() & weights_b.keys()
    mismatch = (len(weights_a) - len(matching)) + (len(weights_b) - len(matching))
    if max(len(a.nodes), len(b.nodes)) < config.small_genome_nodes:
        n = 1.0
    else:
        n = float(max(len(a.connections), len(b.connections), 1))
    if matching:
        diff = 0.0
        for innov in matching:
            diff += abs(weights_a[innov] - weights_b[innov])
        wbar = diff / len(matching)
    else:
        wbar = 0.0
    return mismatch / n + config.compatibility_modifier * wbar


def genome_to_json_str(genome: Genome) -> str:
    return json.dumps(genome.to_json(), separators=(",", ":"))


def genome_from_json_str(payload: str) -> Genome:
    return Genome.from_json(json.loads(payload))


def clone_into_context(genomes: Iterable[Genome], ctx: InnovationContext) -> list[Genome]:
    """Re-register foreign genomes (e.g. loaded from disk) under a fresh context.

    Innovation numbers and node ids are preserved; the context's counters jump
    past the highest ids seen so later structural events cannot collide.
    """
    out = []
    for g in genomes:
        g.validate()
        for c in g.connections:
            ctx._links.setdefault((c.src, c.dst), c.innovation)
            ctx._next_innovation = max(ctx._next_innovation, c.innovation + 1)
        for node in g.nodes:
            ctx._next_node = max(ctx._next_node, node.id + 1)
        out.append(Genome(ctx.new_genome_id(), g.nodes, g.connections))
    return out
