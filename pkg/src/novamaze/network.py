"""Phenotype decoding and synchronous recurrent activation.

Node slots hold activations in [-0.5, 0.5]. One activate() call performs a
single full-network pass in which every non-input node reads the *previous*
activations of its sources, so recurrent links act with a one-step delay and
the result is independent of node ordering.
"""

from __future__ import annotations

import math

from .genome import FIXED_NODE_COUNT, Genome, N_SENSORS

SIGMOID_SLOPE = 4.9
# Beyond this argument magnitude exp() would overflow; the sigmoid is fully
# saturated there anyway. The compiled kernel uses the same cutoff so both
# implementations return bit-identical activations.
EXP_CUTOFF = 700.0


def steep_sigmoid(z: float) -> float:
    """Shifted steep sigmoid: 1/(1 + e^(-4.9 z)) - 0.5, range [-0.5, 0.5]."""
    x = -SIGMOID_SLOPE * z
    if x > EXP_CUTOFF:
        return -0.5
    return 1.0 / (1.0 + math.exp(x)) - 0.5


class Network:
    """Executable phenotype with per-episode mutable state.

    One instance belongs to one evaluator at a time; create separate
    instances to run episodes concurrently.
    """

    __slots__ = ("n_nodes", "link_src", "link_dst", "link_weight", "activations")

    def __init__(
        self,
        n_nodes: int,
        link_src: list[int],
        link_dst: list[int],
        link_weight: list[float],
    ) -> None:
        self.n_nodes = n_nodes
        self.link_src = link_src
        self.link_dst = link_dst
        self.link_weight = link_weight
        self.activations = [0.0] * n_nodes

    def reset(self) -> None:
        for i in range(self.n_nodes):
            self.activations[i] = 0.0

    def activate(self, sensors: list[float]) -> tuple[float, float]:
        """One synchronous pass; returns (turn, velocity), each in [-0.5, 0.5]."""
        if len(sensors) != N_SENSORS:
            raise ValueError(f"expected {N_SENSORS} sensor values, got {len(sensors)}")
        acts = self.activations
        acts[0] = 0.5  # bias input 1.0, shifted into node range
        for i in range(N_SENSORS):
            value = sensors[i]
            if not math.isfinite(value):
                raise ValueError(f"sensor {i} is not finite")
            acts[i + 1] = value - 0.5
        sums = [0.0] * self.n_nodes
        src, dst, weight = self.link_src, self.link_dst, self.link_weight
        for j in range(len(src)):
            sums[dst[j]] += weight[j] * acts[src[j]]
        for node in range(11, self.n_nodes):
            acts[node] = steep_sigmoid(sums[node])
        return acts[11], acts[12]


def build_phenotype(genome: Genome) -> Network:
    """Decode a genome: one slot per node gene, one link per enabled connection.

    Slot order is fixed for the interface nodes (bias 0, sensors 1-10,
    outputs 11-12); hidden nodes take slots 13+ in genome order.
    """
    slot: dict[int, int] = {}
    next_slot = FIXED_NODE_COUNT
    for node in genome.nodes:
        if node.id < FIXED_NODE_COUNT:
            slot[node.id] = node.id
        else:
            slot[node.id] = next_slot
            next_slot += 1
    link_src, link_dst, link_weight = [], [], []
    for c in genome.connections:
        if not c.enabled:
            continue
        link_src.append(slot[c.src])
        link_dst.append(slot[c.dst])
        link_weight.append(c.weight)
    return Network(next_slot, link_src, link_dst, link_weight)
