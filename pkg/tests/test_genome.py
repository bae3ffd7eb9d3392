import random

import pytest

from novamaze.config import NeatConfig
from novamaze.genome import (
    ConnectionGene,
    Genome,
    InnovationContext,
    NodeGene,
    clone_into_context,
    compatibility_distance,
    crossover,
    genome_from_json_str,
    genome_to_json_str,
    init_genome,
    mutate,
)


def test_init_genome_is_fully_connected_minimal(base_genome):
    assert len(base_genome.nodes) == 13
    assert base_genome.hidden_count() == 0
    assert len(base_genome.connections) == 22
    assert all(c.enabled for c in base_genome.connections)
    pairs = {(c.src, c.dst) for c in base_genome.connections}
    assert pairs == {(s, d) for s in range(11) for d in (11, 12)}
    base_genome.validate()


def test_innovation_numbers_reused_for_identical_links(neat_config, ctx, rng):
    a = init_genome(neat_config, ctx, rng)
    b = init_genome(neat_config, ctx, rng)
    innovations_a = sorted(c.innovation for c in a.connections)
    innovations_b = sorted(c.innovation for c in b.connections)
    assert innovations_a == innovations_b
    assert a.id != b.id


def test_link_innovation_registry_is_stable(ctx):
    first = ctx.link_innovation(3, 11)
    again = ctx.link_innovation(3, 11)
    other = ctx.link_innovation(3, 12)
    assert first == again
    assert other != first


def test_same_split_gets_same_node_and_innovations(ctx):
    a = ctx.split_innovations(2, 11, {0, 1, 2, 11, 12})
    b = ctx.split_innovations(2, 11, {0, 1, 2, 11, 12})
    assert a == b


def test_second_split_of_same_connection_in_one_genome_is_fresh(ctx):
    node, in_innov, out_innov = ctx.split_innovations(2, 11, {2, 11})
    again = ctx.split_innovations(2, 11, {2, 11, node})
    assert again[0] != node
    assert again[1] != in_innov


def test_add_node_bookkeeping(neat_config, ctx, rng):
    genome = init_genome(neat_config, ctx, rng)
    forced = NeatConfig(add_node_prob=1.0, add_link_prob=0.0,
                        remove_link_prob=0.0, weight_mutation_power=0.0)
    child = mutate(genome, forced, ctx, rng)
    assert child.hidden_count() == 1
    assert len(child.connections) == 24
    enabled = child.enabled_connections()
    assert len(enabled) == 23
    disabled = [c for c in child.connections if not c.enabled]
    assert len(disabled) == 1
    old = disabled[0]
    new_node = child.nodes[-1].id
    incoming = next(c for c in enabled if c.dst == new_node)
    outgoing = next(c for c in enabled if c.src == new_node)
    assert incoming.src == old.src
    assert incoming.weight == 1.0
    assert outgoing.dst == old.dst
    assert outgoing.weight == old.weight


def test_mutation_identity_when_all_probabilities_zero(neat_config, ctx, rng):
    genome = init_genome(neat_config, ctx, rng)
    frozen = NeatConfig(add_node_prob=0.0, add_link_prob=0.0,
                        remove_link_prob=0.0, weight_mutation_power=0.0)
    child = mutate(genome, frozen, ctx, rng)
    assert child.same_structure(genome)
    assert child.id != genome.id


def test_add_link_respects_existing_pairs(neat_config, ctx, rng):
    genome = init_genome(neat_config, ctx, rng)
    forced = NeatConfig(add_node_prob=0.0, add_link_prob=1.0,
                        remove_link_prob=0.0, weight_mutation_power=0.0)
    child = mutate(genome, forced, ctx, rng)
    pairs = [(c.src, c.dst) for c in child.connections]
    assert len(pairs) == len(set(pairs))
    child.validate()


def test_weight_jitter_bounded_by_clamp(neat_config, ctx, rng):
    genome = init_genome(neat_config, ctx, rng)
    wild = NeatConfig(add_node_prob=0.0, add_link_prob=0.0,
                      remove_link_prob=0.0, weight_mutation_power=0.8,
                      weight_clamp=1.5)
    g = genome
    for _ in range(40):
        g = mutate(g, wild, ctx, rng)
    assert all(abs(c.weight) <= 1.5 for c in g.connections)


def test_mutation_replay_with_equal_seeds(neat_config):
    def build(seed):
        ctx = InnovationContext()
        rng = random.Random(seed)
        g = init_genome(neat_config, ctx, rng)
        for _ in range(30):
            g = mutate(g, neat_config, ctx, rng)
        return g

    a, b = build(99), build(99)
    assert a.same_structure(b)


def test_crossover_child_has_fitter_parent_structure(neat_config, ctx, rng):
    a = init_genome(neat_config, ctx, rng)
    grow = NeatConfig(add_node_prob=1.0, add_link_prob=0.0,
                      remove_link_prob=0.0, weight_mutation_power=0.0)
    b = mutate(a, grow, ctx, rng)
    child = crossover(a, b, False, ctx, rng)
    assert child.nodes == b.nodes
    assert [c.innovation for c in child.connections] == [
        c.innovation for c in b.connections
    ]


def test_crossover_matching_weights_come_from_either_parent(neat_config, ctx):
    rng = random.Random(7)
    a = init_genome(neat_config, ctx, rng)
    b = Genome(
        ctx.new_genome_id(),
        a.nodes,
        tuple(ConnectionGene(c.innovation, c.src, c.dst, c.weight + 100.0, True)
              for c in a.connections),
    )
    child = crossover(a, b, True, ctx, rng)
    from_a = sum(1 for ca, cc in zip(a.connections, child.connections)
                 if cc.weight == ca.weight)
    from_b = sum(1 for cb, cc in zip(b.connections, child.connections)
                 if cc.weight == cb.weight)
    assert from_a + from_b == len(a.connections)
    assert from_a > 0 and from_b > 0


def test_crossover_disabled_gene_reenable_probability():
    config = NeatConfig()
    rng = random.Random(11)
    reenabled = 0
    trials = 2000
    for _ in range(trials):
        ctx = InnovationContext()
        a = init_genome(config, ctx, rng)
        first = a.connections[0]
        disabled = Genome(
            ctx.new_genome_id(),
            a.nodes,
            (ConnectionGene(first.innovation, first.src, first.dst,
                            first.weight, False),) + a.connections[1:],
        )
        child = crossover(disabled, a, True, ctx, rng, disabled_inherit_prob=0.75)
        if child.connections[0].enabled:
            reenabled += 1
    # Disabled in one parent stays disabled with probability 0.75.
    assert 0.20 < reenabled / trials < 0.30


def test_compatibility_identical_genomes_zero(neat_config, ctx, rng):
    g = init_genome(neat_config, ctx, rng)
    assert compatibility_distance(g, g, neat_config) == 0.0


def test_compatibility_small_genomes_unnormalized(neat_config, ctx, rng):
    # Both genomes under 20 node genes: N = 1, so two extra genes alone
    # give distance 2.0 regardless of matching-gene count.
    a = init_genome(neat_config, ctx, rng)
    node = NodeGene(13, "hidden")
    extra = (
        ConnectionGene(100, 0, 13, 0.5, True),
        ConnectionGene(101, 13, 11, 0.5, True),
    )
    b = Genome(ctx.new_genome_id(), a.nodes + (node,), a.connections + extra)
    assert compatibility_distance(a, b, neat_config) == pytest.approx(2.0)


def test_compatibility_weight_term(neat_config, ctx, rng):
    a = init_genome(neat_config, ctx, rng)
    shifted = tuple(
        ConnectionGene(c.innovation, c.src, c.dst, c.weight + 0.5, c.enabled)
        for c in a.connections
    )
    b = Genome(ctx.new_genome_id(), a.nodes, shifted)
    # Same structure, every weight 0.5 apart: delta = 0.3 * 0.5.
    assert compatibility_distance(a, b, neat_config) == pytest.approx(0.15)


def test_compatibility_large_genomes_normalized(ctx, rng):
    config = NeatConfig(small_genome_nodes=10)
    a = init_genome(config, ctx, rng)
    node = NodeGene(13, "hidden")
    extra = (
        ConnectionGene(100, 0, 13, 0.5, True),
        ConnectionGene(101, 13, 11, 0.5, True),
    )
    b = Genome(ctx.new_genome_id(), a.nodes + (node,), a.connections + extra)
    # 24 connections in the larger genome, 2 mismatched: 2 / 24.
    assert compatibility_distance(a, b, config) == pytest.approx(2.0 / 24.0)


def test_compatibility_symmetric(neat_config, ctx, rng):
    a = init_genome(neat_config, ctx, rng)
    b = mutate(a, neat_config, ctx, rng)
    assert compatibility_distance(a, b, neat_config) == pytest.approx(
        compatibility_distance(b, a, neat_config)
    )


def test_genome_json_roundtrip(neat_config, ctx, rng):
    g = init_genome(neat_config, ctx, rng)
    for _ in range(10):
        g = mutate(g, neat_config, ctx, rng)
    back = genome_from_json_str(genome_to_json_str(g))
    assert back.id == g.id
    assert back.nodes == g.nodes
    assert back.connections == g.connections


def test_genome_validate_rejects_duplicate_innovation(neat_config, ctx, rng):
    g = init_genome(neat_config, ctx, rng)
    dup = g.connections[0]
    bad = Genome(g.id, g.nodes, g.connections + (
        ConnectionGene(dup.innovation, 5, 11, 0.1, True),))
    with pytest.raises(ValueError, match="innovation"):
        bad.validate()


def test_genome_validate_rejects_link_into_sensor(neat_config, ctx, rng):
    g = init_genome(neat_config, ctx, rng)
    bad = Genome(g.id, g.nodes, g.connections + (
        ConnectionGene(999, 11, 3, 0.1, True),))
    with pytest.raises(ValueError, match="sensor"):
        bad.validate()


def test_clone_into_context_preserves_genes_and_advances_counters(neat_config):
    ctx_a = InnovationContext()
    rng = random.Random(5)
    g = init_genome(neat_config, ctx_a, rng)
    for _ in range(8):
        g = mutate(g, neat_config, ctx_a, rng)

    ctx_b = InnovationContext()
    (clone,) = clone_into_context([g], ctx_b)
    assert clone.nodes == g.nodes
    assert clone.connections == g.connections
    # New structural events in the fresh context cannot collide with the
    # imported genes.
    fresh = ctx_b.link_innovation(0, 999999)
    assert fresh > max(c.innovation for c in g.connections)
