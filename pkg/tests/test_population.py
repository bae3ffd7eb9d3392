import math
import random

import pytest
from hypothesis import given, strategies as st

from novamaze.config import NeatConfig
from novamaze.genome import (
    ConnectionGene,
    Genome,
    InnovationContext,
    clone_into_context,
    compatibility_distance,
    init_genome,
    mutate,
)
from novamaze.population import (
    Population,
    _largest_remainder,
    reproduce,
    speciate,
)


def frozen_config(**kw):
    """NEAT config with all mutation disabled so lineages keep structure."""
    base = dict(population_size=10, add_node_prob=0.0, add_link_prob=0.0,
                remove_link_prob=0.0, weight_mutation_power=0.0)
    base.update(kw)
    return NeatConfig(**base)


_ids = iter(range(1000, 10**9))


def shift_weights(genome, delta, ids=None):
    conns = tuple(
        ConnectionGene(c.innovation, c.src, c.dst,
                       c.weight + (delta if ids is None or c.innovation in ids
                                   else 0.0), c.enabled)
        for c in genome.connections)
    return Genome(next(_ids), genome.nodes, conns)


def oracle_quotas(weights, total):
    s = sum(weights)
    raw = [w / s * total for w in weights]
    quotas = [math.floor(r) for r in raw]
    order = sorted(range(len(raw)),
                   key=lambda i: (raw[i] - quotas[i], -i), reverse=True)
    for i in order[: total - sum(quotas)]:
        quotas[i] += 1
    return quotas


def test_largest_remainder_exact_division():
    assert _largest_remainder([1.0, 1.0, 2.0], 8) == [2, 2, 4]


def test_largest_remainder_assigns_shortfall_by_fraction():
    # raw shares 7.2 / 1.8: the .8 fraction wins the leftover slot
    assert _largest_remainder([2.0, 0.5], 9) == [7, 2]


def test_largest_remainder_tie_prefers_earlier_entry():
    assert _largest_remainder([1.0, 1.0], 9) == [5, 4]


def test_largest_remainder_zero_weight_gets_nothing():
    assert _largest_remainder([1.0, 1.0, 0.0], 5) == [3, 2, 0]


@given(st.lists(st.floats(min_value=0.001, max_value=100.0),
                min_size=1, max_size=8),
       st.integers(min_value=0, max_value=300))
def test_largest_remainder_matches_oracle(weights, total):
    got = _largest_remainder(weights, total)
    assert got == oracle_quotas(weights, total)
    assert sum(got) == total
    s = sum(weights)
    for q, w in zip(got, weights):
        assert abs(q - w / s * total) < 1.0


def test_speciate_identical_genomes_share_one_species(base_genome, neat_config):
    pop = [shift_weights(base_genome, 0.0) for _ in range(5)]
    parts = speciate(pop, neat_config, [])
    assert len(parts) == 1
    sid, group = parts[0]
    assert sid == 1
    assert len(group) == 5


def test_speciate_weight_shift_below_threshold_joins(base_genome, neat_config):
    # distance = 0.3 * 0.5 = 0.15 < 0.2
    near = shift_weights(base_genome, 0.5)
    parts = speciate([base_genome, near], neat_config, [])
    assert len(parts) == 1


def test_speciate_boundary_distance_founds_new_species(base_genome):
    # modifier 1.0 and shift 0.5 give distance exactly 0.5, not < 0.5
    config = frozen_config(speciation_threshold=0.5,
                           compatibility_modifier=1.0)
    far = shift_weights(base_genome, 0.5)
    assert compatibility_distance(base_genome, far, config) == 0.5
    parts = speciate([base_genome, far], config, [])
    assert len(parts) == 2


def test_speciate_first_fit_takes_earliest_species(base_genome, neat_config):
    reps = [(7, base_genome), (9, shift_weights(base_genome, 0.05))]
    # compatible with both representatives; first listed wins
    parts = speciate([shift_weights(base_genome, 0.02)], neat_config, reps,
                     first_new_id=10)
    assert [sid for sid, _ in parts] == [7]


def test_speciate_drops_empty_species_and_numbers_new_ones(base_genome):
    config = frozen_config()
    grown = base_genome
    ctx = InnovationContext()
    clone_into_context([base_genome], ctx)
    rng = random.Random(5)
    forced = NeatConfig(add_node_prob=1.0, add_link_prob=0.0,
                        remove_link_prob=0.0, weight_mutation_power=0.0)
    grown = mutate(grown, forced, ctx, rng)
    parts = speciate([grown, base_genome], config,
                     [(3, shift_weights(base_genome, 4.0))], first_new_id=4)
    # rep species 3 is empty (both founped new ones): dropped
    assert [sid for sid, _ in parts] == [4, 5]
    assert [len(g) for _, g in parts] == [1, 1]


def test_speciate_empty_population_rejected(neat_config):
    with pytest.raises(ValueError):
        speciate([], neat_config, [])


def grow_distinct(base, ctx, rng):
    """A genome one hidden node away from base, so species never merge."""
    forced = NeatConfig(add_node_prob=1.0, add_link_prob=0.0,
                        remove_link_prob=0.0, weight_mutation_power=0.0)
    return mutate(base, forced, ctx, rng)


def test_reproduce_counts_and_elitism(base_genome, neat_config):
    config = frozen_config()
    ctx = InnovationContext()
    clone_into_context([base_genome], ctx)
    rng = random.Random(2)
    group = [shift_weights(base_genome, 0.001 * i) for i in range(4)]
    scores = {g.id: float(i) for i, g in enumerate(group)}
    out = reproduce([(1, group)], scores, config, ctx, rng)
    assert len(out) == config.population_size
    assert out[0] is group[-1]


def test_reproduce_quota_proportional_to_mean_over_size(base_genome):
    config = frozen_config()
    ctx = InnovationContext()
    clone_into_context([base_genome], ctx)
    rng = random.Random(3)
    small = [shift_weights(base_genome, 0.0001 * i) for i in range(2)]
    big_seed = grow_distinct(base_genome, ctx, rng)
    big = [shift_weights(big_seed, 0.0001 * i) for i in range(2)]
    scores = {g.id: 4.0 for g in small}
    scores.update({g.id: 1.0 for g in big})
    out = reproduce([(1, small), (2, big)], scores, config, ctx, rng)
    # weights 2.0 vs 0.5 over 9 slots: quotas 7 and 2, plus the elite
    n_small = sum(1 for g in out if len(g.nodes) == 13)
    n_big = sum(1 for g in out if len(g.nodes) == 14)
    assert (n_small, n_big) == (8, 2)


def test_reproduce_stagnant_species_zeroed_unless_elite(base_genome):
    config = frozen_config()
    ctx = InnovationContext()
    clone_into_context([base_genome], ctx)
    rng = random.Random(4)
    a = [shift_weights(base_genome, 0.0001 * i) for i in range(2)]
    b_seed = grow_distinct(base_genome, ctx, rng)
    b = [shift_weights(b_seed, 0.0001 * i) for i in range(2)]
    scores = {g.id: 1.0 for g in a}
    scores.update({g.id: 5.0 for g in b})
    out = reproduce([(1, a), (2, b)], scores, config, ctx, rng,
                    stagnant=frozenset({1, 2}))
    # species 2 holds the elite so its stagnation is waived; species 1 dies
    assert all(len(g.nodes) == 14 for g in out)


def test_reproduce_all_zero_scores_degrade_to_uniform(base_genome):
    config = frozen_config()
    ctx = InnovationContext()
    clone_into_context([base_genome], ctx)
    rng = random.Random(5)
    a = [shift_weights(base_genome, 0.0001 * i) for i in range(2)]
    b_seed = grow_distinct(base_genome, ctx, rng)
    b = [shift_weights(b_seed, 0.0001 * i) for i in range(2)]
    scores = {g.id: 0.0 for g in a + b}
    out = reproduce([(1, a), (2, b)], scores, config, ctx, rng)
    n_a = sum(1 for g in out if len(g.nodes) == 13)
    n_b = sum(1 for g in out if len(g.nodes) == 14)
    # uniform split of 9 slots is 5/4, plus the elite drawn from species 1
    assert (n_a, n_b) == (6, 4)


def test_reproduce_parents_come_from_top_half_only(base_genome):
    config = frozen_config()
    marker = {base_genome.connections[0].innovation}
    group = [shift_weights(base_genome, 0.0001 * i) for i in range(2)]
    group += [shift_weights(shift_weights(base_genome, 100.0, marker),
                            0.0001 * i) for i in range(2)]
    scores = {g.id: float(10 - i) for i, g in enumerate(group)}
    for seed in range(20):
        ctx = InnovationContext()
        clone_into_context([base_genome], ctx)
        out = reproduce([(1, group)], scores, config, ctx,
                        random.Random(seed))
        for child in out:
            assert all(abs(c.weight) < 50.0 for c in child.connections)


def test_reproduce_rejects_bad_scores(base_genome, neat_config, ctx, rng):
    group = [base_genome]
    for bad in (float("nan"), float("inf"), -0.1):
        with pytest.raises(ValueError):
            reproduce([(1, group)], {base_genome.id: bad},
                      neat_config, ctx, rng)
    with pytest.raises(ValueError):
        reproduce([], {}, neat_config, ctx, rng)


def test_population_advance_rolls_generations(base_genome):
    config = frozen_config()
    ctx = InnovationContext()
    rng = random.Random(9)
    members = [init_genome(config, ctx, rng) for _ in range(10)]
    pop = Population(config, ctx, rng, members)
    for expected_gen in range(1, 4):
        scores = {g.id: 1.0 for g in pop.members}
        out = pop.advance(scores)
        assert out is pop.members
        assert len(out) == 10
        assert pop.generation == expected_gen
        assert len(pop.species) >= 1


def test_population_culls_species_after_stagnation(base_genome):
    config = frozen_config(stagnation_rounds=3)
    ctx = InnovationContext()
    clone_into_context([base_genome], ctx)
    rng = random.Random(10)
    b_seed = grow_distinct(base_genome, ctx, rng)
    members = [shift_weights(base_genome, 0.0001 * i) for i in range(5)]
    members += [shift_weights(b_seed, 0.0001 * i) for i in range(5)]
    pop = Population(config, ctx, rng, members)
    tick = [0.0]

    def score(g):
        # species A (13 nodes) keeps improving, species B never does
        if len(g.nodes) == 13:
            tick[0] += 1.0
            return 10.0 + tick[0]
        return 5.0

    for _ in range(6):
        pop.advance({g.id: score(g) for g in pop.members})
    assert all(len(g.nodes) == 13 for g in pop.members)
    assert len(pop.species) == 1
