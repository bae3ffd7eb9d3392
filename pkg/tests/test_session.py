"""Interactive session protocol: selection, the three operations, restart,
publish, and the scripted selectors that drive it headless."""

import dataclasses
import json
import random
import threading

import pytest

from novamaze.config import EngineConfig, NoveltyConfig, SessionConfig
from novamaze.genome import ConnectionGene, Genome, NodeGene
from novamaze.maze import box_walls, load_map
from novamaze.session import (
    AWAITING,
    BUDGET_EXHAUSTED,
    SOLVED,
    Session,
    SessionError,
    create_session,
    run_scripted_session,
    scripted_select,
)


def corridor_map():
    return load_map({
        "version": 1, "name": "corridor", "bounds": [300, 40],
        "start": [10, 20, 0.0], "goal": [290, 20],
        "waypoints": [[50, 20], [90, 20], [130, 20], [170, 20]],
        "walls": box_walls(300, 40),
    })


def session_config(screen=4, pool=8, budget=20000, seed=0):
    cfg = EngineConfig()
    cfg.session = SessionConfig(screen_size=screen, pool_size=pool,
                                budget=budget, map_name="corridor", seed=seed)
    return cfg


def make_session(**kwargs):
    return Session(session_config(**kwargs), corridor_map())


def test_create_spends_one_screen():
    s = make_session()
    assert s.evaluations_used == 4
    assert len(s.population) == 4
    assert s.status == AWAITING
    assert s.selected == []


def test_create_needs_budget_for_screen():
    with pytest.raises(ValueError, match="budget must cover"):
        make_session(screen=4, budget=3)


def test_select_orders_dedupes_and_spends_nothing():
    s = make_session()
    ids = s.screen_ids()
    before = s.evaluations_used
    s.select([ids[2], ids[0], ids[2]])
    assert s.selected == [ids[0], ids[2]]  # screen order, duplicate dropped
    assert s.evaluations_used == before
    assert s.events[-1]["op"] == "select"


def test_select_rejects_unknown_and_empty():
    s = make_session()
    with pytest.raises(SessionError, match="not on screen"):
        s.select([999999])
    with pytest.raises(SessionError, match="nonempty"):
        s.select([])


def test_step_keeps_parents_fills_with_offspring():
    s = make_session()
    ids = s.screen_ids()
    parents = [o for o in s.population if o.genome.id in ids[:2]]
    before = s.evaluations_used
    s.select(ids[:2])
    s.step_op()
    assert s.evaluations_used == before + 2  # screen 4, parents 2
    assert s.population[0] is parents[0]
    assert s.population[1] is parents[1]
    fresh = s.population[2:]
    assert all(o.genome.id not in set(ids) for o in fresh)
    assert s.selected == []


def test_step_single_parent_mutates_only():
    s = make_session()
    lone = s.screen_ids()[0]
    s.select([lone])
    s.step_op()
    assert s.evaluations_used == 4 + 3
    assert s.population[0].genome.id == lone
    assert len(s.population) == 4


def test_step_requires_selection_and_budget():
    s = make_session()
    with pytest.raises(SessionError, match="selection"):
        s.step_op()
    tight = make_session(screen=4, budget=6)
    tight.select(tight.screen_ids()[:1])
    with pytest.raises(SessionError, match="budget"):
        tight.step_op()


def test_novelty_op_fills_screen_with_most_novel():
    s = make_session()
    s.select(s.screen_ids()[:2])
    s.novelty_op()
    assert len(s.population) == 4
    novs = [o.novelty for o in s.population]
    assert all(n is not None for n in novs)
    assert novs == sorted(novs, reverse=True)
    assert s.selected == []
    assert s.status == AWAITING
    assert len(s.archive) >= 4


def test_novelty_op_stop_leaves_screen():
    s = make_session()
    screen_before = list(s.population)
    evals_before = s.evaluations_used
    stop = threading.Event()
    stop.set()
    s.select(s.screen_ids()[:2])
    s.novelty_op(stop=stop)
    assert s.population == screen_before
    assert s.evaluations_used == evals_before
    assert s.status == AWAITING


def test_novelty_op_stingy_cap_decays_until_quota():
    # Threshold above the map diagonal: nothing archives until forced decay
    # at the per-call cap grinds it down into reachable range.
    cfg = session_config()
    cfg.session = dataclasses.replace(cfg.session, novelty_op_cap=100)
    cfg.novelty = NoveltyConfig(initial_threshold=400.0, adjust_every=10 ** 9)
    s = Session(cfg, corridor_map())
    rho_before = s.archive.rho_min
    s.select(s.screen_ids()[:2])
    s.novelty_op()
    assert len(s.archive) >= 4
    assert s.archive.rho_min < rho_before


def test_optimize_op_solves_corridor_and_ends_session():
    s = make_session()
    s.select(s.screen_ids()[:2])
    s.optimize_op()
    assert s.status == SOLVED
    assert s.solution is not None
    assert s.first_solve_evals is not None
    assert s.first_solve_evals <= s.evaluations_used
    assert any(o.solved for o in s.population)
    s.select(s.screen_ids()[:1])  # selection stays free after solving
    with pytest.raises(SessionError, match="requires status"):
        s.step_op()


def test_optimize_pads_screen_from_previous_population():
    s = make_session(budget=4 + 3)
    old = list(s.population)
    s.select(s.screen_ids()[:1])
    s.optimize_op()
    assert len(s.population) == 4
    leftover = [o for o in s.population if o in old]
    assert leftover, "padding must reuse prior screen members"


def test_restart_fresh_screen_keeps_archive_and_ledger():
    s = make_session()
    before_ids = set(s.screen_ids())
    archive_len = len(s.archive)
    evals = s.evaluations_used
    s.restart()
    assert s.restarts == 1
    assert set(s.screen_ids()).isdisjoint(before_ids)
    assert s.evaluations_used == evals + 4
    assert len(s.archive) >= archive_len
    assert s.events[-1]["op"] == "restart"


def test_publish_twice_distinct_ids_same_fingerprint():
    s = make_session(seed=5)
    s.select(s.screen_ids()[:2])
    s.step_op()
    first = s.publish()
    second = s.publish()
    assert first.record_id == "naiec-corridor-s5-p1"
    assert second.record_id == "naiec-corridor-s5-p2"
    assert first.mode == second.mode == "naiec"
    a = json.loads(first.fingerprint())
    b = json.loads(second.fingerprint())
    for doc in (a, b):
        doc.pop("record_id")
    assert a == b


def test_publish_events_exclude_publish_ops():
    s = make_session()
    s.publish()
    record = s.publish()
    assert all(e["op"] != "publish" for e in record.events)
    assert len([e for e in s.events if e["op"] == "publish"]) == 2


def test_budget_exhaustion_blocks_operations():
    s = make_session(screen=4, budget=4)
    assert s.status == BUDGET_EXHAUSTED
    with pytest.raises(SessionError, match="requires status"):
        s.select(s.screen_ids())
        s.step_op()


def test_event_log_monotonic_and_jsonl():
    s = make_session()
    s.select(s.screen_ids()[:2])
    s.step_op()
    s.select(s.screen_ids()[:1])
    s.step_op()
    marks = [(e["evals_before"], e["evals_after"]) for e in s.events]
    flat = [v for pair in marks for v in pair]
    assert flat == sorted(flat)
    lines = s.events_jsonl().splitlines()
    assert len(lines) == len(s.events)
    for line in lines:
        assert "op" in json.loads(line)


def test_create_session_resolves_map(tmp_path):
    doc = {
        "version": 1, "name": "pocket", "bounds": [200, 200],
        "start": [20, 20, 0.0], "goal": [180, 180],
        "waypoints": [], "walls": box_walls(200, 200),
    }
    (tmp_path / "pocket.maze.json").write_text(json.dumps(doc))
    cfg = session_config()
    cfg.session = dataclasses.replace(cfg.session, map_name="pocket")
    s = create_session(cfg, maps_dir=tmp_path)
    assert s.maze.name == "pocket"
    assert s.evaluations_used == 4


def test_scripted_select_greedy_goal_by_distance():
    s = make_session()
    gx, gy = s.maze.goal
    dists = [((o.behavior[0] - gx) ** 2 + (o.behavior[1] - gy) ** 2, i)
             for i, o in enumerate(s.population)]
    want = sorted(i for _, i in sorted(dists)[:2])
    got = scripted_select("greedy-goal", s, random.Random(0))
    assert got == [s.population[i].genome.id for i in want]


def test_scripted_select_random_subset_on_screen():
    s = make_session()
    got = scripted_select("random", s, random.Random(1), count=3)
    assert len(got) == 3
    assert set(got) <= set(s.screen_ids())
    order = {gid: i for i, gid in enumerate(s.screen_ids())}
    assert [order[g] for g in got] == sorted(order[g] for g in got)


def test_scripted_select_waypoint_oracle_uses_progress():
    from novamaze.sim import waypoint_fitness

    s = make_session()
    scores = [waypoint_fitness(o.trajectory, s.maze,
                               s.config.simulation.solve_radius)
              for o in s.population]
    ranked = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    want = sorted(ranked[:2])
    got = scripted_select("waypoint-oracle", s, random.Random(0))
    assert got == [s.population[i].genome.id for i in want]


def test_scripted_select_unknown_policy():
    s = make_session()
    with pytest.raises(ValueError, match="unknown policy"):
        scripted_select("psychic", s, random.Random(0))


def test_scripted_session_solves_corridor():
    record = run_scripted_session("waypoint-oracle", corridor_map(),
                                  session_config(), seed=3)
    assert record.solved
    assert record.mode == "naiec"
    assert record.record_id == "naiec-corridor-s3-p1"
    assert record.events, "session record must carry its event log"
    record.validate(corridor_map())


def test_scripted_session_determinism():
    a = run_scripted_session("greedy-goal", corridor_map(),
                             session_config(), seed=11)
    b = run_scripted_session("greedy-goal", corridor_map(),
                             session_config(), seed=11)
    assert a.fingerprint() == b.fingerprint()
