"""Batch harness: durable record storage, plan validation, grid execution,
and the aggregate CSV table."""

import csv
import json

import pytest

from novamaze.config import EngineConfig, NeatConfig, SessionConfig
from novamaze.engine import RunRecord, run_search
from novamaze.experiment import (
    CSV_COLUMNS,
    ExperimentPlan,
    PlanItem,
    RecordStore,
    group_records,
    render_csv,
    run_experiment,
    stats_from_directory,
    stats_rows,
    write_scatter,
)
from novamaze.maze import box_walls


OPEN_DOC = {
    "version": 1, "name": "open", "bounds": [200, 200],
    "start": [30, 30, 0.0], "goal": [170, 170],
    "waypoints": [[100, 100]], "walls": box_walls(200, 200),
}


@pytest.fixture
def maps_dir(tmp_path):
    d = tmp_path / "maps"
    d.mkdir()
    (d / "open.maze.json").write_text(json.dumps(OPEN_DOC))
    return d


def quick_config():
    cfg = EngineConfig()
    cfg.neat = NeatConfig(population_size=12)
    cfg.session = SessionConfig(screen_size=4, pool_size=12, budget=3000,
                                map_name="open")
    return cfg


def sample_record(seed=0, budget=60):
    from novamaze.maze import load_map

    return run_search("fitness", load_map(OPEN_DOC), quick_config(),
                      budget=budget, seed=seed)


def test_store_save_load_roundtrip(tmp_path):
    store = RecordStore(tmp_path / "records")
    record = sample_record()
    path = store.save(record)
    assert path.name == f"{record.record_id}.json"
    back = store.load(record.record_id)
    assert back.fingerprint() == record.fingerprint()
    assert store.record_ids() == [record.record_id]


def test_store_save_leaves_no_temp_files(tmp_path):
    store = RecordStore(tmp_path)
    store.save(sample_record())
    leftovers = list(tmp_path.glob("*.tmp"))
    assert leftovers == []


def test_store_overwrite_same_id(tmp_path):
    store = RecordStore(tmp_path)
    record = sample_record()
    store.save(record)
    record.evaluations_used = 1
    store.save(record)
    assert store.load(record.record_id).evaluations_used == 1
    assert len(store.record_ids()) == 1


def test_plan_validation():
    ok = ExperimentPlan(
        items=[PlanItem("fitness", "open", runs=2, budget=100)],
        out_dir="unused")
    ok.validate()
    with pytest.raises(ValueError, match="no items"):
        ExperimentPlan(items=[], out_dir="x").validate()
    with pytest.raises(ValueError, match="unknown mode"):
        ExperimentPlan(items=[PlanItem("magic", "open", 1)],
                       out_dir="x").validate()
    with pytest.raises(ValueError, match="run count"):
        ExperimentPlan(items=[PlanItem("fitness", "open", 0)],
                       out_dir="x").validate()
    with pytest.raises(ValueError, match="budget"):
        ExperimentPlan(items=[PlanItem("fitness", "open", 1, budget=0)],
                       out_dir="x").validate()


def test_plan_rejects_overlapping_seeds():
    items = [
        PlanItem("fitness", "open", runs=3, budget=100, base_seed=0),
        PlanItem("fitness", "open", runs=2, budget=100, base_seed=2),
    ]
    with pytest.raises(ValueError, match="duplicate run"):
        ExperimentPlan(items=items, out_dir="x").validate()


def test_run_experiment_grid(tmp_path, maps_dir):
    plan = ExperimentPlan(
        items=[
            PlanItem("fitness", "open", runs=2, budget=60),
            PlanItem("novelty", "open", runs=2, budget=60),
        ],
        out_dir=tmp_path / "out")
    result = run_experiment(plan, quick_config(), maps_dir=maps_dir)
    assert not result.failures
    assert set(result.records) == {("fitness", "open"), ("novelty", "open")}
    for records in result.records.values():
        assert len(records) == 2
        for record in records:
            assert (tmp_path / "out" / "records"
                    / f"{record.record_id}.json").exists()
            scatter = tmp_path / "out" / "scatter" / f"{record.record_id}.csv"
            assert scatter.exists()
    assert result.csv_path.exists()


def test_run_experiment_csv_columns(tmp_path, maps_dir):
    plan = ExperimentPlan(
        items=[PlanItem("fitness", "open", runs=1, budget=60)],
        out_dir=tmp_path / "out")
    result = run_experiment(plan, quick_config(), maps_dir=maps_dir)
    with open(result.csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert rows[0]["mode"] == "fitness"
    assert rows[0]["map"] == "open"
    assert rows[0]["runs"] == "1"


def test_run_experiment_scripted_sessions(tmp_path, maps_dir):
    plan = ExperimentPlan(
        items=[PlanItem("naiec-scripted", "open", runs=1, budget=2000)],
        out_dir=tmp_path / "out")
    result = run_experiment(plan, quick_config(), maps_dir=maps_dir)
    assert not result.failures
    records = result.records[("naiec", "open")]
    assert records[0].events
    assert records[0].evaluations_used <= 2000


def test_run_experiment_isolates_failures(tmp_path, maps_dir):
    plan = ExperimentPlan(
        items=[
            PlanItem("waypoint", "open", runs=1, budget=5),
            PlanItem("fitness", "open", runs=1, budget=60),
        ],
        out_dir=tmp_path / "out")
    result = run_experiment(plan, quick_config(), maps_dir=maps_dir)
    assert len(result.failures) == 1
    assert result.failures[0].mode == "waypoint"
    assert ("fitness", "open") in result.records
    assert (tmp_path / "out" / "failures.json").exists()


def test_write_scatter_rows(tmp_path):
    record = sample_record(budget=40)
    path = write_scatter(record, tmp_path / "scatter")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "y"]
    assert len(rows) - 1 == len(record.final_positions)
    assert float(rows[1][0]) == pytest.approx(record.final_positions[0][0])


def test_stats_rows_none_rendered_empty():
    record = sample_record(budget=60)
    record.solved = False
    rows = stats_rows(group_records([record]))
    text = render_csv(rows)
    parsed = list(csv.DictReader(text.splitlines()))
    assert parsed[0]["mean_evals"] == ""
    assert parsed[0]["successes"] == "0"


def test_stats_from_directory_both_layouts(tmp_path):
    out = tmp_path / "out"
    store = RecordStore(out / "records")
    store.save(sample_record(seed=1))
    store.save(sample_record(seed=2))
    via_root = stats_from_directory(out)
    via_records = stats_from_directory(out / "records")
    assert via_root == via_records
    parsed = list(csv.DictReader(via_root.splitlines()))
    assert parsed[0]["runs"] == "2"


def test_stats_from_directory_empty_rejected(tmp_path):
    with pytest.raises(ValueError, match="no run records"):
        stats_from_directory(tmp_path)
