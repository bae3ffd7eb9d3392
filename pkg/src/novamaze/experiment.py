"""Batch experiment runner: seeded run grids over modes and maps, durable
run-record storage, per-run scatter data, and the aggregate CSV table."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .config import EngineConfig
from .engine import AggregateStats, RunRecord, run_search, run_statistics
from .maze import MazeMap, get_map
from .session import run_scripted_session

PLAN_MODES = ("fitness", "novelty", "waypoint", "naiec-scripted")

CSV_COLUMNS = ("mode", "map", "runs", "successes", "mean_evals", "sd_evals",
               "mean_hidden", "sd_hidden", "mean_seconds")


class RecordStore:
    """Directory of run records, one JSON file per record id.

    save() is atomic and durable: the record is written to a temp file,
    fsynced, and renamed into place before returning.
    """

    def __init__(self, directory: str | os.PathLike) -> None:
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def path_for(self, record_id: str) -> Path:
        return self.directory / f"{record_id}.json"

    def save(self, record: RunRecord) -> Path:
        target = self.path_for(record.record_id)
        tmp = target.with_suffix(".json.tmp")
        payload = json.dumps(record.to_json(), sort_keys=True).encode()
        with open(tmp, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, target)
        return target

    def load(self, record_id: str) -> RunRecord:
        with open(self.path_for(record_id), "rb") as fh:
            return RunRecord.from_json(json.load(fh))

    def record_ids(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))

    def load_all(self) -> list[RunRecord]:
        return [self.load(rid) for rid in self.record_ids()]


@dataclass
class PlanItem:
    mode: str
    map_name: str
    runs: int
    budget: int = 250000
    base_seed: int = 0

    def seeds(self) -> list[int]:
        return [self.base_seed + i for i in range(self.runs)]


@dataclass
class ExperimentPlan:
    items: list[PlanItem]
    out_dir: str | os.PathLike
    policy: str = "waypoint-oracle"

    def validate(self) -> None:
        if not self.items:
            raise ValueError("plan has no items")
        seen: set[tuple[str, str, int]] = set()
        for item in self.items:
            if item.mode not in PLAN_MODES:
                raise ValueError(f"unknown mode {item.mode!r}")
            if item.runs < 1:
                raise ValueError("run count must be >= 1")
            if item.budget < 1:
                raise ValueError("budget must be >= 1")
            for seed in item.seeds():
                key = (item.mode, item.map_name, seed)
                if key in seen:
                    raise ValueError(f"duplicate run {key} in plan")
                seen.add(key)


@dataclass
class RunFailure:
    mode: str
    map_name: str
    seed: int
    error: str


@dataclass
class ExperimentResult:
    stats: dict[tuple[str, str], AggregateStats]
    records: dict[tuple[str, str], list[RunRecord]]
    failures: list[RunFailure] = field(default_factory=list)
    csv_path: Path | None = None


def _one_run(item: PlanItem, seed: int, maze: MazeMap,
             config: EngineConfig) -> RunRecord:
    if item.mode == "naiec-scripted":
        session_config = dataclasses.replace(
            config,
            session=dataclasses.replace(config.session, budget=item.budget),
        )
        return run_scripted_session("waypoint-oracle", maze,
                                    session_config, seed=seed)
    return run_search(item.mode, maze, config, budget=item.budget, seed=seed)


def write_scatter(record: RunRecord, directory: Path) -> Path:
    """Per-run final-position scatter: one x,y row per evaluation."""
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{record.record_id}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("x", "y"))
        writer.writerows(record.final_positions)
    return path


def stats_rows(groups: dict[tuple[str, str], list[RunRecord]]) -> list[dict]:
    rows = []
    for (mode, map_name), records in sorted(groups.items()):
        stats = run_statistics(records)
        row = {"mode": mode, "map": map_name}
        row.update(stats.to_row())
        rows.append(row)
    return rows


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row.get(k))
                         for k in CSV_COLUMNS})
    return buf.getvalue()


def group_records(records: list[RunRecord]) -> dict[tuple[str, str], list[RunRecord]]:
    groups: dict[tuple[str, str], list[RunRecord]] = {}
    for record in records:
        groups.setdefault((record.mode, record.map_name), []).append(record)
    return groups


def run_experiment(
    plan: ExperimentPlan,
    config: EngineConfig | None = None,
    *,
    maps_dir: str | os.PathLike | None = None,
    on_record: Callable[[RunRecord], None] | None = None,
) -> ExperimentResult:
    """Execute every planned run, persist records and scatter files, and
    write the aggregate table. One failed run is recorded and skipped; the
    rest of the grid still runs."""
    plan.validate()
    config = config if config is not None else EngineConfig()
    out_dir = Path(plan.out_dir)
    store = RecordStore(out_dir / "records")
    scatter_dir = out_dir / "scatter"
    result = ExperimentResult(stats={}, records={})
    for item in plan.items:
        maze = get_map(item.map_name, directory=maps_dir)
        for seed in item.seeds():
            try:
                record = _one_run(item, seed, maze, config)
            except Exception as exc:  # noqa: BLE001 - isolate per-run failures
                result.failures.append(
                    RunFailure(item.mode, item.map_name, seed, repr(exc)))
                continue
            store.save(record)
            write_scatter(record, scatter_dir)
            key = (record.mode, record.map_name)
            result.records.setdefault(key, []).append(record)
            if on_record is not None:
                on_record(record)
    groups = result.records
    for key, records in sorted(groups.items()):
        result.stats[key] = run_statistics(records)
    rows = stats_rows(groups)
    csv_text = render_csv(rows)
    csv_path = out_dir / "stats.csv"
    csv_path.write_text(csv_text)
    if result.failures:
        failures_path = out_dir / "failures.json"
        failures_path.write_text(json.dumps(
            [dataclasses.asdict(f) for f in result.failures], indent=2))
    result.csv_path = csv_path
    return result


def stats_from_directory(directory: str | os.PathLike) -> str:
    """Aggregate a record directory into the CSV table (the `stats` command).

    Accepts either an experiment output directory (with a records/ inside)
    or a bare record directory.
    """
    root = Path(directory)
    record_dir = root / "records" if (root / "records").is_dir() else root
    store = RecordStore(record_dir)
    records = store.load_all()
    if not records:
        raise ValueError(f"no run records found under {root}")
    return render_csv(stats_rows(group_records(records)))
