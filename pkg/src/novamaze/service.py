"""HTTP + WebSocket service for live interactive sessions.

Commands are plain JSON request/response endpoints mapping 1:1 onto session
operations; long-running Novelty/Optimize searches run on a worker thread per
session and report through a push channel as {type, session, evals, payload}
messages. Operations on one session are serialized; cancel is always allowed.
"""

from __future__ import annotations

import asyncio
import dataclasses
import threading
import uuid
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .config import EngineConfig
from .experiment import RecordStore
from .maze import MapError, get_map, list_maps
from .session import RUNNING_NOVELTY, RUNNING_OPTIMIZE, Session, SessionError, create_session

TRAIL_POINTS = 200


class SessionHandle:
    """One live session plus its worker state and push subscribers."""

    def __init__(self, session_id: str, session: Session) -> None:
        self.id = session_id
        self.session = session
        self.lock = threading.Lock()
        self.worker: threading.Thread | None = None
        self.stop = threading.Event()
        # Set the instant the op stops mutating the session; the worker
        # thread outlives it slightly to send the final push messages.
        self.op_done = threading.Event()
        self.op_done.set()
        self.subscribers: set[tuple[asyncio.Queue, asyncio.AbstractEventLoop]] = set()

    def busy(self) -> bool:
        return (self.worker is not None and self.worker.is_alive()
                and not self.op_done.is_set())

    def push(self, message: dict) -> None:
        for queue, loop in list(self.subscribers):
            try:
                loop.call_soon_threadsafe(queue.put_nowait, message)
            except RuntimeError:
                self.subscribers.discard((queue, loop))


def downsample_trail(rows, limit: int = TRAIL_POINTS) -> list[list[float]]:
    """Thin a trajectory to at most `limit` points, always keeping the last."""
    n = len(rows)
    if n <= limit:
        return [[float(r[0]), float(r[1])] for r in rows]
    stride = -(-n // limit)
    picked = [[float(rows[i][0]), float(rows[i][1])]
              for i in range(0, n, stride)]
    tail = [float(rows[n - 1][0]), float(rows[n - 1][1])]
    if picked[-1] != tail:
        picked[-1] = tail
    return picked


def population_payload(handle: SessionHandle) -> dict:
    session = handle.session
    selected = set(session.selected)
    return {
        "session": handle.id,
        "status": session.status,
        "evals": session.evaluations_used,
        "budget": session.session_config.budget,
        "map": session.maze.name,
        "selected": sorted(selected),
        "solved": session.solution is not None,
        "candidates": [
            {
                "id": o.genome.id,
                "trail": downsample_trail(o.trajectory)
                if o.trajectory is not None else [[o.behavior[0], o.behavior[1]]],
                "novelty": o.novelty,
                "solved": o.solved,
                "hidden": o.hidden,
                "selected": o.genome.id in selected,
            }
            for o in session.population
        ],
    }


def build_app(
    config: EngineConfig | None = None,
    *,
    maps_dir: str | Path | None = None,
    records_dir: str | Path | None = None,
) -> FastAPI:
    base_config = config if config is not None else EngineConfig()
    store = RecordStore(records_dir) if records_dir is not None else None

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        for handle in list(app.state.sessions.values()):
            handle.stop.set()
        for handle in list(app.state.sessions.values()):
            if handle.worker is not None:
                handle.worker.join(timeout=60)

    app = FastAPI(title="novamaze", lifespan=lifespan)
    app.state.sessions = {}
    app.state.config = base_config
    app.state.maps_dir = maps_dir
    app.state.store = store

    def handle_of(session_id: str) -> SessionHandle:
        handle = app.state.sessions.get(session_id)
        if handle is None:
            raise HTTPException(status_code=404,
                                detail=f"unknown session {session_id!r}")
        return handle

    def guard(fn, *args):
        try:
            return fn(*args)
        except SessionError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    def start_worker(handle: SessionHandle, op: str) -> None:
        with handle.lock:
            if handle.busy():
                raise HTTPException(status_code=409,
                                    detail="an operation is already running")
            try:
                handle.session.require_operable()
            except SessionError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            handle.stop = threading.Event()
            handle.op_done = threading.Event()
            stop = handle.stop
            done = handle.op_done

            def progress(evals: int) -> None:
                handle.push({"type": "progress", "session": handle.id,
                             "evals": evals, "payload": None})

            def work() -> None:
                session = handle.session
                error = None
                try:
                    if op == "novelty":
                        session.novelty_op(progress=progress, stop=stop)
                    else:
                        session.optimize_op(progress=progress, stop=stop)
                except Exception as exc:  # noqa: BLE001 - reported on the channel
                    error = repr(exc)
                # The op no longer mutates the session; admit new requests
                # before the final snapshot goes out.
                done.set()
                with handle.lock:
                    payload = population_payload(handle)
                    status = session.status
                    evals = session.evaluations_used
                if error is not None:
                    payload["error"] = error
                handle.push({"type": "population", "session": handle.id,
                             "evals": evals, "payload": payload})
                if status == "solved":
                    handle.push({"type": "solved", "session": handle.id,
                                 "evals": evals, "payload": payload})

            handle.worker = threading.Thread(
                target=work, name=f"novamaze-{op}-{handle.id}", daemon=True)
            handle.worker.start()

    @app.post("/sessions")
    async def create(body: dict | None = None):
        body = body or {}
        cfg = base_config
        session_cfg = cfg.session
        if "map" in body:
            session_cfg = dataclasses.replace(session_cfg, map_name=body["map"])
        if "seed" in body:
            session_cfg = dataclasses.replace(session_cfg, seed=int(body["seed"]))
        if "budget" in body:
            session_cfg = dataclasses.replace(session_cfg, budget=int(body["budget"]))
        cfg = dataclasses.replace(cfg, session=session_cfg)
        try:
            session = create_session(cfg, maps_dir=app.state.maps_dir)
        except (MapError, KeyError) as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except SessionError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        handle = SessionHandle(uuid.uuid4().hex[:12], session)
        app.state.sessions[handle.id] = handle
        return population_payload(handle)

    @app.get("/sessions/{session_id}/population")
    async def get_population(session_id: str):
        return population_payload(handle_of(session_id))

    @app.post("/sessions/{session_id}/select")
    async def select(session_id: str, body: dict):
        handle = handle_of(session_id)
        with handle.lock:
            if handle.busy():
                raise HTTPException(status_code=409,
                                    detail="an operation is already running")
            guard(handle.session.select, body.get("ids", []))
        return population_payload(handle)

    @app.post("/sessions/{session_id}/step")
    async def step(session_id: str):
        handle = handle_of(session_id)
        with handle.lock:
            if handle.busy():
                raise HTTPException(status_code=409,
                                    detail="an operation is already running")
            guard(handle.session.step_op)
        payload = population_payload(handle)
        handle.push({"type": "population", "session": handle.id,
                     "evals": handle.session.evaluations_used,
                     "payload": payload})
        return payload

    @app.post("/sessions/{session_id}/novelty")
    async def novelty(session_id: str):
        handle = handle_of(session_id)
        start_worker(handle, "novelty")
        return {"session": handle.id, "status": RUNNING_NOVELTY}

    @app.post("/sessions/{session_id}/optimize")
    async def optimize(session_id: str):
        handle = handle_of(session_id)
        start_worker(handle, "optimize")
        return {"session": handle.id, "status": RUNNING_OPTIMIZE}

    @app.post("/sessions/{session_id}/cancel")
    async def cancel(session_id: str):
        handle = handle_of(session_id)
        handle.stop.set()
        worker = handle.worker
        if worker is not None:
            await asyncio.to_thread(worker.join, 60.0)
        return {"session": handle.id, "cancelled": True,
                "status": handle.session.status}

    @app.post("/sessions/{session_id}/restart")
    async def restart(session_id: str):
        handle = handle_of(session_id)
        with handle.lock:
            if handle.busy():
                raise HTTPException(status_code=409,
                                    detail="an operation is already running")
            guard(handle.session.restart)
        payload = population_payload(handle)
        handle.push({"type": "population", "session": handle.id,
                     "evals": handle.session.evaluations_used,
                     "payload": payload})
        return payload

    @app.post("/sessions/{session_id}/publish")
    async def publish(session_id: str):
        handle = handle_of(session_id)
        with handle.lock:
            if handle.busy():
                raise HTTPException(status_code=409,
                                    detail="an operation is already running")
            try:
                record = handle.session.publish(app.state.store)
            except OSError as exc:
                raise HTTPException(status_code=500,
                                    detail=f"record storage failed: {exc}") from exc
        return record.to_json()

    @app.get("/maps")
    async def maps():
        return {"maps": list_maps(app.state.maps_dir)}

    @app.get("/maps/{name}")
    async def map_geometry(name: str):
        try:
            return get_map(name, directory=app.state.maps_dir).to_json()
        except (MapError, KeyError, FileNotFoundError) as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.websocket("/sessions/{session_id}/events")
    async def events(websocket: WebSocket, session_id: str):
        handle = app.state.sessions.get(session_id)
        if handle is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        subscriber = (queue, asyncio.get_running_loop())
        handle.subscribers.add(subscriber)
        try:
            while True:
                message = await queue.get()
                await websocket.send_json(message)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            handle.subscribers.discard(subscriber)

    return app
