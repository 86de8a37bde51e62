"""Live telemetry and teleop service: HTTP state/config plus a WebSocket feed.

One background thread owns all simulation state and paces it at wall-clock
rate (scaled by sim.speed). Clients talk to it only through a serialized
command queue; telemetry snapshots are plain dicts broadcast to any number of
sockets at 10 Hz. Malformed client messages get an error reply and the
connection stays open.

Wire schema (server -> client):

    {"type": "state", "tick": ..., "t": ..., "truth": {x, y, theta},
     "fused": {x, y, theta}, "gps": {x, y},
     "heading": {"raw": ..., "filtered": ..., "median": ...},
     "nav": {"waypoint_index": ..., "done": ...},
     "cmd": {"vx": ..., "omega": ...}, "mode": "auto"|"teleop",
     "seg": {"fractions": {...}, "mask_png_base64": "..."} | null}

Client -> server: {"type": "twist", "vx": ..., "omega": ...} (teleop) and
{"type": "mode", "value": "auto"|"teleop"}.
"""

from __future__ import annotations

import asyncio
import json
import queue
import threading
import time
from collections import deque
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .config import WorldConfig
from .segnet import SegNetParams
from .sim import Simulator, TickRecord, _Schedule, class_fractions, segment_frame

TELEMETRY_PERIOD_S = 0.1
HISTORY_TICKS = 200_000


def _frame_from_record(r: TickRecord, mode: str, seg: dict | None) -> dict:
    return {
        "type": "state",
        "tick": r.tick,
        "t": r.t,
        "truth": {"x": r.truth_x, "y": r.truth_y, "theta": r.truth_theta},
        "fused": {"x": r.fused_x, "y": r.fused_y, "theta": r.fused_theta},
        "gps": {"x": r.gps_x, "y": r.gps_y},
        "heading": {
            "raw": r.heading_raw,
            "filtered": r.heading_kalman,
            "median": r.heading_median,
        },
        "nav": {"waypoint_index": r.waypoint_index, "done": r.done},
        "cmd": {"vx": r.cmd_vx, "omega": r.cmd_omega},
        "mode": mode,
        "seg": seg,
    }


class SimService:
    """Background simulation thread plus the thread-safe command/snapshot API."""

    def __init__(
        self,
        cfg: WorldConfig,
        params: SegNetParams | None = None,
        include_mask_png: bool = False,
    ):
        self.cfg = cfg
        self.sim = Simulator(cfg)
        self.params = params
        self.include_mask_png = include_mask_png
        self._commands: queue.Queue = queue.Queue()
        self._lock = threading.Lock()
        self._latest: dict | None = None
        self._records: deque[TickRecord] = deque(maxlen=HISTORY_TICKS)
        self._seg: dict | None = None
        self._camera_due = _Schedule(1.0 / cfg.camera.interval) if cfg.camera.enabled else None
        self._frame_source = None
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._step_once()  # a snapshot exists before the first client arrives

    # -- commands ----------------------------------------------------------

    def submit_twist(self, vx: float, omega: float) -> None:
        self._commands.put(("twist", vx, omega))

    def submit_mode(self, mode: str) -> None:
        self._commands.put(("mode", mode))

    def handle_client_message(self, text: str) -> dict | None:
        """Validate and enqueue one client message; returns an error reply or None."""
        try:
            msg = json.loads(text)
        except json.JSONDecodeError:
            return {"type": "error", "reason": "message is not valid JSON"}
        if not isinstance(msg, dict) or "type" not in msg:
            return {"type": "error", "reason": "message must be an object with a 'type'"}
        kind = msg["type"]
        if kind == "twist":
            try:
                vx = float(msg["vx"])
                omega = float(msg["omega"])
            except (KeyError, TypeError, ValueError):
                return {"type": "error", "reason": "twist requires numeric 'vx' and 'omega'"}
            self.submit_twist(vx, omega)
            return None
        if kind == "mode":
            value = msg.get("value")
            if value not in ("auto", "teleop"):
                return {"type": "error", "reason": "mode 'value' must be 'auto' or 'teleop'"}
            self.submit_mode(value)
            return None
        return {"type": "error", "reason": f"unknown message type {kind!r}"}

    def _drain_commands(self) -> None:
        while True:
            try:
                cmd = self._commands.get_nowait()
            except queue.Empty:
                return
            if cmd[0] == "twist":
                self.sim.set_teleop_twist(cmd[1], cmd[2])
            else:
                self.sim.set_mode(cmd[1])

    # -- stepping ----------------------------------------------------------

    def _step_once(self) -> None:
        with self._lock:
            self._drain_commands()
            record = self.sim.step()
            if self._camera_due is not None and self._camera_due.due(record.t):
                self._update_seg()
            self._records.append(record)
            self._latest = _frame_from_record(record, self.sim.mode, self._seg)

    def _update_seg(self) -> None:
        from .sim import FrameSource

        if self._frame_source is None:
            self._frame_source = FrameSource(self.cfg)
        img = self._frame_source.next_frame()
        if img is None:
            return  # directory source exhausted; keep the last prediction
        mask = segment_frame(img, self.params)
        fractions = class_fractions(mask)
        seg = {"fractions": {"soil": fractions[0], "crop": fractions[1], "weed": fractions[2]}}
        if self.include_mask_png:
            from .imgio import mask_png_base64

            seg["mask_png_base64"] = mask_png_base64(mask)
        self._seg = seg

    def _run(self) -> None:
        period = self.cfg.sim.dt / self.cfg.sim.speed
        next_time = time.monotonic() + period
        while not self._stop.is_set():
            self._step_once()
            delay = next_time - time.monotonic()
            if delay > 0:
                time.sleep(delay)
                next_time += period
            else:
                next_time = time.monotonic() + period  # fell behind; resync

    def start(self) -> None:
        if self._thread is not None:
            return
        self._thread = threading.Thread(target=self._run, name="sim-loop", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    # -- snapshots ----------------------------------------------------------

    def latest_frame(self) -> dict | None:
        with self._lock:
            return self._latest

    def heading_csv(self) -> str:
        with self._lock:
            records = list(self._records)
        lines = ["t,raw,median_filtered,kalman_filtered"]
        lines += [
            f"{r.t!r},{r.heading_raw!r},{r.heading_median!r},{r.heading_kalman!r}"
            for r in records
        ]
        return "\n".join(lines) + "\n"


def create_app(service: SimService, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="fieldbench")

    @app.get("/config")
    def get_config() -> JSONResponse:
        return JSONResponse(service.cfg.to_dict())

    @app.get("/state")
    def get_state() -> JSONResponse:
        frame = service.latest_frame()
        if frame is None:
            return JSONResponse({"error": "no state yet"}, status_code=503)
        return JSONResponse(frame)

    @app.get("/log/heading.csv")
    def get_heading_log() -> PlainTextResponse:
        return PlainTextResponse(service.heading_csv(), media_type="text/csv")

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()

        async def push_states() -> None:
            last_tick = -1
            while True:
                frame = service.latest_frame()
                if frame is not None and frame["tick"] != last_tick:
                    last_tick = frame["tick"]
                    await ws.send_json(frame)
                await asyncio.sleep(TELEMETRY_PERIOD_S)

        sender = asyncio.create_task(push_states())
        try:
            while True:
                text = await ws.receive_text()
                reply = service.handle_client_message(text)
                if reply is not None:
                    await ws.send_json(reply)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="frontend")
    return app


def serve(
    cfg: WorldConfig,
    port: int = 8000,
    host: str = "127.0.0.1",
    params: SegNetParams | None = None,
    include_mask_png: bool = False,
    frontend_dir: str | Path | None = None,
) -> None:
    """Run the simulation thread and block serving HTTP/WebSocket clients."""
    import uvicorn

    service = SimService(cfg, params=params, include_mask_png=include_mask_png)
    app = create_app(service, frontend_dir=frontend_dir)
    service.start()
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    finally:
        service.stop()
