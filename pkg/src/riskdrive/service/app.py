"""Websocket bridge running sessions at the fixed tick rate.

One asyncio pump task per session steps the world every ``tick_dt`` of wall
time and broadcasts the state frame; inbound control frames are queued and
each is applied to exactly one tick. Simulation time always advances by
exactly one tick per step regardless of wall-clock jitter.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import logging

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .protocol import ProtocolError, error_frame, parse_frame, started_frame, stopped_frame
from .session import SessionManager

log = logging.getLogger(__name__)


def create_app() -> FastAPI:
    app = FastAPI(title="riskdrive session service")
    manager = SessionManager()
    app.state.manager = manager

    @app.get("/health")
    async def health():
        return {"ok": True, "sessions": len(manager.sessions)}

    @app.websocket("/ws")
    async def ws_endpoint(socket: WebSocket) -> None:
        await socket.accept()
        pumps: dict[str, asyncio.Task] = {}
        queues: dict[str, list[dict]] = {}

        async def pump(session_id: str) -> None:
            state = manager.get(session_id)
            dt = state.config.scenario.tick_dt
            try:
                while not state.stopped:
                    controls = queues.get(session_id, [])
                    queues[session_id] = []
                    frame = manager.tick(session_id, controls)
                    await socket.send_text(json.dumps(frame))
                    await asyncio.sleep(dt)
            except (WebSocketDisconnect, RuntimeError, asyncio.CancelledError):
                pass

        try:
            while True:
                text = await socket.receive_text()
                try:
                    frame = parse_frame(text)
                except ProtocolError as exc:
                    await socket.send_text(json.dumps(error_frame(exc.code, str(exc))))
                    continue
                kind = frame["type"]
                if kind == "start":
                    state = manager.start_session(frame.get("config") or {})
                    queues[state.session_id] = []
                    await socket.send_text(
                        json.dumps(
                            started_frame(
                                state.session_id,
                                {"tick_dt": state.config.scenario.tick_dt},
                            )
                        )
                    )
                    pumps[state.session_id] = asyncio.create_task(pump(state.session_id))
                elif kind == "control":
                    session_id = frame.get("session")
                    if session_id not in queues:
                        await socket.send_text(
                            json.dumps(error_frame("unknown_session", str(session_id)))
                        )
                        continue
                    queues[session_id].append(
                        {"action": frame["action"], "seq": frame["seq"]}
                    )
                elif kind == "stop":
                    session_id = frame.get("session")
                    task = pumps.pop(session_id, None)
                    if task:
                        task.cancel()
                        with contextlib.suppress(asyncio.CancelledError):
                            await task
                    try:
                        exports = manager.stop_session(session_id)
                    except (KeyError, RuntimeError) as exc:
                        await socket.send_text(
                            json.dumps(error_frame("bad_stop", str(exc)))
                        )
                        continue
                    await socket.send_text(json.dumps(stopped_frame(session_id, exports)))
        except WebSocketDisconnect:
            for task in pumps.values():
                task.cancel()

    return app
