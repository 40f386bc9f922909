"""Session service: JSON message handling plus a WebSocket transport.

The message layer is transport-free (ServiceSession) so tests and local
pipes drive it directly; the FastAPI app wraps it in a socket and adds
pacing.  Human sessions tick at wall-clock rate unless the config says
``realtime: false`` (testing); agent sessions tick as fast as they stream.
"""

from __future__ import annotations

import asyncio
import itertools
import json
from typing import Any

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .session import SCHEMA_VERSION, SessionConfig, SimSession

_session_ids = itertools.count(1)


def _error(code: str, message: str) -> dict:
    return {
        "type": "ack",
        "schema_version": SCHEMA_VERSION,
        "ok": False,
        "error": {"code": code, "message": message},
    }


def _ok(payload: dict | None = None) -> dict:
    out = {"type": "ack", "schema_version": SCHEMA_VERSION, "ok": True}
    if payload:
        out.update(payload)
    return out


class ServiceSession:
    """One client's session: a SimSession behind a JSON message protocol."""

    def __init__(self, config: SessionConfig, session_id: int | None = None) -> None:
        self.session_id = session_id if session_id is not None else next(_session_ids)
        self.sim = SimSession(config)
        self.paused = False
        self._last_trial_announced = -1

    @classmethod
    def create(cls, config_dict: dict | None) -> "ServiceSession":
        config = SessionConfig.from_json_dict(config_dict or {})
        return cls(config)

    def handle_message(self, message: Any) -> dict:
        """Apply one client message; always returns a structured ack."""
        if not isinstance(message, dict) or "type" not in message:
            return _error("bad_message", "messages must be objects with a 'type' field")
        mtype = message["type"]
        if mtype == "command":
            text = message.get("text")
            if not isinstance(text, str):
                return _error("bad_message", "command needs a 'text' string")
            ack = self.sim.submit_command(text)
            if not ack.get("ok"):
                err = ack["error"]
                return _error(err["code"], err["message"])
            payload = {k: v for k, v in ack.items() if k != "ok"}
            return _ok(payload)
        if mtype == "input":
            fields = {k: v for k, v in message.items() if k != "type"}
            bad = {k for k, v in fields.items() if not isinstance(v, (int, float)) or isinstance(v, bool)}
            if bad:
                return _error("bad_input", f"non-numeric input fields: {sorted(bad)}")
            ack = self.sim.set_input(**{k: float(v) for k, v in fields.items()})
            if not ack.get("ok"):
                err = ack["error"]
                return _error(err["code"], err["message"])
            return _ok()
        if mtype == "pause":
            self.paused = True
            return _ok({"paused": True})
        if mtype == "resume":
            self.paused = False
            return _ok({"paused": False})
        return _error("bad_message", f"unknown message type {mtype!r}")

    def scene_if_new_trial(self) -> dict | None:
        """The scene notification for a trial the client has not seen yet."""
        if self.sim.current_placement is None:
            return None
        if self.sim.trial_index == self._last_trial_announced:
            return None
        self._last_trial_announced = self.sim.trial_index
        return self.sim.scene_message()

    def tick(self) -> dict | None:
        if self.paused:
            return None
        return self.sim.tick(collect_frame=True)


def create_app() -> FastAPI:
    app = FastAPI(title="echograsp session service")

    @app.get("/healthz")
    def healthz() -> dict:
        return {"ok": True, "schema_version": SCHEMA_VERSION}

    @app.websocket("/session")
    async def session_socket(ws: WebSocket) -> None:
        await ws.accept()
        service = await _handshake(ws)
        if service is None:
            await ws.close()
            return
        await _serve(ws, service)

    return app


async def _handshake(ws: WebSocket) -> ServiceSession | None:
    """First message must create the session; anything else is rejected."""
    while True:
        try:
            message = json.loads(await ws.receive_text())
        except WebSocketDisconnect:
            return None
        except json.JSONDecodeError:
            await ws.send_json(_error("bad_message", "not valid JSON"))
            continue
        if not isinstance(message, dict) or message.get("type") != "create_session":
            await ws.send_json(_error("expected_create_session", "first message must create a session"))
            continue
        try:
            service = ServiceSession.create(message.get("config"))
        except (ValueError, TypeError) as exc:
            await ws.send_json(_error("bad_config", str(exc)))
            continue
        await ws.send_json(
            _ok(
                {
                    "session_id": service.session_id,
                    "mode": service.sim.config.mode,
                    "config": service.sim.config.to_json_dict(),
                }
            )
        )
        return service


async def _serve(ws: WebSocket, service: ServiceSession) -> None:
    """Stream frames while draining client messages.

    Message application and ticking interleave on one task, so the
    "sampled at tick boundaries" rule holds: whatever messages landed
    before a tick are in effect for it.
    """
    inbox: asyncio.Queue = asyncio.Queue()

    async def reader() -> None:
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    await inbox.put(json.loads(raw))
                except json.JSONDecodeError:
                    await inbox.put({"type": "_undecodable"})
        except WebSocketDisconnect:
            await inbox.put(None)

    reader_task = asyncio.create_task(reader())
    realtime = service.sim.config.mode == "human_driven" and service.sim.config.realtime
    dt = service.sim.config.arena.tick
    ticks_since_yield = 0
    try:
        while True:
            while not inbox.empty():
                message = inbox.get_nowait()
                if message is None:
                    return
                if message.get("type") == "_undecodable":
                    await ws.send_json(_error("bad_message", "not valid JSON"))
                    continue
                await ws.send_json(service.handle_message(message))
            scene = service.scene_if_new_trial()
            if scene is not None:
                await ws.send_json(scene)
            frame = service.tick()
            if frame is not None:
                await ws.send_json(frame)
            if realtime:
                await asyncio.sleep(dt)
            elif service.paused:
                await asyncio.sleep(0.01)
            else:
                ticks_since_yield += 1
                if ticks_since_yield >= 20:
                    ticks_since_yield = 0
                    await asyncio.sleep(0)
    except (WebSocketDisconnect, RuntimeError):
        # RuntimeError: send on a socket the client already closed.
        return
    finally:
        reader_task.cancel()


def run_server(host: str = "127.0.0.1", port: int = 8765) -> None:
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")
