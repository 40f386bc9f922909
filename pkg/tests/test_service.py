"""Message protocol and WebSocket transport."""

from __future__ import annotations

import json

from fastapi.testclient import TestClient

from echograsp.service import ServiceSession, create_app
from echograsp.session import SessionConfig, SimSession, frame_to_json


class TestServiceSession:
    def make(self, **cfg) -> ServiceSession:
        return ServiceSession.create({"seed": 7, **cfg})

    def test_command_ack_round_trip(self) -> None:
        svc = self.make()
        ack = svc.handle_message({"type": "command", "text": "grasp bottle"})
        assert ack["ok"]
        assert ack["command"] == "grasp bottle"
        assert "trial_index" in ack

    def test_bad_command_becomes_error_ack(self) -> None:
        svc = self.make()
        ack = svc.handle_message({"type": "command", "text": "levitate"})
        assert not ack["ok"]
        assert ack["error"]["code"] == "unrecognized"

    def test_non_object_message_rejected(self) -> None:
        svc = self.make()
        for bad in ("hello", 42, ["type", "command"], {"no_type": 1}):
            ack = svc.handle_message(bad)
            assert not ack["ok"]
            assert ack["error"]["code"] == "bad_message"

    def test_unknown_type_rejected(self) -> None:
        svc = self.make()
        ack = svc.handle_message({"type": "teleport"})
        assert not ack["ok"]

    def test_input_needs_numbers(self) -> None:
        svc = self.make(mode="human_driven")
        ack = svc.handle_message({"type": "input", "forward": "fast"})
        assert not ack["ok"]
        assert ack["error"]["code"] == "bad_input"

    def test_input_bool_is_not_a_number(self) -> None:
        svc = self.make(mode="human_driven")
        ack = svc.handle_message({"type": "input", "forward": True})
        assert not ack["ok"]

    def test_input_applies_in_human_mode(self) -> None:
        svc = self.make(mode="human_driven")
        svc.handle_message({"type": "command", "text": "grasp bottle"})
        assert svc.handle_message({"type": "input", "forward": 0.5})["ok"]
        x0 = svc.sim.world.avatar.x
        for _ in range(10):
            svc.tick()
        assert svc.sim.world.avatar.x != x0

    def test_pause_stops_ticks(self) -> None:
        svc = self.make()
        svc.handle_message({"type": "command", "text": "grasp bottle"})
        assert svc.handle_message({"type": "pause"})["paused"]
        before = svc.sim.world.tick_index
        assert svc.tick() is None
        assert svc.sim.world.tick_index == before
        svc.handle_message({"type": "resume"})
        assert svc.tick() is not None

    def test_scene_announced_once_per_trial(self) -> None:
        svc = self.make()
        assert svc.scene_if_new_trial() is None  # nothing placed yet
        svc.handle_message({"type": "command", "text": "grasp bottle"})
        svc.tick()
        assert svc.scene_if_new_trial() is not None
        assert svc.scene_if_new_trial() is None  # same trial, already sent

    def test_malformed_config_raises_value_error(self) -> None:
        import pytest

        with pytest.raises(ValueError):
            ServiceSession.create({"seed": 1, "cheat_mode": True})

    def test_service_trace_matches_headless(self) -> None:
        # The transport must not perturb simulation state: a service-run
        # agent trial emits exactly the frames a bare session does.
        svc = self.make()
        svc.handle_message({"type": "command", "text": "grasp bottle"})
        service_frames = []
        for _ in range(7000):
            frame = svc.tick()
            service_frames.append(frame_to_json(frame))
            if frame["done"] is not None:
                break

        bare = SimSession(SessionConfig(seed=7))
        bare.submit_command("grasp bottle")
        bare_frames = []
        for _ in range(7000):
            frame = bare.tick()
            bare_frames.append(frame_to_json(frame))
            if frame["done"] is not None:
                break

        assert service_frames == bare_frames


class TestWebSocket:
    def test_healthz(self) -> None:
        client = TestClient(create_app())
        body = client.get("/healthz").json()
        assert body["ok"]

    def test_handshake_rejects_non_create(self) -> None:
        client = TestClient(create_app())
        with client.websocket_connect("/session") as ws:
            ws.send_text(json.dumps({"type": "command", "text": "grasp bottle"}))
            reply = ws.receive_json()
            assert not reply["ok"]
            assert reply["error"]["code"] == "expected_create_session"
            # The socket stays open for a corrected handshake.
            ws.send_text(json.dumps({"type": "create_session", "config": {"seed": 1}}))
            assert ws.receive_json()["ok"]

    def test_handshake_rejects_bad_config(self) -> None:
        client = TestClient(create_app())
        with client.websocket_connect("/session") as ws:
            ws.send_text(
                json.dumps({"type": "create_session", "config": {"speed": 99}})
            )
            reply = ws.receive_json()
            assert not reply["ok"]
            assert reply["error"]["code"] == "bad_config"

    def test_handshake_rejects_non_json(self) -> None:
        client = TestClient(create_app())
        with client.websocket_connect("/session") as ws:
            ws.send_text("{not json")
            reply = ws.receive_json()
            assert not reply["ok"]
            assert reply["error"]["code"] == "bad_message"

    def test_agent_trial_streams_to_completion(self) -> None:
        client = TestClient(create_app())
        with client.websocket_connect("/session") as ws:
            ws.send_text(json.dumps({"type": "create_session", "config": {"seed": 5}}))
            hello = ws.receive_json()
            assert hello["ok"] and hello["mode"] == "agent_driven"
            ws.send_text(json.dumps({"type": "command", "text": "grasp bottle"}))

            prompts = []
            saw_scene = saw_ack = False
            done = None
            for _ in range(20000):
                msg = ws.receive_json()
                if msg["type"] == "ack":
                    saw_ack = True
                    assert msg["ok"]
                elif msg["type"] == "scene":
                    saw_scene = True
                elif msg["type"] == "frame":
                    if msg["prompt"]:
                        prompts.append(msg["prompt"])
                    if msg["done"] is not None:
                        done = msg["done"]
                        break
            assert saw_ack and saw_scene
            assert done is not None and done["success"]
            assert prompts == [
                "real-time detection in progress",
                "reached the accessible range",
                "reached the graspable range",
                "This grasp task is over, grasp is successful",
            ]

    def test_human_session_respects_realtime_false(self) -> None:
        client = TestClient(create_app())
        with client.websocket_connect("/session") as ws:
            ws.send_text(
                json.dumps(
                    {
                        "type": "create_session",
                        "config": {"seed": 5, "mode": "human_driven", "realtime": False},
                    }
                )
            )
            assert ws.receive_json()["ok"]
            ws.send_text(json.dumps({"type": "command", "text": "grasp bottle"}))
            # Frames arrive unpaced; collect a handful quickly.
            ticks = []
            for _ in range(200):
                msg = ws.receive_json()
                if msg["type"] == "frame":
                    ticks.append(msg["tick"])
                if len(ticks) >= 20:
                    break
            assert ticks == sorted(ticks)
            assert len(ticks) == 20
