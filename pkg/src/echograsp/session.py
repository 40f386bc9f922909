"""One simulated trial session: the canonical fixed-timestep loop.

Every consumer (batch harness, WebSocket service, CLI watch mode) drives the
same tick method, so a given config and seed produce the same frame stream
no matter who is asking.  Commands and inputs are sampled at tick
boundaries: whatever arrived last before the tick is what the tick sees,
and at most one queued command is consumed per tick.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterator

from . import agent as agent_mod
from . import control, feedback, guidance, voice
from .perception import CameraModel, global_detect, head_camera, local_detect, wrist_camera
from .world import (
    ArenaConfig,
    ControlInput,
    WorldState,
    sample_placement,
    step_avatar,
    wrist_world_position,
)

SCHEMA_VERSION = 1

MODES = ("agent_driven", "human_driven")


@dataclass(frozen=True)
class SessionConfig:
    arena: ArenaConfig = field(default_factory=ArenaConfig)
    thresholds: guidance.Thresholds = field(default_factory=guidance.Thresholds)
    head_camera: CameraModel = field(default_factory=head_camera)
    wrist_camera: CameraModel = field(default_factory=wrist_camera)
    agent: agent_mod.AgentParams = field(default_factory=agent_mod.AgentParams)
    seed: int = 0
    mode: str = "agent_driven"
    realtime: bool = True  # wall-clock pacing for human sessions

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    @classmethod
    def from_json_dict(cls, data: dict) -> "SessionConfig":
        """Build a config from plain JSON, rejecting unknown keys."""
        known = {
            "arena": lambda d: ArenaConfig(**d),
            "thresholds": _thresholds_from_dict,
            "head_camera": lambda d: CameraModel(**d),
            "wrist_camera": lambda d: CameraModel(**d),
            "agent": agent_mod.AgentParams.from_json_dict,
            "seed": int,
            "mode": str,
            "realtime": bool,
        }
        extra = set(data) - set(known)
        if extra:
            raise ValueError(f"unknown session config keys: {sorted(extra)}")
        kwargs = {}
        for key, build in known.items():
            if key in data:
                try:
                    kwargs[key] = build(data[key])
                except TypeError as exc:
                    raise ValueError(f"bad {key!r} config: {exc}") from exc
        return cls(**kwargs)

    def to_json_dict(self) -> dict:
        return {
            "arena": self.arena.to_json_dict(),
            "thresholds": self.thresholds.to_json_dict(),
            "head_camera": self.head_camera.to_json_dict(),
            "wrist_camera": self.wrist_camera.to_json_dict(),
            "agent": self.agent.to_json_dict(),
            "seed": self.seed,
            "mode": self.mode,
            "realtime": self.realtime,
        }


def _thresholds_from_dict(data: dict) -> guidance.Thresholds:
    d = dict(data)
    if "graspable_band" in d:
        d["graspable_band"] = tuple(d["graspable_band"])
    return guidance.Thresholds(**d)


class SimSession:
    """A world, a guidance machine, a prosthesis, and (optionally) an agent."""

    def __init__(self, config: SessionConfig) -> None:
        self.config = config
        self.world = WorldState.create(config.arena, config.seed)
        self.gstate = guidance.GuidanceState()
        self.prosthesis = control.ProsthesisState()
        self.agent_state = agent_mod.initial_state(self.world.wrist)
        self.pending: deque[voice.Command] = deque()
        self.held_input = ControlInput()
        self.events: list[guidance.GuidanceEvent] = []
        self.current_placement: int | None = None
        self.previous_placement: int | None = None
        self.trial_index = -1
        self.paused = False
        self._scene_prepared = False

    # --- lifecycle ---

    @property
    def trial_done(self) -> bool:
        return self.gstate.phase == guidance.Phase.DONE

    @property
    def trial_active(self) -> bool:
        return self.gstate.phase not in (guidance.Phase.IDLE, guidance.Phase.DONE)

    def start_trial(self, placement_index: int | None = None) -> int:
        """Reset poses and place a fresh scene; returns the placement index.

        Unspecified placements are sampled under the separation constraint
        against this session's previous trial.
        """
        if placement_index is None:
            placement_index = sample_placement(
                self.previous_placement, self.world.rng, self.config.arena.segment_count
            )
        self.world.reset_avatar()
        self.world.place_scene(placement_index)
        self.gstate = guidance.GuidanceState()
        self.prosthesis = control.ProsthesisState()
        self.agent_state = agent_mod.initial_state(self.world.wrist)
        self.held_input = ControlInput()
        self.events = []
        self.pending.clear()
        self.previous_placement = placement_index
        self.current_placement = placement_index
        self.trial_index += 1
        self._scene_prepared = True
        return placement_index

    # --- command and input intake ---

    def submit_command(self, command: voice.Command | str) -> dict:
        """Queue a command for the next tick; returns a structured ack.

        Text goes through the grammar first, and what can be rejected
        synchronously (parse errors) is; phase-dependent effects land on the
        next tick and surface as frame events.
        """
        if isinstance(command, str):
            try:
                command = voice.parse(command)
            except voice.ParseError as exc:
                return {"ok": False, "error": {"code": exc.code, "message": str(exc)}}
        if command.kind == voice.CommandKind.GRASP and not self.trial_active:
            # A staged scene (explicit placement) is consumed by the first
            # grasp; later grasps in the same session sample fresh scenes.
            if not self._scene_prepared:
                self.start_trial()
            self._scene_prepared = False
            self.pending.append(command)
            return {"ok": True, "command": voice.render(command), "trial_index": self.trial_index}
        self.pending.append(command)
        return {"ok": True, "command": voice.render(command)}

    def set_input(self, **fields: float) -> dict:
        """Replace the held human input; ignored (with a warning) in agent mode."""
        if self.config.mode != "human_driven":
            return {"ok": False, "error": {"code": "not_human_driven", "message": "session is agent driven"}}
        valid = {f for f in ControlInput.__dataclass_fields__ if f != "tremor_sigma"}
        extra = set(fields) - valid
        if extra:
            return {"ok": False, "error": {"code": "bad_input", "message": f"unknown input fields: {sorted(extra)}"}}
        self.held_input = replace(ControlInput(), **fields)
        return {"ok": True}

    # --- the tick ---

    def tick(self, collect_frame: bool = True) -> dict | None:
        """Advance one timestep: sense, guide, cue, act, actuate, integrate."""
        world = self.world
        thresholds = self.config.thresholds
        tick_index = world.tick_index

        global_dets = global_detect(world, self.config.head_camera, world.rng)
        local_det = local_detect(world, self.config.wrist_camera, world.rng)

        intent = self.pending.popleft() if self.pending else None
        prev_phase = self.gstate.phase
        self.gstate, events = guidance.guidance_step(
            self.gstate, world, global_dets, local_det, intent, thresholds, self.prosthesis
        )

        # Target acquired: preshape the hand for what the cameras identified.
        if prev_phase == guidance.Phase.IDLE and self.gstate.phase == guidance.Phase.DETECTING:
            target = world.find(self.gstate.target_kind or "")
            if target is not None:
                gesture, warn = control.select_gesture(target.kind, target.principal_axis)
                self.prosthesis.gesture = gesture
                if warn:
                    events.append(guidance.GuidanceEvent("warning", warn, tick_index))

        cue = feedback.cue_for_phase(self.gstate.phase, world, local_det, thresholds)

        if self.config.mode == "agent_driven":
            if self.gstate.phase == guidance.Phase.IDLE:
                inp = ControlInput()
            else:
                inp, agent_intent = agent_mod.agent_policy(
                    cue, events, self.agent_state, self.config.agent, world.rng, self.config.arena
                )
                if agent_intent is not None:
                    self.pending.append(agent_intent)
        else:
            inp = replace(self.held_input)

        # Collaborative wrist roll: the controller trims toward the measured
        # axis while the subject works on aim and distance.
        if local_det is not None and self.gstate.phase in (
            guidance.Phase.ALIGNING,
            guidance.Phase.GRASPABLE,
        ):
            inp.rotation_delta += control.wrist_setpoint(local_det, self.config.arena.tick)

        step_avatar(world, inp, self.config.arena.tick)

        if self.prosthesis.holding:
            bottle = world.find("bottle")
            if bottle is not None:
                bottle.position = wrist_world_position(world)
        self.prosthesis.wrist_rotation = world.wrist.rotation

        self.events.extend(events)
        if not collect_frame:
            return None
        return self._frame(tick_index, events, cue, inp)

    def run_until_done(self, max_ticks: int | None = None, collect_frames: bool = False) -> list[dict]:
        """Tick until the trial finishes; the timeout bounds the loop."""
        if max_ticks is None:
            max_ticks = int(self.config.thresholds.timeout / self.config.arena.tick) + 100
        frames: list[dict] = []
        for _ in range(max_ticks):
            frame = self.tick(collect_frame=collect_frames)
            if collect_frames and frame is not None:
                frames.append(frame)
            if self.trial_done:
                break
        return frames

    # --- serialization ---

    def prompt_events(self) -> list[guidance.GuidanceEvent]:
        return [e for e in self.events if e.kind == "prompt"]

    def clocks(self) -> tuple[float, float]:
        return guidance.trial_clocks(
            self.events, self.config.arena.tick, self.config.thresholds.timeout
        )

    def _running_clocks(self, now_tick: int) -> dict:
        ticks = self.gstate.prompts_emitted()
        dt = self.config.arena.tick
        det = ticks.get(guidance.PROMPT_DETECTING)
        acc = ticks.get(guidance.PROMPT_ACCESSIBLE)
        grs = ticks.get(guidance.PROMPT_GRASPABLE)
        t1 = None
        t2 = None
        if det is not None:
            t1 = ((acc if acc is not None else now_tick) - det) * dt
        if acc is not None:
            t2 = ((grs if grs is not None else now_tick) - acc) * dt
        return {"t1_s": t1, "t2_s": t2}

    def _frame(self, tick_index: int, events: list[guidance.GuidanceEvent], cue, inp: ControlInput) -> dict:
        world = self.world
        w = world.wrist
        prompt = next((e.text for e in events if e.kind == "prompt"), None)
        other = [{"kind": e.kind, "text": e.text} for e in events if e.kind != "prompt"]
        done = None
        if self.gstate.phase == guidance.Phase.DONE:
            done = {"success": bool(self.gstate.success), "fail_reason": self.gstate.fail_reason}
        return {
            "type": "frame",
            "schema_version": SCHEMA_VERSION,
            "tick": tick_index,
            "phase": self.gstate.phase.value,
            "avatar": {
                "x": world.avatar.x,
                "y": world.avatar.y,
                "heading": world.avatar.heading,
            },
            "wrist": {
                "offset": list(w.offset),
                "aim_azimuth": w.effective_azimuth(),
                "aim_elevation": w.effective_elevation(),
                "rotation": w.rotation,
            },
            "prosthesis": {
                "aperture": self.prosthesis.aperture,
                "wrist_rotation": self.prosthesis.wrist_rotation,
                "gesture": self.prosthesis.gesture.value,
                "holding": self.prosthesis.holding,
            },
            "audio_cue": cue.to_json_dict() if cue is not None else None,
            "prompt": prompt,
            "events": other,
            "clocks": self._running_clocks(tick_index),
            "done": done,
            "input": {
                "forward": inp.forward,
                "turn": inp.turn,
                "aim_azimuth_delta": inp.aim_azimuth_delta,
                "aim_elevation_delta": inp.aim_elevation_delta,
                "reach_delta": inp.reach_delta,
                "rotation_delta": inp.rotation_delta,
            },
        }

    def scene_message(self) -> dict:
        return {
            "type": "scene",
            "schema_version": SCHEMA_VERSION,
            "arena": self.config.arena.to_json_dict(),
            "objects": [o.to_json_dict() for o in self.world.objects],
            "mode": self.config.mode,
            "trial_index": self.trial_index,
        }


def frame_to_json(frame: dict) -> str:
    """Canonical single-line encoding used for logs and equality checks."""
    return json.dumps(frame, sort_keys=True, separators=(",", ":"))


def iter_frames(session: SimSession, max_ticks: int | None = None) -> Iterator[dict]:
    if max_ticks is None:
        max_ticks = int(session.config.thresholds.timeout / session.config.arena.tick) + 100
    for _ in range(max_ticks):
        frame = session.tick(collect_frame=True)
        if frame is not None:
            yield frame
        if session.trial_done:
            break
