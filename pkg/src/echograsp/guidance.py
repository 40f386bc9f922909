"""Task protocol state machine, spoken prompts, and trial clocks.

One transition fires per tick at most, each in-trial phase is entered at
most once, and every protocol prompt is emitted exactly once per trial.
Phase progression trusts the sensors (noisy detections); only the grasp
attempt itself consults true geometry, via the control layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable

from . import control
from .perception import GlobalDetection, LocalDetection
from .voice import Command, CommandKind
from .world import WorldState, relative_polar


class Phase(str, Enum):
    IDLE = "idle"
    DETECTING = "detecting"
    NAVIGATING = "navigating"
    ALIGNING = "aligning"
    GRASPABLE = "graspable"
    GRASPING = "grasping"
    DONE = "done"


PROMPT_DETECTING = "real-time detection in progress"
PROMPT_ACCESSIBLE = "reached the accessible range"
PROMPT_GRASPABLE = "reached the graspable range"
PROMPT_SUCCESS = "This grasp task is over, grasp is successful"
PROMPT_FAILED = "This grasp task is over, grasp is failed"

PROTOCOL_PROMPTS = (
    PROMPT_DETECTING,
    PROMPT_ACCESSIBLE,
    PROMPT_GRASPABLE,
    PROMPT_SUCCESS,
    PROMPT_FAILED,
)

_ACTIVE_PHASES = (
    Phase.DETECTING,
    Phase.NAVIGATING,
    Phase.ALIGNING,
    Phase.GRASPABLE,
    Phase.GRASPING,
)

# The complete transition relation: (from, trigger, to).  guidance_step
# fires edges from this set only, which the tests enforce exhaustively.
DECLARED_EDGES: frozenset[tuple[Phase, str, Phase]] = frozenset(
    [
        (Phase.IDLE, "grasp_command", Phase.DETECTING),
        (Phase.DETECTING, "target_detected", Phase.NAVIGATING),
        (Phase.NAVIGATING, "within_accessible", Phase.ALIGNING),
        (Phase.ALIGNING, "alignment_held", Phase.GRASPABLE),
        (Phase.GRASPABLE, "close_hand", Phase.GRASPING),
        (Phase.GRASPING, "open_hand", Phase.DONE),
    ]
    + [(p, "timeout", Phase.DONE) for p in _ACTIVE_PHASES]
    + [(p, "stop_command", Phase.DONE) for p in _ACTIVE_PHASES]
)

FAIL_REASONS = ("timeout", "aborted", "aim_error", "distance", "gesture_mismatch", "dropped")


@dataclass(frozen=True)
class Thresholds:
    accessible_distance: float = 0.7  # meters, avatar to target
    graspable_aim: float = 8.0  # degrees
    graspable_band: tuple[float, float] = (0.05, 0.25)  # meters, wrist to target
    dwell: float = 0.5  # seconds the graspable condition must hold
    timeout: float = 120.0  # seconds per trial

    def __post_init__(self) -> None:
        if self.accessible_distance <= 0:
            raise ValueError("accessible_distance must be positive")
        if self.graspable_aim <= 0:
            raise ValueError("graspable_aim must be positive")
        lo, hi = self.graspable_band
        if not 0 <= lo < hi:
            raise ValueError("graspable_band must satisfy 0 <= lo < hi")
        if self.dwell < 0:
            raise ValueError("dwell must be non-negative")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    @property
    def band_center(self) -> float:
        lo, hi = self.graspable_band
        return (lo + hi) / 2.0

    @property
    def band_half_width(self) -> float:
        lo, hi = self.graspable_band
        return (hi - lo) / 2.0

    def to_json_dict(self) -> dict:
        return {
            "accessible_distance": self.accessible_distance,
            "graspable_aim": self.graspable_aim,
            "graspable_band": list(self.graspable_band),
            "dwell": self.dwell,
            "timeout": self.timeout,
        }


@dataclass(frozen=True)
class GuidanceEvent:
    kind: str  # "prompt" | "warning" | "status"
    text: str
    tick_index: int


@dataclass(frozen=True)
class GuidanceState:
    phase: Phase = Phase.IDLE
    target_kind: str | None = None
    start_tick: int | None = None
    dwell_ticks: int = 0
    success: bool | None = None
    fail_reason: str | None = None
    outcome: control.GraspOutcome | None = None
    prompt_ticks: tuple[tuple[str, int], ...] = ()

    def prompts_emitted(self) -> dict[str, int]:
        return dict(self.prompt_ticks)


def alignment_error(local: LocalDetection | None, thresholds: Thresholds) -> float:
    """Normalized worst-case alignment error; <= 1 exactly when graspable.

    Infinite when the wrist camera has no fix at all.
    """
    if local is None:
        return math.inf
    aim_term = local.aim_error / thresholds.graspable_aim
    dist_term = abs(local.distance - thresholds.band_center) / thresholds.band_half_width
    return max(aim_term, dist_term)


def _emit(events: list[GuidanceEvent], kind: str, text: str, tick: int) -> None:
    events.append(GuidanceEvent(kind, text, tick))


def _finish(
    state: GuidanceState,
    events: list[GuidanceEvent],
    tick: int,
    success: bool,
    reason: str | None,
    outcome: control.GraspOutcome | None = None,
) -> GuidanceState:
    prompt = PROMPT_SUCCESS if success else PROMPT_FAILED
    _emit(events, "prompt", prompt, tick)
    return replace(
        state,
        phase=Phase.DONE,
        success=success,
        fail_reason=reason,
        outcome=outcome if outcome is not None else state.outcome,
        prompt_ticks=state.prompt_ticks + ((prompt, tick),),
    )


def guidance_step(
    state: GuidanceState,
    world: WorldState,
    global_detections: list[GlobalDetection],
    local_detection: LocalDetection | None,
    intent: Command | None,
    thresholds: Thresholds,
    prosthesis: control.ProsthesisState | None = None,
) -> tuple[GuidanceState, list[GuidanceEvent]]:
    """Advance the protocol by at most one transition; pure in its state.

    Returns the successor state and the events raised this tick.  Commands
    that make no sense in the current phase produce warnings, not errors.
    """
    events: list[GuidanceEvent] = []
    tick = world.tick_index
    dt = world.arena.tick

    # A stalled trial fails by clock before anything else gets a say.
    if state.phase in _ACTIVE_PHASES and state.start_tick is not None:
        if (tick - state.start_tick) * dt >= thresholds.timeout:
            return _finish(state, events, tick, False, "timeout"), events

    if intent is not None:
        return _apply_intent(state, events, world, global_detections, intent, thresholds, prosthesis), events

    if state.phase == Phase.DETECTING:
        if any(d.category == state.target_kind for d in global_detections):
            return replace(state, phase=Phase.NAVIGATING), events
    elif state.phase == Phase.NAVIGATING:
        target = world.find(state.target_kind or "")
        if target is not None:
            dist, _ = relative_polar(world.avatar, (target.position[0], target.position[1]))
            if dist <= thresholds.accessible_distance:
                _emit(events, "prompt", PROMPT_ACCESSIBLE, tick)
                return (
                    replace(
                        state,
                        phase=Phase.ALIGNING,
                        prompt_ticks=state.prompt_ticks + ((PROMPT_ACCESSIBLE, tick),),
                    ),
                    events,
                )
    elif state.phase == Phase.ALIGNING:
        ok = (
            local_detection is not None
            and local_detection.aim_error <= thresholds.graspable_aim
            and thresholds.graspable_band[0] <= local_detection.distance <= thresholds.graspable_band[1]
        )
        dwell_ticks = state.dwell_ticks + 1 if ok else 0
        needed = max(1, math.ceil(thresholds.dwell / dt))
        if dwell_ticks >= needed:
            _emit(events, "prompt", PROMPT_GRASPABLE, tick)
            return (
                replace(
                    state,
                    phase=Phase.GRASPABLE,
                    dwell_ticks=dwell_ticks,
                    prompt_ticks=state.prompt_ticks + ((PROMPT_GRASPABLE, tick),),
                ),
                events,
            )
        return replace(state, dwell_ticks=dwell_ticks), events

    return state, events


def _apply_intent(
    state: GuidanceState,
    events: list[GuidanceEvent],
    world: WorldState,
    global_detections: list[GlobalDetection],
    intent: Command,
    thresholds: Thresholds,
    prosthesis: control.ProsthesisState | None,
) -> GuidanceState:
    tick = world.tick_index
    kind = intent.kind

    if kind == CommandKind.GRASP:
        if state.phase == Phase.IDLE:
            _emit(events, "prompt", PROMPT_DETECTING, tick)
            return replace(
                state,
                phase=Phase.DETECTING,
                target_kind=intent.target,
                start_tick=tick,
                prompt_ticks=state.prompt_ticks + ((PROMPT_DETECTING, tick),),
            )
        _emit(events, "warning", "a grasp task is already in progress", tick)
        return state

    if kind == CommandKind.STOP:
        if state.phase in _ACTIVE_PHASES:
            return _finish(state, events, tick, False, "aborted")
        _emit(events, "warning", "no grasp task to stop", tick)
        return state

    if kind == CommandKind.CLOSE_HAND:
        if state.phase == Phase.GRASPABLE:
            if prosthesis is None:
                raise ValueError("close-hand requires a prosthesis state")
            outcome = control.attempt_grasp(world, prosthesis, thresholds, state.target_kind or "bottle")
            return replace(state, phase=Phase.GRASPING, outcome=outcome)
        _emit(events, "warning", "close-hand ignored outside the graspable range", tick)
        return state

    if kind == CommandKind.OPEN_HAND:
        if state.phase == Phase.GRASPING:
            outcome = state.outcome
            success = outcome.success if outcome is not None else False
            reason = None if success else (outcome.reason if outcome is not None else "dropped")
            if prosthesis is not None:
                control.release(prosthesis)
            return _finish(state, events, tick, success, reason, outcome)
        _emit(events, "warning", "open-hand ignored while the hand is not closed", tick)
        return state

    # Status: report phase plus the freshest ranging on the target, if any.
    dist_text = "target not in view"
    for det in global_detections:
        if det.category == state.target_kind:
            dist_text = f"target {det.distance:.2f} m"
            break
    _emit(events, "status", f"phase {state.phase.value}, {dist_text}", tick)
    return state


def trial_clocks(
    events: Iterable[GuidanceEvent],
    dt: float,
    timeout: float,
) -> tuple[float, float]:
    """Reach and alignment durations, in seconds, from the prompt record.

    The reach clock spans detection start to the accessible prompt; the
    alignment clock spans accessible to graspable.  A leg the trial never
    completed is charged the full timeout.
    """
    ticks: dict[str, int] = {}
    for e in events:
        if e.kind == "prompt" and e.text not in ticks:
            ticks[e.text] = e.tick_index
    t1 = timeout
    t2 = timeout
    if PROMPT_DETECTING in ticks and PROMPT_ACCESSIBLE in ticks:
        t1 = (ticks[PROMPT_ACCESSIBLE] - ticks[PROMPT_DETECTING]) * dt
    if PROMPT_ACCESSIBLE in ticks and PROMPT_GRASPABLE in ticks:
        t2 = (ticks[PROMPT_GRASPABLE] - ticks[PROMPT_ACCESSIBLE]) * dt
    return (t1, t2)
