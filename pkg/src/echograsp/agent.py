"""Scripted stand-in for a blindfolded subject.

The agent hears exactly what a person would: the stereo cue, the beep
cadence, and the spoken prompts.  Beyond that it only knows its own issued
commands (an efferent copy of where it believes its arm is).  It never reads
world geometry, so guidance quality, not privileged information, determines
how fast trials finish.

Navigation decodes direction from the stereo gains and walks it down, easing
off as the beacon gets loud.  Alignment first swings the wrist toward the
beep's apparent direction, then reaches forward until the cadence comes
alive, then runs a greedy coordinate descent on beep period, and finally
freezes once the cadence is fast enough for the dwell to accumulate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from random import Random

from .feedback import AudioCue, BEEP_PERIOD_MAX_MS, BEEP_PERIOD_MIN_MS
from .guidance import (
    GuidanceEvent,
    PROMPT_ACCESSIBLE,
    PROMPT_FAILED,
    PROMPT_GRASPABLE,
    PROMPT_SUCCESS,
)
from .voice import Command, CommandKind
from .world import ArenaConfig, ControlInput, WristPose, clamp, normalize_degrees

DEG = math.pi / 180.0

DEADBAND_DEG = 10.0  # heading error below this reads as "close enough"
WARMUP_TICKS = 30  # unfamiliar subjects hesitate before committing
SQUARE_UP_DEG = 20.0  # body turns toward a beep farther off-axis than this
COARSE_TOLERANCE_DEG = 3.0  # wrist swings toward the beep until within this
COARSE_RATE_DEG = 1.5  # per tick
AIM_STEP_DEG = 1.0  # coordinate-descent step sizes
REACH_STEP_M = 0.01
CREEP_SPEED_M_S = 0.05
OPEN_DELAY_S = 1.0  # hold duration before letting go
HUNT_ELEVATION_DOWN = -60.0  # elevation sweep bounds for a dead cadence
HUNT_ELEVATION_UP = 30.0

# Beep periods bracketing the freeze/resume hysteresis, from the cadence map.
_SPAN = BEEP_PERIOD_MAX_MS - BEEP_PERIOD_MIN_MS
HOLD_PERIOD_MS = BEEP_PERIOD_MIN_MS + 0.30 * _SPAN
RESUME_PERIOD_MS = BEEP_PERIOD_MIN_MS + 0.45 * _SPAN

# Anything this slow means the cadence is pinned at its ceiling.
_DEAD_PERIOD_MS = BEEP_PERIOD_MAX_MS - 1.0

# Probe order: distance first (the dominant error after the reach-in),
# then azimuth, then elevation.
_PROBE_CURSOR: tuple[tuple[str, float], ...] = (
    ("reach", 1.0),
    ("azimuth", 1.0),
    ("azimuth", -1.0),
    ("elevation", 1.0),
    ("elevation", -1.0),
    ("reach", -1.0),
)


@dataclass(frozen=True)
class AgentParams:
    azimuth_estimate_sigma: float = 0.0  # degrees of error decoding direction
    tremor_sigma: float = 0.0  # degrees per tick of involuntary aim jitter
    reaction_delay: float = 0.3  # seconds from graspable prompt to hand close
    gait_speed: float = 0.6  # m/s preferred walking speed
    holds_arm: bool = False  # bracing the forearm halves effective tremor
    familiar: bool = False  # practiced subjects skip the initial hesitation

    def __post_init__(self) -> None:
        if self.azimuth_estimate_sigma < 0 or self.tremor_sigma < 0:
            raise ValueError("noise sigmas must be non-negative")
        if self.reaction_delay < 0:
            raise ValueError("reaction_delay must be non-negative")
        if self.gait_speed <= 0:
            raise ValueError("gait_speed must be positive")

    def effective_tremor_sigma(self) -> float:
        return self.tremor_sigma * (0.5 if self.holds_arm else 1.0)

    def to_json_dict(self) -> dict:
        return {
            "azimuth_estimate_sigma": self.azimuth_estimate_sigma,
            "tremor_sigma": self.tremor_sigma,
            "reaction_delay": self.reaction_delay,
            "gait_speed": self.gait_speed,
            "holds_arm": self.holds_arm,
            "familiar": self.familiar,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "AgentParams":
        known = {f: data[f] for f in cls.__dataclass_fields__ if f in data}
        extra = set(data) - set(cls.__dataclass_fields__)
        if extra:
            raise ValueError(f"unknown agent parameters: {sorted(extra)}")
        return cls(**known)


@dataclass
class AgentState:
    mode: str = "navigate"  # navigate | align | handoff | done
    ticks: int = 0
    # Efferent copy of the commanded arm pose; jitter is invisible to it.
    aim_azimuth_est: float = 0.0
    aim_elevation_est: float = 0.0
    reach_est: float = 0.0
    # Alignment bookkeeping.
    reach_in: bool = True
    creep: bool = False
    hold: bool = False
    hunt_down: bool = True
    cursor: int = 0
    probe: tuple[str, float] | None = None
    baseline_period: float = math.inf
    # Handoff bookkeeping.
    graspable_tick: int | None = None
    close_tick: int | None = None
    close_sent: bool = False
    open_sent: bool = False


def initial_state(wrist: WristPose) -> AgentState:
    """Seed the efferent copy from the resting arm pose."""
    return AgentState(
        aim_azimuth_est=wrist.aim_azimuth,
        aim_elevation_est=wrist.aim_elevation,
        reach_est=wrist.offset[0],
    )


def decode_azimuth(left_gain: float, right_gain: float) -> float:
    """Bearing in degrees recovered from a stereo gain pair.

    Inverts the constant-power pan; unambiguous only inside the front
    hemifield, which is the only place the agent relies on it.
    """
    l2 = left_gain * left_gain
    r2 = right_gain * right_gain
    total = l2 + r2
    if total <= 0.0:
        return 0.0
    p = clamp((r2 - l2) / total, -1.0, 1.0)
    return math.asin(p) / DEG


def _decode_azimuth(cue: AudioCue, params: AgentParams, rng: Random) -> float:
    theta = decode_azimuth(cue.left_gain, cue.right_gain)
    if params.azimuth_estimate_sigma > 0.0:
        theta += rng.gauss(0.0, params.azimuth_estimate_sigma)
    return theta


def _loudness(cue: AudioCue) -> float:
    return min(1.0, math.sqrt(cue.left_gain * cue.left_gain + cue.right_gain * cue.right_gain))


def _apply_probe(inp: ControlInput, state: AgentState, coord: str, step: float) -> None:
    if coord == "reach":
        inp.reach_delta += step * REACH_STEP_M
        state.reach_est += step * REACH_STEP_M
    elif coord == "azimuth":
        inp.aim_azimuth_delta += step * AIM_STEP_DEG
        state.aim_azimuth_est = normalize_degrees(state.aim_azimuth_est + step * AIM_STEP_DEG)
    else:
        inp.aim_elevation_delta += step * AIM_STEP_DEG
        state.aim_elevation_est = clamp(state.aim_elevation_est + step * AIM_STEP_DEG, -90.0, 90.0)


def agent_policy(
    cue: AudioCue | None,
    events: list[GuidanceEvent],
    state: AgentState,
    params: AgentParams,
    rng: Random,
    arena: ArenaConfig,
) -> tuple[ControlInput, Command | None]:
    """One tick of behavior; mutates the agent state, returns actuation.

    The optional command is the agent speaking (hand close/open); the caller
    delivers it on the next tick, which stands in for vocal latency.
    """
    state.ticks += 1
    inp = ControlInput(tremor_sigma=params.effective_tremor_sigma())
    intent: Command | None = None

    prompts = {e.text for e in events if e.kind == "prompt"}
    if PROMPT_SUCCESS in prompts or PROMPT_FAILED in prompts:
        state.mode = "done"
    elif PROMPT_GRASPABLE in prompts and state.mode != "handoff":
        state.mode = "handoff"
        state.graspable_tick = state.ticks
    elif PROMPT_ACCESSIBLE in prompts and state.mode == "navigate":
        state.mode = "align"

    if state.mode == "navigate":
        _navigate(cue, state, params, rng, arena, inp)
    elif state.mode == "align":
        _align(cue, state, params, rng, arena, inp)
    elif state.mode == "handoff":
        intent = _handoff(state, params, arena)
    return inp, intent


def _navigate(
    cue: AudioCue | None,
    state: AgentState,
    params: AgentParams,
    rng: Random,
    arena: ArenaConfig,
    inp: ControlInput,
) -> None:
    if cue is None or cue.source != "beacon":
        return
    theta = _decode_azimuth(cue, params, rng)
    hesitant = not params.familiar and state.ticks <= WARMUP_TICKS
    if abs(theta) > DEADBAND_DEG:
        rate = clamp(theta / arena.tick, -arena.omega_max, arena.omega_max)
        inp.turn = rate * (0.5 if hesitant else 1.0)
    elif not hesitant:
        # Loudness shrinks the stride: a confident walk far out, a shuffle
        # close in, stopping before the stereo field collapses overhead.
        inp.forward = clamp(params.gait_speed * (1.0 - _loudness(cue)), 0.0, arena.v_max)


def _align(
    cue: AudioCue | None,
    state: AgentState,
    params: AgentParams,
    rng: Random,
    arena: ArenaConfig,
    inp: ControlInput,
) -> None:
    if cue is None or cue.source != "proximity":
        return
    period = cue.beep_period_ms if cue.beep_period_ms is not None else math.inf

    apparent = _decode_azimuth(cue, params, rng)

    # Square the body up first: a beep far off to one side means reaching
    # would sweep the hand across the target, so turn toward it while the
    # cadence is still dead.  (Constant-power panning also folds past 90
    # degrees, so estimates out there cannot be trusted anyway.)
    if period > _DEAD_PERIOD_MS and abs(apparent) > SQUARE_UP_DEG:
        inp.turn = clamp(apparent / arena.tick, -arena.omega_max, arena.omega_max)
        state.probe = None
        state.baseline_period = period
        return

    # Swing the wrist toward where the beep sounds before anything subtler.
    swing = normalize_degrees(apparent - state.aim_azimuth_est)
    if abs(swing) > COARSE_TOLERANCE_DEG:
        delta = clamp(swing, -COARSE_RATE_DEG, COARSE_RATE_DEG)
        inp.aim_azimuth_delta = delta
        state.aim_azimuth_est = normalize_degrees(state.aim_azimuth_est + delta)
        state.probe = None  # the ground moved under any pending probe
        state.baseline_period = period
        return

    # Reach toward the table until the cadence wakes up.
    if state.reach_in:
        if period <= _DEAD_PERIOD_MS:
            state.reach_in = False
        elif state.reach_est >= arena.reach_max - 1e-9:
            state.reach_in = False
            state.creep = True  # arm is maxed and the beep is still dead
        else:
            _apply_probe(inp, state, "reach", 1.0)
            state.baseline_period = period
            return

    if state.creep:
        if period <= _DEAD_PERIOD_MS:
            state.creep = False
        else:
            inp.forward = CREEP_SPEED_M_S
            return

    # Freeze while the cadence is fast so the dwell clock can run out.
    if state.hold:
        if period > RESUME_PERIOD_MS:
            state.hold = False
        else:
            return

    # A cadence pinned at its ceiling reads the same for every probe, so
    # the descent below would revert forever.  Stereo carries no up/down,
    # and azimuth and reach are already spent, so grope in elevation:
    # sweep down toward the table, then back up, until the beep wakes.
    if period > _DEAD_PERIOD_MS:
        state.probe = None
        target = HUNT_ELEVATION_DOWN if state.hunt_down else HUNT_ELEVATION_UP
        delta = clamp(target - state.aim_elevation_est, -COARSE_RATE_DEG, COARSE_RATE_DEG)
        if abs(delta) < 1e-9:
            state.hunt_down = not state.hunt_down
        else:
            inp.aim_elevation_delta = delta
            state.aim_elevation_est = clamp(state.aim_elevation_est + delta, -90.0, 90.0)
        state.baseline_period = period
        return

    if state.probe is None:
        if period <= HOLD_PERIOD_MS:
            state.hold = True
            return
        state.baseline_period = period
        coord, step = _PROBE_CURSOR[state.cursor]
        _apply_probe(inp, state, coord, step)
        state.probe = (coord, step)
    else:
        coord, step = state.probe
        if period + 1e-9 < state.baseline_period:
            # Paying off: keep stepping the same way.
            state.baseline_period = period
            _apply_probe(inp, state, coord, step)
        else:
            # No better: put it back, try the next direction.
            _apply_probe(inp, state, coord, -step)
            state.probe = None
            state.cursor = (state.cursor + 1) % len(_PROBE_CURSOR)


def _handoff(state: AgentState, params: AgentParams, arena: ArenaConfig) -> Command | None:
    delay_ticks = max(1, math.ceil(params.reaction_delay / arena.tick))
    open_ticks = max(1, math.ceil(OPEN_DELAY_S / arena.tick))
    if not state.close_sent:
        if state.graspable_tick is not None and state.ticks - state.graspable_tick >= delay_ticks:
            state.close_sent = True
            state.close_tick = state.ticks
            return Command(CommandKind.CLOSE_HAND)
    elif not state.open_sent:
        if state.close_tick is not None and state.ticks - state.close_tick >= open_ticks:
            state.open_sent = True
            return Command(CommandKind.OPEN_HAND)
    return None
