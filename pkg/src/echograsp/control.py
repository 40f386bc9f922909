"""Prosthesis control: gesture selection, collaborative wrist roll, grasping.

Gesture choice and the wrist-roll servo run off camera measurements; the
grasp attempt itself is judged on true contact geometry, the way physical
contact would settle the question regardless of what the sensors claimed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .perception import LocalDetection
from .world import (
    SceneObject,
    WorldState,
    aim_error_degrees,
    angle_between_degrees,
    axis_misalignment_degrees,
    clamp,
    vec_norm,
    wrist_target_vector,
    Z_AXIS,
)

if TYPE_CHECKING:
    from .guidance import Thresholds


class GraspGesture(str, Enum):
    CYLINDRICAL_POWER = "cylindrical_power"
    SPHERICAL = "spherical"
    LATERAL_PINCH = "lateral_pinch"
    PRECISION_PINCH = "precision_pinch"


# Category to gesture, for targets the hand knows how to hold.
GESTURE_TABLE: dict[str, GraspGesture] = {
    "bottle": GraspGesture.CYLINDRICAL_POWER,
}

# A known object tipped this far off vertical gets a side pinch instead of
# its table gesture; unknown categories fall back to a cautious pinch.
AXIS_TILT_FLIP_DEG = 45.0
FALLBACK_GESTURE = GraspGesture.PRECISION_PINCH

# Contact tolerances for a stable hold.
AXIS_TOLERANCE_DEG = 25.0
WRIST_RATE_LIMIT_DEG_S = 90.0
CLOSED_APERTURE = 0.35

GRASP_FAIL_REASONS = ("aim_error", "distance", "gesture_mismatch", "dropped")


@dataclass
class ProsthesisState:
    aperture: float = 1.0  # 1 fully open, 0 fully closed
    wrist_rotation: float = 0.0  # mirror of the wrist pose roll, degrees
    gesture: GraspGesture = FALLBACK_GESTURE
    holding: bool = False


@dataclass(frozen=True)
class GraspOutcome:
    success: bool
    reason: str  # "ok" or one of GRASP_FAIL_REASONS


def select_gesture(category: str, principal_axis) -> tuple[GraspGesture, str | None]:
    """Pick a hand preshape for a target; returns (gesture, optional warning)."""
    tilt = angle_between_degrees(principal_axis, Z_AXIS)
    if tilt > 90.0:
        tilt = 180.0 - tilt
    if category not in GESTURE_TABLE:
        return FALLBACK_GESTURE, f"no gesture mapping for '{category}', using fallback pinch"
    if tilt > AXIS_TILT_FLIP_DEG:
        return GraspGesture.LATERAL_PINCH, None
    return GESTURE_TABLE[category], None


def wrist_setpoint(local: LocalDetection, dt: float) -> float:
    """Roll delta for one tick, chasing the measured axis offset.

    Rate-limited so a large offset is worked off over several ticks instead
    of snapping.
    """
    limit = WRIST_RATE_LIMIT_DEG_S * dt
    return clamp(local.object_axis_angle, -limit, limit)


def attempt_grasp(
    world: WorldState,
    prosthesis: ProsthesisState,
    thresholds: "Thresholds",
    target_kind: str = "bottle",
) -> GraspOutcome:
    """Judge a hand-close on true geometry and update the prosthesis.

    Checks run in a fixed order and the first failure wins: aim error, then
    standoff distance, then gesture match, then axis roll (a misrolled
    object slips out of the closing hand, hence "dropped").
    """
    obj = world.find(target_kind)
    if obj is None:
        return GraspOutcome(False, "distance")
    aim = aim_error_degrees(world, obj.position)
    dist = vec_norm(wrist_target_vector(world, obj.position))
    if aim > thresholds.graspable_aim:
        return GraspOutcome(False, "aim_error")
    lo, hi = thresholds.graspable_band
    if not lo <= dist <= hi:
        return GraspOutcome(False, "distance")
    wanted, _ = select_gesture(obj.kind, obj.principal_axis)
    if prosthesis.gesture != wanted:
        return GraspOutcome(False, "gesture_mismatch")
    if abs(axis_misalignment_degrees(world, obj)) > AXIS_TOLERANCE_DEG:
        return GraspOutcome(False, "dropped")
    prosthesis.holding = True
    prosthesis.aperture = CLOSED_APERTURE
    return GraspOutcome(True, "ok")


def release(prosthesis: ProsthesisState) -> None:
    prosthesis.holding = False
    prosthesis.aperture = 1.0
