"""Non-visual feedback synthesis: stereo beacon rendering and proximity beeps.

Azimuth is encoded three ways at once, the way a listener would hear it:
constant-power panning, an interaural time difference from a spherical-head
path-length model, and overall level falling off with distance.  Alignment
quality is encoded as beep cadence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .guidance import Phase, Thresholds, alignment_error
from .perception import LocalDetection
from .world import (
    DEG,
    WorldState,
    clamp,
    normalize_degrees,
    relative_polar,
    vec_norm,
    wrist_target_vector,
    wrist_world_position,
)

HEAD_RADIUS_M = 0.0875
SPEED_OF_SOUND_M_S = 343.0

# Level model: unity gain inside the reference distance, then 1/r.
REFERENCE_DISTANCE_M = 0.5
MIN_DISTANCE_M = 0.1

BEEP_PERIOD_MIN_MS = 80.0
BEEP_PERIOD_MAX_MS = 1000.0


@dataclass(frozen=True)
class AudioCue:
    left_gain: float
    right_gain: float
    itd_us: float  # positive means the right ear leads
    beep_period_ms: float | None  # None for the continuous beacon tone
    source: str  # "beacon" | "proximity"

    def to_json_dict(self) -> dict:
        return {
            "left_gain": self.left_gain,
            "right_gain": self.right_gain,
            "itd_us": self.itd_us,
            "beep_period_ms": self.beep_period_ms,
            "source": self.source,
        }


def attenuation(distance_m: float) -> float:
    """Distance gain in [0, 1]; clamps below MIN_DISTANCE_M to avoid blowup."""
    return min(1.0, REFERENCE_DISTANCE_M / max(distance_m, MIN_DISTANCE_M))


def woodworth_itd_us(azimuth_deg: float) -> float:
    """Interaural time difference, microseconds, spherical-head path model.

    Antisymmetric in azimuth, zero at dead ahead and dead behind, maximal
    near +/-90 degrees.
    """
    az = normalize_degrees(azimuth_deg)
    theta = abs(az) * DEG
    scale = HEAD_RADIUS_M / SPEED_OF_SOUND_M_S
    if theta <= math.pi / 2.0:
        itd = scale * (theta + math.sin(theta))
    else:
        itd = scale * (math.pi - theta + math.sin(theta))
    return math.copysign(itd * 1e6, az) if az != 0.0 else 0.0


def spatial_cue(
    azimuth_deg: float,
    distance_m: float,
    source: str = "beacon",
    beep_period_ms: float | None = None,
) -> AudioCue:
    """Render a direction and distance into stereo gains plus an ITD."""
    a = attenuation(distance_m)
    p = math.sin(normalize_degrees(azimuth_deg) * DEG)
    left = a * math.sqrt((1.0 - p) / 2.0)
    right = a * math.sqrt((1.0 + p) / 2.0)
    return AudioCue(
        left_gain=left,
        right_gain=right,
        itd_us=woodworth_itd_us(azimuth_deg),
        beep_period_ms=beep_period_ms,
        source=source,
    )


def proximity_cue(alignment_err: float) -> float:
    """Beep period in milliseconds: shortest at perfect alignment.

    Linear in the clamped error, spanning [BEEP_PERIOD_MIN_MS,
    BEEP_PERIOD_MAX_MS] over error [0, 1].
    """
    e = clamp(alignment_err, 0.0, 1.0)
    return BEEP_PERIOD_MIN_MS + (BEEP_PERIOD_MAX_MS - BEEP_PERIOD_MIN_MS) * e


def cue_for_phase(
    phase: Phase,
    world: WorldState,
    local_detection: LocalDetection | None = None,
    thresholds: Thresholds | None = None,
) -> AudioCue | None:
    """The audio cue a listener hears in the current phase, if any.

    Detection and navigation render the table-mounted beacon relative to the
    head; alignment renders the beep spatialized on the wrist-to-target
    direction, its cadence driven by the measured alignment error (slowest
    cadence when the wrist camera has no fix).  Other phases are silent.
    """
    if phase in (Phase.DETECTING, Phase.NAVIGATING):
        beacon = world.find("sound_source")
        if beacon is None:
            return None
        dist, az = relative_polar(world.avatar, (beacon.position[0], beacon.position[1]))
        return spatial_cue(az, dist, source="beacon")
    if phase in (Phase.ALIGNING, Phase.GRASPABLE):
        bottle = world.find("bottle")
        if bottle is None:
            return None
        v = wrist_target_vector(world, bottle.position)
        dist = vec_norm(v)
        bearing = math.atan2(v[1], v[0]) / DEG
        az = normalize_degrees(bearing - world.avatar.heading)
        err = alignment_error(local_detection, thresholds or Thresholds())
        return spatial_cue(az, dist, source="proximity", beep_period_ms=proximity_cue(err))
    return None
