"""Simulated cameras: a head-mounted global detector and a wrist-local one.

Both report ground-truth geometry corrupted by Gaussian noise drawn from the
world's generator.  Detection gating (range and cone checks) happens on the
true geometry; noise only perturbs the reported measurements.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

from .world import (
    WorldState,
    aim_error_degrees,
    axis_misalignment_degrees,
    normalize_degrees,
    relative_polar,
    vec_norm,
    wrist_target_vector,
)


@dataclass(frozen=True)
class CameraModel:
    fov_half_angle: float  # degrees
    max_range: float  # meters
    range_noise_sigma: float
    bearing_noise_sigma: float  # degrees

    def __post_init__(self) -> None:
        if not 0 < self.fov_half_angle <= 180:
            raise ValueError("fov_half_angle must be in (0, 180]")
        if self.max_range <= 0:
            raise ValueError("max_range must be positive")
        if self.range_noise_sigma < 0 or self.bearing_noise_sigma < 0:
            raise ValueError("noise sigmas must be non-negative")

    def to_json_dict(self) -> dict:
        return {
            "fov_half_angle": self.fov_half_angle,
            "max_range": self.max_range,
            "range_noise_sigma": self.range_noise_sigma,
            "bearing_noise_sigma": self.bearing_noise_sigma,
        }


def head_camera() -> CameraModel:
    return CameraModel(fov_half_angle=30.0, max_range=6.0, range_noise_sigma=0.05, bearing_noise_sigma=2.0)


def wrist_camera() -> CameraModel:
    return CameraModel(fov_half_angle=35.0, max_range=0.5, range_noise_sigma=0.01, bearing_noise_sigma=1.0)


@dataclass(frozen=True)
class GlobalDetection:
    category: str
    distance: float  # meters, >= 0
    azimuth: float  # degrees relative to heading, (-180, 180]


@dataclass(frozen=True)
class LocalDetection:
    distance: float  # wrist to grasp point, meters, >= 0
    aim_error: float  # degrees between aim ray and target direction, >= 0
    object_axis_angle: float  # signed roll offset to the object axis, degrees


def global_detect(world: WorldState, camera: CameraModel, rng: Random) -> list[GlobalDetection]:
    """Objects inside the head camera's range and azimuth cone (inclusive)."""
    found: list[GlobalDetection] = []
    for obj in world.objects:
        dist, az = relative_polar(world.avatar, (obj.position[0], obj.position[1]))
        if dist > camera.max_range or abs(az) > camera.fov_half_angle:
            continue
        if camera.range_noise_sigma > 0.0:
            dist = max(0.0, dist + rng.gauss(0.0, camera.range_noise_sigma))
        if camera.bearing_noise_sigma > 0.0:
            az = normalize_degrees(az + rng.gauss(0.0, camera.bearing_noise_sigma))
        found.append(GlobalDetection(obj.kind, dist, az))
    return found


def local_detect(
    world: WorldState,
    camera: CameraModel,
    rng: Random,
    target_kind: str = "bottle",
) -> LocalDetection | None:
    """Wrist-camera fix on the grasp target, or None when out of the cone."""
    obj = world.find(target_kind)
    if obj is None:
        return None
    to_target = wrist_target_vector(world, obj.position)
    dist = vec_norm(to_target)
    aim = aim_error_degrees(world, obj.position)
    if dist > camera.max_range or aim > camera.fov_half_angle:
        return None
    axis = axis_misalignment_degrees(world, obj)
    if camera.range_noise_sigma > 0.0:
        dist = max(0.0, dist + rng.gauss(0.0, camera.range_noise_sigma))
    if camera.bearing_noise_sigma > 0.0:
        aim = max(0.0, aim + rng.gauss(0.0, camera.bearing_noise_sigma))
        axis = axis + rng.gauss(0.0, camera.bearing_noise_sigma)
    return LocalDetection(distance=dist, aim_error=aim, object_axis_angle=axis)
