"""Arena geometry, target placement, and avatar/wrist kinematics.

The world advances on a fixed timestep.  Everything random flows through one
seeded ``random.Random`` owned by the state, so a given seed plus the same
input sequence reproduces the exact same state sequence (replay works from a
seed and an input log; serialized frames carry a digest of the generator
state so divergence is detectable).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from random import Random

DEG = math.pi / 180.0

# Leak factor for the wrist jitter state: an AR(1) process rather than a pure
# random walk, so jitter stays bounded while remaining temporally correlated.
TREMOR_DECAY = 0.9


def normalize_degrees(angle: float) -> float:
    """Map an angle in degrees to the half-open interval (-180, 180]."""
    a = math.fmod(angle, 360.0)
    if a <= -180.0:
        a += 360.0
    elif a > 180.0:
        a -= 360.0
    return a


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


# --- small 3-vector helpers (plain tuples keep the hot loop cheap) ---

Vec3 = tuple[float, float, float]

Z_AXIS: Vec3 = (0.0, 0.0, 1.0)


def vec_sub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vec_dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def vec_cross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def vec_norm(a: Vec3) -> float:
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def vec_scale(a: Vec3, s: float) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


def vec_normalize(a: Vec3) -> Vec3:
    n = vec_norm(a)
    if n < 1e-12:
        raise ValueError("cannot normalize a zero vector")
    return (a[0] / n, a[1] / n, a[2] / n)


def rotate_z(v: Vec3, degrees: float) -> Vec3:
    c = math.cos(degrees * DEG)
    s = math.sin(degrees * DEG)
    return (v[0] * c - v[1] * s, v[0] * s + v[1] * c, v[2])


def rotate_about(v: Vec3, axis: Vec3, degrees: float) -> Vec3:
    """Rodrigues rotation of v about a unit axis."""
    theta = degrees * DEG
    c = math.cos(theta)
    s = math.sin(theta)
    k = axis
    kxv = vec_cross(k, v)
    kdv = vec_dot(k, v)
    return (
        v[0] * c + kxv[0] * s + k[0] * kdv * (1.0 - c),
        v[1] * c + kxv[1] * s + k[1] * kdv * (1.0 - c),
        v[2] * c + kxv[2] * s + k[2] * kdv * (1.0 - c),
    )


def angle_between_degrees(a: Vec3, b: Vec3) -> float:
    na = vec_norm(a)
    nb = vec_norm(b)
    if na < 1e-12 or nb < 1e-12:
        return 0.0
    cosv = clamp(vec_dot(a, b) / (na * nb), -1.0, 1.0)
    return math.acos(cosv) / DEG


def signed_angle_about(frm: Vec3, to: Vec3, axis: Vec3) -> float:
    """Signed angle in degrees from one vector to another around an axis."""
    unsigned = angle_between_degrees(frm, to)
    if vec_dot(vec_cross(frm, to), axis) < 0.0:
        return -unsigned
    return unsigned


@dataclass(frozen=True)
class ArenaConfig:
    """Fan-shaped test arena plus locomotion and reach limits."""

    radius: float = 5.0
    span: float = 120.0  # total angular width, degrees
    segment_count: int = 10
    tick: float = 0.02  # seconds
    table_height: float = 0.75
    grasp_height: float = 0.85  # height of the bottle grasp point
    table_stop_distance: float = 0.3  # avatar halts this close to the table
    v_max: float = 1.2  # m/s
    omega_max: float = 120.0  # deg/s
    reach_min: float = 0.2  # wrist forward offset limits, meters
    reach_max: float = 0.6

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if not 0 < self.span <= 360:
            raise ValueError("span must be in (0, 360]")
        if self.segment_count < 1:
            raise ValueError("segment_count must be at least 1")
        if self.tick <= 0:
            raise ValueError("tick must be positive")
        if self.v_max <= 0 or self.omega_max <= 0:
            raise ValueError("motion limits must be positive")
        if not 0 < self.reach_min < self.reach_max:
            raise ValueError("reach limits must satisfy 0 < min < max")

    def to_json_dict(self) -> dict:
        return {
            "radius": self.radius,
            "span": self.span,
            "segment_count": self.segment_count,
            "tick": self.tick,
            "table_height": self.table_height,
            "grasp_height": self.grasp_height,
            "table_stop_distance": self.table_stop_distance,
            "v_max": self.v_max,
            "omega_max": self.omega_max,
            "reach_min": self.reach_min,
            "reach_max": self.reach_max,
        }


@dataclass
class AvatarPose:
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0  # degrees, (-180, 180], 0 points along +x


# Resting wrist pose in the avatar frame (+x forward, +y left, +z up): hand a
# little forward and to the right of the chest, near table height, aimed
# slightly downward so table-top targets start inside the local camera cone.
DEFAULT_WRIST_OFFSET: Vec3 = (0.4, -0.15, 0.9)
DEFAULT_AIM_ELEVATION = -10.0


@dataclass
class WristPose:
    offset: Vec3 = DEFAULT_WRIST_OFFSET  # avatar frame
    aim_azimuth: float = 0.0  # degrees relative to heading
    aim_elevation: float = DEFAULT_AIM_ELEVATION
    rotation: float = 0.0  # roll about the aim direction
    tremor_azimuth: float = 0.0  # involuntary jitter, part of the true pose
    tremor_elevation: float = 0.0

    def effective_azimuth(self) -> float:
        return normalize_degrees(self.aim_azimuth + self.tremor_azimuth)

    def effective_elevation(self) -> float:
        return clamp(self.aim_elevation + self.tremor_elevation, -90.0, 90.0)


@dataclass
class SceneObject:
    kind: str  # "table" | "bottle" | "sound_source"
    position: Vec3
    principal_axis: Vec3 = Z_AXIS
    placement_index: int = 0

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "position": list(self.position),
            "principal_axis": list(self.principal_axis),
            "placement_index": self.placement_index,
        }


@dataclass
class ControlInput:
    """One tick worth of actuation, sampled at the tick boundary."""

    forward: float = 0.0  # m/s, clamped to +/- v_max
    turn: float = 0.0  # deg/s, clamped to +/- omega_max
    aim_azimuth_delta: float = 0.0  # degrees per tick
    aim_elevation_delta: float = 0.0
    reach_delta: float = 0.0  # meters per tick along the avatar's forward axis
    rotation_delta: float = 0.0  # wrist roll, degrees per tick
    tremor_sigma: float = 0.0  # degrees per tick of involuntary aim jitter


def placement_angle(index: int, arena: ArenaConfig) -> float:
    """Center angle of a fan segment, degrees, counted from -span/2."""
    if not 0 <= index < arena.segment_count:
        raise ValueError(f"placement index {index} out of range")
    return -arena.span / 2.0 + (2 * index + 1) * arena.span / (2.0 * arena.segment_count)


def placement_pose(index: int, arena: ArenaConfig) -> tuple[float, float]:
    """Table-center coordinates for a placement segment on the arena arc."""
    phi = placement_angle(index, arena) * DEG
    return (arena.radius * math.cos(phi), arena.radius * math.sin(phi))


def allowed_placements(previous: int | None, segment_count: int) -> list[int]:
    if previous is None:
        return list(range(segment_count))
    if not 0 <= previous < segment_count:
        raise ValueError(f"previous placement {previous} out of range")
    return [i for i in range(segment_count) if abs(i - previous) >= 2]


def sample_placement(previous: int | None, rng: Random, segment_count: int = 10) -> int:
    """Uniform draw over segments at least two indices away from the previous."""
    allowed = allowed_placements(previous, segment_count)
    if not allowed:
        raise ValueError("no placement satisfies the separation constraint")
    return allowed[rng.randrange(len(allowed))]


@dataclass
class WorldState:
    arena: ArenaConfig
    avatar: AvatarPose
    wrist: WristPose
    objects: list[SceneObject] = field(default_factory=list)
    tick_index: int = 0
    seed: int = 0
    rng: Random = field(default_factory=Random)

    @classmethod
    def create(cls, arena: ArenaConfig | None = None, seed: int = 0) -> "WorldState":
        return cls(
            arena=arena or ArenaConfig(),
            avatar=AvatarPose(),
            wrist=WristPose(),
            seed=seed,
            rng=Random(seed),
        )

    def find(self, kind: str) -> SceneObject | None:
        for obj in self.objects:
            if obj.kind == kind:
                return obj
        return None

    def reset_avatar(self) -> None:
        self.avatar = AvatarPose()
        self.wrist = WristPose()

    def place_scene(self, placement_index: int) -> None:
        """Put the table, bottle, and beacon speaker at a fan segment."""
        x, y = placement_pose(placement_index, self.arena)
        a = self.arena
        self.objects = [
            SceneObject("table", (x, y, a.table_height), Z_AXIS, placement_index),
            SceneObject("bottle", (x, y, a.grasp_height), Z_AXIS, placement_index),
            SceneObject("sound_source", (x, y, a.table_height), Z_AXIS, placement_index),
        ]

    def rng_digest(self) -> str:
        return hashlib.sha256(repr(self.rng.getstate()).encode()).hexdigest()[:16]

    def to_json_dict(self) -> dict:
        w = self.wrist
        return {
            "tick_index": self.tick_index,
            "seed": self.seed,
            "avatar": {
                "x": self.avatar.x,
                "y": self.avatar.y,
                "heading": self.avatar.heading,
            },
            "wrist": {
                "offset": list(w.offset),
                "aim_azimuth": w.aim_azimuth,
                "aim_elevation": w.aim_elevation,
                "rotation": w.rotation,
                "tremor_azimuth": w.tremor_azimuth,
                "tremor_elevation": w.tremor_elevation,
            },
            "objects": [o.to_json_dict() for o in self.objects],
            "rng_state": self.rng_digest(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))


def relative_polar(listener: AvatarPose, source_xy: tuple[float, float]) -> tuple[float, float]:
    """Planar (distance, azimuth) of a point relative to a pose.

    Azimuth is measured counterclockwise from the listener's heading and
    normalized to (-180, 180]; a coincident source reports azimuth 0.
    """
    dx = source_xy[0] - listener.x
    dy = source_xy[1] - listener.y
    dist = math.hypot(dx, dy)
    if dist < 1e-12:
        return (0.0, 0.0)
    bearing = math.atan2(dy, dx) / DEG
    return (dist, normalize_degrees(bearing - listener.heading))


def wrist_world_position(state: WorldState) -> Vec3:
    off = rotate_z(state.wrist.offset, state.avatar.heading)
    return (state.avatar.x + off[0], state.avatar.y + off[1], off[2])


def wrist_aim_direction(state: WorldState) -> Vec3:
    """Unit vector of the wrist aim ray in world coordinates (jitter included)."""
    az = (state.avatar.heading + state.wrist.effective_azimuth()) * DEG
    el = state.wrist.effective_elevation() * DEG
    ce = math.cos(el)
    return (ce * math.cos(az), ce * math.sin(az), math.sin(el))


def wrist_up_vector(state: WorldState) -> Vec3:
    """Wrist "up" after applying roll about the aim direction.

    The zero-roll reference is world-up projected perpendicular to the aim
    ray; for a near-vertical aim any horizontal reference is equally valid.
    """
    d = wrist_aim_direction(state)
    ref = vec_sub(Z_AXIS, vec_scale(d, vec_dot(Z_AXIS, d)))
    if vec_norm(ref) < 1e-9:
        ref = (math.cos(state.avatar.heading * DEG), math.sin(state.avatar.heading * DEG), 0.0)
        ref = vec_sub(ref, vec_scale(d, vec_dot(ref, d)))
    ref = vec_normalize(ref)
    return rotate_about(ref, d, state.wrist.rotation)


def wrist_target_vector(state: WorldState, target: Vec3) -> Vec3:
    return vec_sub(target, wrist_world_position(state))


def aim_error_degrees(state: WorldState, target: Vec3) -> float:
    """Angle between the wrist aim ray and the wrist-to-target direction."""
    v = wrist_target_vector(state, target)
    if vec_norm(v) < 1e-12:
        return 0.0
    return angle_between_degrees(wrist_aim_direction(state), v)


def axis_misalignment_degrees(state: WorldState, obj: SceneObject) -> float:
    """Signed roll offset between the wrist and an object's principal axis.

    Measured about the aim direction, folded into (-90, 90] because a grasp
    axis has no preferred sign; rolling the wrist by the returned value
    aligns it.  An axis parallel to the aim ray has no roll preference.
    """
    d = wrist_aim_direction(state)
    a = obj.principal_axis
    a_perp = vec_sub(a, vec_scale(d, vec_dot(a, d)))
    if vec_norm(a_perp) < 1e-9:
        return 0.0
    angle = signed_angle_about(wrist_up_vector(state), a_perp, d)
    while angle > 90.0:
        angle -= 180.0
    while angle <= -90.0:
        angle += 180.0
    return angle


def _clamp_to_sector(x: float, y: float, arena: ArenaConfig) -> tuple[float, float]:
    r = math.hypot(x, y)
    if r < 1e-9:
        return (x, y)
    phi = math.atan2(y, x) / DEG
    half = arena.span / 2.0
    clamped_phi = clamp(phi, -half, half)
    clamped_r = min(r, arena.radius)
    if clamped_phi == phi and clamped_r == r:
        return (x, y)
    return (
        clamped_r * math.cos(clamped_phi * DEG),
        clamped_r * math.sin(clamped_phi * DEG),
    )


def step_avatar(state: WorldState, inp: ControlInput, dt: float | None = None) -> None:
    """Advance the world one tick under the given actuation.

    Velocities are clamped to arena limits, the avatar is kept inside the
    fan sector, and it stops at the table standoff distance instead of
    walking through the furniture.  Wrist deltas apply directly; the jitter
    state updates only when a nonzero sigma is supplied, so noise-free runs
    draw nothing from the generator.
    """
    arena = state.arena
    if dt is None:
        dt = arena.tick
    av = state.avatar
    w = state.wrist

    v = clamp(inp.forward, -arena.v_max, arena.v_max)
    omega = clamp(inp.turn, -arena.omega_max, arena.omega_max)

    av.heading = normalize_degrees(av.heading + omega * dt)
    nx = av.x + v * dt * math.cos(av.heading * DEG)
    ny = av.y + v * dt * math.sin(av.heading * DEG)
    nx, ny = _clamp_to_sector(nx, ny, arena)

    table = state.find("table")
    if table is not None:
        tdx = nx - table.position[0]
        tdy = ny - table.position[1]
        d = math.hypot(tdx, tdy)
        if d < arena.table_stop_distance:
            if d < 1e-9:
                nx, ny = av.x, av.y
            else:
                scale = arena.table_stop_distance / d
                nx = table.position[0] + tdx * scale
                ny = table.position[1] + tdy * scale
    av.x, av.y = nx, ny

    w.aim_azimuth = normalize_degrees(w.aim_azimuth + inp.aim_azimuth_delta)
    w.aim_elevation = clamp(w.aim_elevation + inp.aim_elevation_delta, -90.0, 90.0)
    w.rotation = normalize_degrees(w.rotation + inp.rotation_delta)
    w.offset = (
        clamp(w.offset[0] + inp.reach_delta, arena.reach_min, arena.reach_max),
        w.offset[1],
        w.offset[2],
    )

    if inp.tremor_sigma > 0.0:
        w.tremor_azimuth = TREMOR_DECAY * w.tremor_azimuth + state.rng.gauss(0.0, inp.tremor_sigma)
        w.tremor_elevation = TREMOR_DECAY * w.tremor_elevation + state.rng.gauss(0.0, inp.tremor_sigma)
    elif w.tremor_azimuth != 0.0 or w.tremor_elevation != 0.0:
        w.tremor_azimuth *= TREMOR_DECAY
        w.tremor_elevation *= TREMOR_DECAY

    state.tick_index += 1
