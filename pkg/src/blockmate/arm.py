"""Virtual manipulator: waypoint synthesis, timing, execution, metrics.

Kinematics stay at the Cartesian waypoint level. Velocity and acceleration
levels map to 100/75/50% of the arm's configured maxima; the amplitude level
sets the apex height of pick/place arcs; lower straightness inserts lateral
deviation waypoints on the transport leg. Durations follow segment length
divided by the scaled velocity; the acceleration scale shapes the trapezoidal
time profile used when sampling the path for export.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field

from .personality import BehavioralParameters, GradeLevel, SpeedLevel
from .textconf import ParseError, require_args, tokenize

Vec = tuple[float, float, float]

SPEED_SCALE: dict[SpeedLevel, float] = {
    SpeedLevel.SLOW: 0.5,
    SpeedLevel.MIDDLE: 0.75,
    SpeedLevel.HIGH: 1.0,
}

AMPLITUDE_M: dict[GradeLevel, float] = {
    GradeLevel.LOW: 0.05,
    GradeLevel.MID: 0.12,
    GradeLevel.HIGH: 0.20,
}

# (number of deviation waypoints, lateral offset in meters)
DEVIATION: dict[GradeLevel, tuple[int, float]] = {
    GradeLevel.LOW: (2, 0.06),
    GradeLevel.MID: (1, 0.03),
    GradeLevel.HIGH: (0, 0.0),
}

SWEEP_HALFWIDTH_M: dict[GradeLevel, float] = {
    GradeLevel.LOW: 0.10,
    GradeLevel.MID: 0.175,
    GradeLevel.HIGH: 0.25,
}


class OutOfWorkspace(ValueError):
    pass


class UnknownGesture(KeyError):
    pass


@dataclass(frozen=True)
class Geometry:
    """Workspace layout: staging slots, board cells, rest pose, bounds."""

    rest: Vec = (0.20, -0.40, 0.30)
    z_base: float = 0.03
    board_origin: tuple[float, float] = (0.25, -0.15)
    cell_pitch: float = 0.15
    red_slots: tuple[Vec, ...] = tuple((0.10 + 0.08 * i, -0.55, 0.03) for i in range(5))
    blue_slots: tuple[Vec, ...] = tuple((0.10 + 0.08 * i, 0.55, 0.03) for i in range(5))
    bounds: tuple[Vec, Vec] = ((-0.85, -0.85, 0.0), (0.85, 0.85, 1.0))

    def cell_center(self, cell: tuple[int, int]) -> Vec:
        r, c = cell
        x0, y0 = self.board_origin
        return (x0 + self.cell_pitch * r, y0 + self.cell_pitch * c, self.z_base)

    def slot(self, color_red: bool, index: int) -> Vec:
        slots = self.red_slots if color_red else self.blue_slots
        return slots[index % len(slots)]

    def inside(self, p: Vec) -> bool:
        lo, hi = self.bounds
        return all(lo[i] <= p[i] <= hi[i] for i in range(3))


def load_geometry(text: str) -> Geometry:
    """Parse geometry overrides: rest/z_base/board_origin/cell_pitch lines."""
    kwargs: dict = {}
    for d in tokenize(text):
        if d.key == "rest":
            require_args(d, 3)
            kwargs["rest"] = tuple(float(a) for a in d.args[:3])
        elif d.key == "z_base":
            require_args(d, 1)
            kwargs["z_base"] = float(d.args[0])
        elif d.key == "board_origin":
            require_args(d, 2)
            kwargs["board_origin"] = (float(d.args[0]), float(d.args[1]))
        elif d.key == "cell_pitch":
            require_args(d, 1)
            kwargs["cell_pitch"] = float(d.args[0])
        else:
            raise ParseError(d.line, 1, f"unknown geometry directive '{d.key}'")
    return Geometry(**kwargs)


@dataclass(frozen=True)
class ArmLimits:
    v_max: float = 0.5   # m/s
    a_max: float = 1.0   # m/s^2


@dataclass(frozen=True)
class Trajectory:
    waypoints: tuple[Vec, ...]
    speed_scale: float
    accel_scale: float
    action_id: str
    transport_span: tuple[int, int] | None = None  # straightness-relevant leg
    fixed_duration: float | None = None            # zero-motion holds
    limits: ArmLimits = ArmLimits()

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise ValueError("a trajectory needs at least two waypoints")
        if self.speed_scale not in SPEED_SCALE.values():
            raise ValueError(f"speed_scale must be one of {sorted(SPEED_SCALE.values())}")
        if self.accel_scale not in SPEED_SCALE.values():
            raise ValueError(f"accel_scale must be one of {sorted(SPEED_SCALE.values())}")

    @property
    def duration(self) -> float:
        if self.fixed_duration is not None:
            return self.fixed_duration
        v = self.limits.v_max * self.speed_scale
        return sum(_dist(a, b) for a, b in _segments(self.waypoints)) / v


def _dist(a: Vec, b: Vec) -> float:
    return math.sqrt(sum((a[i] - b[i]) ** 2 for i in range(3)))


def _segments(wps: tuple[Vec, ...]):
    return zip(wps[:-1], wps[1:])


def _check_workspace(geom: Geometry, wps: list[Vec]) -> None:
    for p in wps:
        if not geom.inside(p):
            raise OutOfWorkspace(f"waypoint {p} outside workspace bounds")


def synth_pick_place(
    geom: Geometry,
    from_pos: Vec,
    to_pos: Vec,
    params: BehavioralParameters,
    action_id: str = "pick_place",
) -> Trajectory:
    """Rest -> grasp -> transport (with optional deviations) -> release -> rest.

    Apex height is z_base + amplitude; straightness below High bends the
    transport leg sideways.
    """
    amp = AMPLITUDE_M[params.amplitude_level]
    apex = geom.z_base + amp
    fx, fy, _ = from_pos
    tx, ty, _ = to_pos

    pre_grasp = (fx, fy, apex)
    grasp = (fx, fy, geom.z_base)
    post_grasp = (fx, fy, apex)
    pre_release = (tx, ty, apex)
    release = (tx, ty, geom.z_base)
    post_release = (tx, ty, apex)

    n_dev, dev = DEVIATION[params.straightness_level]
    deviations: list[Vec] = []
    dx, dy = tx - fx, ty - fy
    length = math.hypot(dx, dy) or 1.0
    nx, ny = -dy / length, dx / length  # unit normal in the plane
    for i in range(n_dev):
        frac = (i + 1) / (n_dev + 1)
        side = 1.0 if i % 2 == 0 else -1.0
        deviations.append((fx + dx * frac + side * dev * nx, fy + dy * frac + side * dev * ny, apex))

    wps = [geom.rest, pre_grasp, grasp, post_grasp, *deviations, pre_release, release, post_release, geom.rest]
    _check_workspace(geom, wps)
    transport = (3, 3 + n_dev + 1)  # post_grasp .. pre_release
    return Trajectory(
        tuple(wps),
        SPEED_SCALE[params.velocity_level],
        SPEED_SCALE[params.acceleration_level],
        action_id,
        transport_span=transport,
    )


def _sweep(center: Vec, axis: int, halfwidth: float) -> list[Vec]:
    lo = list(center)
    hi = list(center)
    lo[axis] -= halfwidth
    hi[axis] += halfwidth
    return [center, tuple(hi), tuple(lo), tuple(hi), center]


def synth_gesture(geom: Geometry, gesture_id: str, params: BehavioralParameters) -> Trajectory:
    """Canned gesture templates scaled by amplitude and speed levels."""
    half = SWEEP_HALFWIDTH_M[params.amplitude_level]
    amp = AMPLITUDE_M[params.amplitude_level]
    rx, ry, rz = geom.rest
    raised = (rx, ry, rz + 0.15)
    templates: dict[str, list[Vec]] = {
        "make_visible_movement_horizontal": _sweep(raised, axis=1, halfwidth=half),
        "make_visible_movement_vertical": _sweep(raised, axis=2, halfwidth=half),
        "make_threatening_move_horizontal": _sweep((rx + 0.2, ry + 0.2, rz), axis=1, halfwidth=half),
        "make_threatening_move_sagittal": _sweep((rx + 0.2, ry + 0.2, rz), axis=0, halfwidth=half),
        "make_retracting_movement": [geom.rest, (rx - 0.15, ry * 0.5, rz), (0.02, 0.0, rz)],
        "hide_gripper_behind_arm": [geom.rest, (-0.10, -0.10, rz), (-0.15, 0.0, rz + 0.1)],
        "move_closer_to_human": [geom.rest, (rx + 0.15, ry + 0.35, rz), (rx + 0.25, ry + 0.5, rz - 0.05)],
        "open_close_gripper_tease": [geom.rest, (rx, ry, rz + 0.03), (rx, ry, rz - 0.03), (rx, ry, rz + 0.03), geom.rest],
        "gesture_keep_attention_on_task": [
            geom.rest,
            (geom.board_origin[0] + geom.cell_pitch, geom.board_origin[1] + geom.cell_pitch, rz + amp),
            geom.rest,
        ],
        "make_random_movement": [
            geom.rest,
            (rx + 0.1, ry + 0.2, rz + amp),
            (rx - 0.1, ry - 0.1, rz + 0.05),
            (rx + 0.2, ry, rz + amp / 2),
            geom.rest,
        ],
    }
    if gesture_id == "wait_some_seconds":
        return Trajectory(
            (geom.rest, geom.rest),
            SPEED_SCALE[params.velocity_level],
            SPEED_SCALE[params.acceleration_level],
            gesture_id,
            fixed_duration=2.0,
        )
    if gesture_id not in templates:
        raise UnknownGesture(gesture_id)
    wps = templates[gesture_id]
    _check_workspace(geom, wps)
    return Trajectory(
        tuple(wps),
        SPEED_SCALE[params.velocity_level],
        SPEED_SCALE[params.acceleration_level],
        gesture_id,
    )


class Outcome(enum.Enum):
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass(frozen=True)
class ExecutionOutcome:
    outcome: Outcome
    duration: float
    failed_at_waypoint: int | None = None


@dataclass(frozen=True)
class FailureModel:
    probability: float = 0.0
    force_fail_at: int | None = None  # test hook: fail at this waypoint index


def execute(
    t: Trajectory,
    clock: "VirtualClock",
    failure_model: FailureModel,
    rng: random.Random,
) -> ExecutionOutcome:
    """Advance the virtual clock by the trajectory duration, or fail partway."""
    if failure_model.force_fail_at is not None:
        idx = min(failure_model.force_fail_at, len(t.waypoints) - 1)
        clock.advance(t.duration * idx / max(1, len(t.waypoints) - 1))
        return ExecutionOutcome(Outcome.FAILED, clock.now, failed_at_waypoint=idx)
    if failure_model.probability > 0 and rng.random() < failure_model.probability:
        idx = rng.randrange(1, len(t.waypoints))
        clock.advance(t.duration * idx / (len(t.waypoints) - 1))
        return ExecutionOutcome(Outcome.FAILED, clock.now, failed_at_waypoint=idx)
    clock.advance(t.duration)
    return ExecutionOutcome(Outcome.COMPLETED, t.duration)


@dataclass
class VirtualClock:
    now: float = 0.0

    def advance(self, seconds: float) -> float:
        self.now += seconds
        return self.now


@dataclass(frozen=True)
class PathMetrics:
    path_length: float
    apex_z: float
    straightness_ratio: float
    duration: float


def path_metrics(t: Trajectory) -> PathMetrics:
    """Length, apex and straightness.

    When a transport leg is marked (pick/place arcs), both the apex and the
    straightness ratio are measured on it, so the rest pose height does not
    mask the arc and the closed overall path does not degenerate the chord.
    """
    total = sum(_dist(a, b) for a, b in _segments(t.waypoints))
    if t.transport_span is not None:
        lo, hi = t.transport_span
        leg = t.waypoints[lo : hi + 1]
    else:
        leg = t.waypoints
    apex = max(p[2] for p in leg)
    leg_len = sum(_dist(a, b) for a, b in _segments(leg))
    chord = _dist(leg[0], leg[-1])
    ratio = leg_len / chord if chord > 1e-12 else 1.0
    return PathMetrics(total, apex, ratio, t.duration)


def sample_path(t: Trajectory, steps_per_segment: int = 8) -> list[tuple[float, Vec]]:
    """(time, position) samples with trapezoidal easing shaped by accel_scale.

    The easing redistributes time inside each segment without changing the
    total duration, so lower acceleration shows as softer ramps in exports.
    """
    samples: list[tuple[float, Vec]] = []
    v = t.limits.v_max * t.speed_scale
    total_len = sum(_dist(a, b) for a, b in _segments(t.waypoints))
    if total_len <= 1e-12:
        return [(0.0, t.waypoints[0]), (t.duration, t.waypoints[-1])]
    t0 = 0.0
    ramp = min(0.5, 0.5 * t.accel_scale + 0.1)  # fraction of segment spent ramping
    for a, b in _segments(t.waypoints):
        seg_len = _dist(a, b)
        if seg_len <= 1e-12:
            continue
        seg_t = seg_len / v
        for i in range(steps_per_segment):
            u = i / steps_per_segment
            s = _trapezoid_position(u, ramp)
            pos = tuple(a[j] + (b[j] - a[j]) * s for j in range(3))
            samples.append((t0 + u * seg_t, pos))
        t0 += seg_t
    samples.append((t0, t.waypoints[-1]))
    return samples


def _trapezoid_position(u: float, ramp: float) -> float:
    """Normalized position along a segment at normalized time u."""
    r = max(1e-6, min(0.5, ramp))
    peak = 1.0 / (1.0 - r)  # plateau velocity so the area is 1
    if u < r:
        return 0.5 * peak * u * u / r
    if u < 1.0 - r:
        return 0.5 * peak * r + peak * (u - r)
    ur = 1.0 - u
    return 1.0 - 0.5 * peak * ur * ur / r
