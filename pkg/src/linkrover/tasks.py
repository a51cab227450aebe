"""Benchmark tasks and the fully-actuated reference trajectories behind them.

Four task families: a joint-space point-to-point move, carrying an upright
object along a workspace line (position + orientation IK), and tracing a Z or
a circle with the spare degree of freedom resolved toward maximum
manipulability.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .curves import CSpaceCurve
from .model import RobotSpec, jacobian

ELBOW_UP = -1.0
ELBOW_DOWN = 1.0


def _wrap_pi(x: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    return float(np.remainder(x + math.pi, 2 * math.pi) - math.pi)


def mirror_solution(theta, target) -> np.ndarray:
    """Reflect a 3-link solution across the base-to-target line.

    The reflection preserves the endpoint and the manipulability measure, so
    redundancy optima come in mirror pairs; this constructs the twin.
    """
    phi = math.atan2(target[1], target[0])
    return np.array([_wrap_pi(2 * phi - theta[0]), -theta[1], -theta[2]])


def canonical_redundancy_solution(theta, target) -> np.ndarray:
    """Deterministic pick between a solution and its mirror twin.

    Keeps the variant whose base angle sits on or above the target direction;
    for targets on the base axis this is the one with a non-negative base
    angle.
    """
    theta = np.asarray(theta, dtype=float)
    phi = math.atan2(target[1], target[0])
    out = theta if _wrap_pi(theta[0] - phi) >= 0 else mirror_solution(theta, target)
    return np.array([_wrap_pi(v) for v in out])


class ReachabilityError(ValueError):
    """Target outside the arm's workspace."""


class TaskError(ValueError):
    """A task sample cannot be realized."""


def ik_3link(spec: RobotSpec, pose, elbow: float = ELBOW_UP) -> np.ndarray:
    """Closed-form joint angles for a planar (x, y, heading) target.

    The wrist point is solved by the two-link law of cosines; the last joint
    absorbs the heading. `elbow` picks the branch (ELBOW_UP keeps the middle
    joint angle non-positive).
    """
    if spec.n_links != 3:
        raise ValueError("closed-form pose IK needs exactly 3 links")
    x, y, heading = pose
    L = spec.link_length
    wx = x - L * math.cos(heading)
    wy = y - L * math.sin(heading)
    r2 = wx * wx + wy * wy
    c2 = (r2 - 2 * L * L) / (2 * L * L)
    if abs(c2) > 1 + 1e-9:
        raise ReachabilityError(
            f"wrist point ({wx:.4f}, {wy:.4f}) outside the reachable annulus"
        )
    c2 = min(1.0, max(-1.0, c2))
    th2 = elbow * math.acos(c2)
    th1 = math.atan2(wy, wx) - math.atan2(L * math.sin(th2), L * (1 + math.cos(th2)))
    th3 = heading - th1 - th2
    return np.array([th1, th2, th3])


def _batch_manipulability(spec: RobotSpec, thetas: np.ndarray) -> np.ndarray:
    """det(J J^T) for an (S, 3) batch of joint vectors."""
    L = spec.link_length
    alpha = np.cumsum(thetas, axis=1)
    sx = -L * np.sin(alpha)
    cy = L * np.cos(alpha)
    jx = np.cumsum(sx[:, ::-1], axis=1)[:, ::-1]
    jy = np.cumsum(cy[:, ::-1], axis=1)[:, ::-1]
    a = np.sum(jx * jx, axis=1)
    b = np.sum(jy * jy, axis=1)
    c = np.sum(jx * jy, axis=1)
    return a * b - c * c


def _position_ik(spec: RobotSpec, theta1, target, elbow) -> np.ndarray:
    """Per-row solutions with joint 1 fixed; rows out of reach come back NaN."""
    L = spec.link_length
    t1 = np.atleast_1d(np.asarray(theta1, dtype=float))
    px = L * np.cos(t1)
    py = L * np.sin(t1)
    tx = target[0] - px
    ty = target[1] - py
    d2 = tx * tx + ty * ty
    c3 = (d2 - 2 * L * L) / (2 * L * L)
    feasible = np.abs(c3) <= 1 + 1e-12
    c3 = np.clip(c3, -1.0, 1.0)
    th3 = elbow * np.arccos(c3)
    psi = np.arctan2(ty, tx)
    alpha2 = psi - np.arctan2(L * np.sin(th3), L * (1 + np.cos(th3)))
    th2 = alpha2 - t1
    out = np.column_stack([t1, th2, th3])
    out[~feasible] = np.nan
    return out


@dataclass(frozen=True)
class RedundancyResult:
    theta: np.ndarray
    manipulability: float
    singular: bool


def _feasible_theta1_window(spec: RobotSpec, target) -> tuple[float, float]:
    """Interval of joint-1 angles keeping the wrist of the 2R tail in reach."""
    L = spec.link_length
    R = math.hypot(target[0], target[1])
    phi = math.atan2(target[1], target[0]) if R > 0 else 0.0
    c_min = (R * R - 3 * L * L) / (2 * R * L) if R > 0 else -1.0
    if c_min <= -1.0:
        return phi - math.pi, phi + math.pi
    half = math.acos(min(1.0, c_min))
    return phi - half, phi + half


def resolve_redundancy(
    spec: RobotSpec,
    target,
    seed=None,
    grid: int = 1024,
) -> RedundancyResult:
    """Position-only IK for the 3-link arm, spare freedom spent on manipulability.

    Joint 1 parametrizes the self-motion family. Without a seed the whole
    feasible interval is scanned on a grid (both elbow branches) and the best
    cell is polished; with a seed, hill climbing stays on the seed's branch so
    consecutive calls track one solution family continuously. Full-extension
    targets return the unique straight solution flagged as singular.
    """
    if spec.n_links != 3:
        raise ValueError("redundancy resolution implemented for 3 links")
    L = spec.link_length
    R = math.hypot(target[0], target[1])
    reach = 3 * L
    if R > reach + 1e-9:
        raise ReachabilityError(f"target radius {R:.4f} exceeds reach {reach:.4f}")
    if R >= reach - 1e-9:
        heading = math.atan2(target[1], target[0])
        theta = np.array([heading, 0.0, 0.0])
        return RedundancyResult(theta=theta, manipulability=0.0, singular=True)

    lo, hi = _feasible_theta1_window(spec, target)

    def polish(th1_0, elbow, span):
        a = max(lo, th1_0 - span)
        b = min(hi, th1_0 + span)

        def neg(t1):
            row = _position_ik(spec, np.array([t1]), target, elbow)[0]
            if np.any(np.isnan(row)):
                return 1e9
            return -float(_batch_manipulability(spec, row[None, :])[0])

        res = minimize_scalar(neg, bounds=(a, b), method="bounded",
                              options={"xatol": 1e-12})
        return float(res.x), -float(res.fun)

    if seed is not None:
        seed = np.asarray(seed, dtype=float)
        elbow = ELBOW_DOWN if seed[2] >= 0 else ELBOW_UP
        th1 = min(max(float(seed[0]), lo), hi)
        span = 0.1
        for _ in range(8):  # slide the window while the optimum sits on its edge
            best_t1, best_val = polish(th1, elbow, span)
            if abs(best_t1 - th1) < span - 1e-9:
                break
            th1 = best_t1
        theta = _position_ik(spec, np.array([best_t1]), target, elbow)[0]
        # express each joint in the 2pi-representative nearest the seed so a
        # tracked trajectory never jumps across a wrap seam
        theta = seed + np.array([_wrap_pi(d) for d in theta - seed])
        return RedundancyResult(
            theta=theta, manipulability=best_val, singular=False
        )

    t1s = np.linspace(lo, hi, grid)
    candidates = []
    for elbow in (ELBOW_UP, ELBOW_DOWN):
        sols = _position_ik(spec, t1s, target, elbow)
        vals = np.where(
            np.any(np.isnan(sols), axis=1), -np.inf, _batch_manipulability(spec, np.nan_to_num(sols))
        )
        k = int(np.argmax(vals))
        span = (hi - lo) / (grid - 1) * 2
        best_t1, best_val = polish(float(t1s[k]), elbow, span)
        candidates.append((best_val, best_t1, elbow))
    best_val, best_t1, best_elbow = max(candidates, key=lambda c: c[0])
    theta = _position_ik(spec, np.array([best_t1]), target, best_elbow)[0]
    # optima come in mirror pairs across the base-target line; emit the
    # canonical twin so equal-quality solutions resolve deterministically
    theta = canonical_redundancy_solution(theta, target)
    return RedundancyResult(theta=theta, manipulability=best_val, singular=False)


@dataclass(frozen=True)
class PointToPointTask:
    theta_a: tuple
    theta_b: tuple
    samples: int = 512


@dataclass(frozen=True)
class LineTransportTask:
    start: tuple
    end: tuple
    heading: float
    samples: int = 1024


@dataclass(frozen=True)
class TraceZTask:
    corners: tuple  # four workspace points, three strokes
    samples: int = 1024


@dataclass(frozen=True)
class TraceCircleTask:
    center: tuple
    radius: float
    samples: int = 1024


TaskSpec = PointToPointTask | LineTransportTask | TraceZTask | TraceCircleTask


def parse_task(d: dict) -> TaskSpec:
    kind = d.get("task")
    samples = int(d.get("samples", 1024))
    if samples < 2:
        raise TaskError("sample count must be at least 2")
    if kind == "point_to_point":
        return PointToPointTask(
            theta_a=tuple(d["theta_a"]), theta_b=tuple(d["theta_b"]), samples=samples
        )
    if kind == "line_transport":
        return LineTransportTask(
            start=tuple(d["start"]),
            end=tuple(d["end"]),
            heading=float(d["heading_rad"]),
            samples=samples,
        )
    if kind == "trace_z":
        corners = tuple(tuple(p) for p in d["corners"])
        if len(corners) != 4:
            raise TaskError("a Z needs exactly four corner points")
        return TraceZTask(corners=corners, samples=samples)
    if kind == "trace_circle":
        return TraceCircleTask(
            center=tuple(d["center"]), radius=float(d["radius_m"]), samples=samples
        )
    raise TaskError(f"unknown task kind {kind!r}")


def load_task(path) -> TaskSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_task(json.load(fh))


def _polyline_points(corners, us):
    """Constant-speed parametrization of a workspace polyline."""
    corners = np.asarray(corners, dtype=float)
    seg = np.diff(corners, axis=0)
    lengths = np.linalg.norm(seg, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    total = cum[-1]
    s = us * total
    hi = np.clip(np.searchsorted(cum, s, side="right"), 1, corners.shape[0] - 1)
    lo = hi - 1
    w = (s - cum[lo]) / np.where(lengths[lo] > 0, lengths[lo], 1.0)
    return corners[lo] + w[:, None] * seg[lo]


def reference_trajectory(task: TaskSpec, spec: RobotSpec) -> CSpaceCurve:
    """Joint-space curve a fully actuated arm would follow for the task.

    Point-to-point interpolates directly in joint space. The transport task
    runs pose IK with a sticky elbow branch. Tracing tasks run position IK
    warm-started sample to sample so the redundancy resolution stays on one
    continuous branch; a closed trace is snapped exactly shut at the seam.
    """
    if isinstance(task, PointToPointTask):
        a = np.asarray(task.theta_a, dtype=float)
        b = np.asarray(task.theta_b, dtype=float)
        if a.shape != (spec.n_links,) or b.shape != (spec.n_links,):
            raise TaskError("endpoint joint vectors must match the robot")
        return CSpaceCurve.line(a, b)

    us = np.linspace(0.0, 1.0, task.samples)
    if isinstance(task, TraceZTask):
        # stroke corners become interpolation nodes so the trace hits them exactly
        c = np.asarray(task.corners, dtype=float)
        seg = np.linalg.norm(np.diff(c, axis=0), axis=1)
        cuts = np.concatenate([[0.0], np.cumsum(seg)]) / np.sum(seg)
        us = np.unique(np.concatenate([us, cuts]))
    if isinstance(task, LineTransportTask):
        pts = _polyline_points([task.start, task.end], us)
        rows = []
        for u, p in zip(us, pts):
            try:
                rows.append(ik_3link(spec, (p[0], p[1], task.heading)))
            except ReachabilityError as exc:
                raise TaskError(f"transport sample u={u:.4f} at {tuple(p)}: {exc}") from exc
        return CSpaceCurve.from_samples(us, np.array(rows))

    if isinstance(task, TraceZTask):
        pts = _polyline_points(task.corners, us)
        return _traced_curve(spec, us, pts, closed=False)

    if isinstance(task, TraceCircleTask):
        ang = 2 * math.pi * us
        pts = np.column_stack(
            [
                task.center[0] + task.radius * np.cos(ang),
                task.center[1] + task.radius * np.sin(ang),
            ]
        )
        return _traced_curve(spec, us, pts, closed=True)

    raise TaskError(f"unsupported task {task!r}")


def _traced_curve(spec, us, pts, closed):
    rows = []
    seed = None
    for u, p in zip(us, pts):
        try:
            res = resolve_redundancy(spec, p, seed=seed)
        except ReachabilityError as exc:
            raise TaskError(f"trace sample u={u:.4f} at {tuple(p)}: {exc}") from exc
        rows.append(res.theta)
        seed = res.theta
    rows = np.array(rows)
    if closed:
        gap = np.max(np.abs(rows[-1] - rows[0]))
        if gap > 1e-6:
            raise TaskError(f"closed trace failed to return to its seam (gap {gap:.2e})")
        rows[-1] = rows[0]
    return CSpaceCurve.from_samples(us, rows)
