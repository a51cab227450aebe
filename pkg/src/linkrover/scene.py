"""Obstacle scenes, link footprints, and collision queries.

Links are oriented rectangles (length x thickness) positioned by the forward
kinematics. Obstacles are simple polygons. Collision runs a separating-axis
test of each link rectangle against each polygon edge plus containment checks,
which stays correct for non-convex obstacles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .model import RobotSpec, chain_points, endpoint_pose


@dataclass(frozen=True)
class Scene:
    """Polygonal obstacles with a grasp target disc. All lengths in meters."""

    obstacles: tuple  # tuple of (V, 2) float arrays, simple polygons
    target_center: tuple
    target_radius: float
    grasp_radius: float
    pass_width: float | None = None
    display_scale: float | None = None
    name: str = ""

    def __post_init__(self):
        polys = tuple(np.asarray(p, dtype=float) for p in self.obstacles)
        for p in polys:
            if p.ndim != 2 or p.shape[0] < 3 or p.shape[1] != 2:
                raise ValueError("each obstacle needs at least three 2-D vertices")
        object.__setattr__(self, "obstacles", polys)
        if self.target_radius <= 0 or self.grasp_radius <= 0:
            raise ValueError("radii must be positive")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "obstacles": [p.tolist() for p in self.obstacles],
            "target": {"center": list(self.target_center), "radius_m": self.target_radius},
            "grasp_radius_m": self.grasp_radius,
            "pass_width_m": self.pass_width,
            "display_scale": self.display_scale,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scene":
        return cls(
            obstacles=tuple(np.asarray(p, dtype=float) for p in d.get("obstacles", [])),
            target_center=tuple(d["target"]["center"]),
            target_radius=float(d["target"]["radius_m"]),
            grasp_radius=float(d["grasp_radius_m"]),
            pass_width=d.get("pass_width_m"),
            display_scale=d.get("display_scale"),
            name=d.get("name", ""),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Scene":
        return cls.from_dict(json.loads(text))

    def translated(self, dx: float, dy: float) -> "Scene":
        shift = np.array([dx, dy])
        return Scene(
            obstacles=tuple(p + shift for p in self.obstacles),
            target_center=(self.target_center[0] + dx, self.target_center[1] + dy),
            target_radius=self.target_radius,
            grasp_radius=self.grasp_radius,
            pass_width=self.pass_width,
            display_scale=self.display_scale,
            name=self.name,
        )


def load_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        return Scene.from_json(fh.read())


@dataclass(frozen=True)
class Footprint:
    """Oriented link rectangles, one (4, 2) corner array per link."""

    rectangles: tuple


def robot_footprint(spec: RobotSpec, theta) -> Footprint:
    """Body rectangles centered on the link segments.

    Corner order per rectangle: start-right, end-right, end-left, start-left
    relative to the link direction (counterclockwise).
    """
    pts = chain_points(spec, theta)
    half = 0.5 * spec.thickness
    rects = []
    for a, b in zip(pts[:-1], pts[1:]):
        d = b - a
        norm = np.linalg.norm(d)
        d = d / norm if norm > 0 else np.array([1.0, 0.0])
        n = np.array([-d[1], d[0]])
        rects.append(np.array([a - half * n, b - half * n, b + half * n, a + half * n]))
    return Footprint(rectangles=tuple(rects))


def _project(points, axis):
    vals = points @ axis
    return vals.min(), vals.max()


def _rect_segment_hit(rect, s0, s1):
    """Separating-axis test between a rectangle and a segment."""
    seg = np.array([s0, s1])
    d = seg[1] - seg[0]
    axes = [rect[1] - rect[0], rect[3] - rect[0]]
    if d @ d > 0:
        axes.append(np.array([-d[1], d[0]]))
    for axis in axes:
        norm = np.linalg.norm(axis)
        if norm == 0:
            continue
        axis = axis / norm
        lo1, hi1 = _project(rect, axis)
        lo2, hi2 = _project(seg, axis)
        if hi1 < lo2 or hi2 < lo1:
            return False
    return True


def point_in_polygon(point, poly) -> bool:
    """Even-odd crossing test; boundary points count as inside."""
    x, y = float(point[0]), float(point[1])
    inside = False
    n = poly.shape[0]
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        # on-edge check
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if abs(cross) < 1e-15:
            if min(x1, x2) - 1e-15 <= x <= max(x1, x2) + 1e-15 and min(
                y1, y2
            ) - 1e-15 <= y <= max(y1, y2) + 1e-15:
                return True
        if (y1 > y) != (y2 > y):
            xin = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xin:
                inside = not inside
    return inside


def _rect_polygon_hit(rect, poly) -> bool:
    n = poly.shape[0]
    for i in range(n):
        if _rect_segment_hit(rect, poly[i], poly[(i + 1) % n]):
            return True
    # no edge touches the rectangle: either disjoint or one contains the other
    center = rect.mean(axis=0)
    if point_in_polygon(center, poly):
        return True
    return point_in_polygon(poly[0], rect)


def collides(scene: Scene, spec: RobotSpec, theta):
    """(hit, contact) for the robot body against the scene obstacles.

    contact is (link_index, obstacle_index), 1-based link, or None. Adjacent
    links overlap at joints by construction; that never counts as a hit.
    """
    fp = robot_footprint(spec, theta)
    for li, rect in enumerate(fp.rectangles, start=1):
        for oi, poly in enumerate(scene.obstacles):
            if _rect_polygon_hit(rect, poly):
                return True, (li, oi)
    return False, None


def self_collision_pairs(spec: RobotSpec, theta) -> list[tuple[int, int]]:
    """Non-adjacent link pairs whose rectangles overlap. Reported separately."""
    fp = robot_footprint(spec, theta)
    rects = fp.rectangles
    hits = []
    for i in range(len(rects)):
        for j in range(i + 2, len(rects)):
            if _rect_rect_hit(rects[i], rects[j]):
                hits.append((i + 1, j + 1))
    return hits


def _rect_rect_hit(r1, r2) -> bool:
    for rect in (r1, r2):
        for axis in (rect[1] - rect[0], rect[3] - rect[0]):
            norm = np.linalg.norm(axis)
            if norm == 0:
                continue
            axis = axis / norm
            lo1, hi1 = _project(r1, axis)
            lo2, hi2 = _project(r2, axis)
            if hi1 < lo2 or hi2 < lo1:
                return False
    return True


def can_grasp(spec: RobotSpec, theta, scene: Scene) -> bool:
    """True when the end effector is within the grasp radius of the target."""
    x, y, _ = endpoint_pose(spec, theta)
    return math.hypot(x - scene.target_center[0], y - scene.target_center[1]) <= scene.grasp_radius


# Calibrated wall geometry for the bundled ten-link maneuver (see
# narrow_pass_scene). Values frozen by scripts/calibrate_scene.py.
_PASS_GAP = 0.015
_PASS_WALL_X = (0.2475, 0.2525)
_PASS_GAP_LO = 0.4775
_PASS_GAP_HI = 0.4925
_PASS_BOTTOM = 0.4450
_PASS_TOP = 0.5400
_PASS_TARGET = (0.3811390037890725, 0.057769725863528715)


def narrow_pass_scene(spec: RobotSpec) -> Scene:
    """The bundled reach-through-a-15 mm-pass scenario for the ten-link robot.

    Two wall slabs on the x = 5L line with a 15 mm opening between them, and
    the target disc placed where the bundled plan's reaching phase ends. The
    wall band was calibrated against the full sweep of the bundled plan and
    then frozen, so replaying that plan is collision-free.
    """
    if spec.n_links != 10 or abs(spec.link_length - 0.05) > 1e-12:
        raise ValueError("the bundled pass scenario expects 10 links of 0.05 m")
    x0, x1 = _PASS_WALL_X
    bottom = [[x0, _PASS_BOTTOM], [x1, _PASS_BOTTOM], [x1, _PASS_GAP_LO], [x0, _PASS_GAP_LO]]
    top = [[x0, _PASS_GAP_HI], [x1, _PASS_GAP_HI], [x1, _PASS_TOP], [x0, _PASS_TOP]]
    return Scene(
        obstacles=(np.array(bottom), np.array(top)),
        target_center=_PASS_TARGET,
        target_radius=0.01,
        grasp_radius=0.015,
        pass_width=_PASS_GAP,
        display_scale=None,
        name="narrow_pass",
    )
