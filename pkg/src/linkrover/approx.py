"""Duplicating a fully-actuated joint-space trajectory with M roving actuators.

The duplication procedure walks the reference curve in half-tolerance hops:
each hop spans an axis-aligned box between consecutive anchor points, and the
carriage path crosses that box along its M-dimensional surface. Every point of
the result stays within delta/2 of an anchor that lies on the reference curve,
which makes the whole path a two-sided delta approximation in the max norm.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .curves import CSpaceCurve, Hypercuboid, PiecewiseLinearPath, spanning_hypercuboid


class ParameterError(ValueError):
    """A tolerance or actuator-count argument is out of range."""


class InfeasiblePathError(ValueError):
    """A path segment needs more simultaneously moving joints than actuators."""


def find_next_breakpoint(
    g: CSpaceCurve, u0: float, delta: float, grid: int = 2048, tol: float = 1e-10
) -> float:
    """Smallest u > u0 where the curve leaves the delta/2 max-norm ball.

    The distance profile need not be monotone, so a uniform grid locates the
    first sign change and bisection sharpens it. Returns 1.0 when the curve
    never leaves the ball.
    """
    if delta <= 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    if not 0.0 <= u0 < 1.0:
        raise ParameterError(f"u0 must lie in [0, 1), got {u0}")
    g0 = g(u0)
    half = 0.5 * delta

    us = u0 + (np.arange(1, grid + 1) / grid) * (1.0 - u0)
    h = np.max(np.abs(g.sample(us) - g0), axis=1) - half
    crossing = np.nonzero(h >= 0.0)[0]
    if crossing.size == 0:
        return 1.0
    i = int(crossing[0])
    if h[i] == 0.0:
        return float(us[i])
    lo = u0 if i == 0 else float(us[i - 1])
    hi = float(us[i])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if np.max(np.abs(g(mid) - g0)) - half < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_corners(box: Hypercuboid, start, goal):
    start = np.asarray(start, dtype=float)
    goal = np.asarray(goal, dtype=float)
    n = box.lower.shape[0]
    if start.shape != (n,) or goal.shape != (n,):
        raise ParameterError("corner dimensions disagree with the box")
    for i in range(n):
        pair = {start[i], goal[i]}
        if pair != {box.lower[i], box.upper[i]}:
            raise ParameterError("start/goal must be opposite corners of the box")
    return start, goal


def _edge_vertices(start, goal, axes_order):
    """One axis completed per segment, in the given 1-based axis order."""
    verts = []
    sets = []
    cur = start.copy()
    for a in axes_order:
        cur = cur.copy()
        cur[a - 1] = goal[a - 1]
        verts.append(cur)
        sets.append(frozenset([a]))
    return verts, sets


def _grouped_vertices(start, goal, axes, group_size):
    """Consecutive axis groups moved diagonally, each group one segment."""
    n_groups = math.ceil(len(axes) / group_size)
    # spread sizes as evenly as possible
    base = len(axes) // n_groups
    extra = len(axes) % n_groups
    verts = []
    sets = []
    cur = start.copy()
    pos = 0
    for k in range(n_groups):
        size = base + (1 if k < extra else 0)
        group = axes[pos : pos + size]
        pos += size
        cur = cur.copy()
        for a in group:
            cur[a - 1] = goal[a - 1]
        verts.append(cur)
        sets.append(frozenset(group))
    return verts, sets


def _area2(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _veq(a, b):
    return a[0] == b[0] and a[1] == b[1]


def _string_pull(start, end, portals, eps=1e-15):
    """Taut path from start to end through an ordered portal sequence.

    Portals are (right_point, left_point) pairs in travel order; the classic
    funnel walk emits an apex every time one side wraps past the other.
    `_area2(a, b, c) > 0` means c lies left of the ray a->b.
    """
    pts_r = [p[0] for p in portals] + [end]
    pts_l = [p[1] for p in portals] + [end]
    path = [start]
    apex = right = left = start
    apex_i = right_i = left_i = 0
    i = 0
    n = len(pts_r)
    while i < n:
        r, l = pts_r[i], pts_l[i]
        # tighten the right side: the candidate must not swing outward
        if _area2(apex, right, r) >= -eps:
            if _veq(apex, right) or _area2(apex, left, r) < eps:
                right, right_i = r, i
            else:
                # right wrapped over left: the left point becomes a path apex
                path.append(left)
                apex, apex_i = left, left_i
                right, right_i = apex, apex_i
                left, left_i = apex, apex_i
                i = apex_i + 1
                continue
        # tighten the left side, mirrored
        if _area2(apex, left, l) <= eps:
            if _veq(apex, left) or _area2(apex, right, l) > -eps:
                left, left_i = l, i
            else:
                path.append(right)
                apex, apex_i = right, right_i
                right, right_i = apex, apex_i
                left, left_i = apex, apex_i
                i = apex_i + 1
                continue
        i += 1
    path.append(end)
    out = [path[0]]
    for p in path[1:]:
        if not _veq(p, out[-1]):
            out.append(p)
    return out


def _polyline_length(pts):
    return sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(pts, pts[1:]))


class _Strip:
    """Unfolded rectangle strip for one axis ordering of a 2-face crossing.

    Position j of `order` holds an axis; odd positions (1-based) stack along
    u, even positions along v. Face t spans axes (order[t-1], order[t]).
    """

    def __init__(self, dims_by_axis, order):
        self.order = order
        self.dims = [dims_by_axis[a] for a in order]
        self.k = len(order)
        # offsets of completed u/v material before each face (face index 0-based)
        self.face_rects = []
        ou = ov = 0.0
        for t in range(1, self.k):  # faces are 1..k-1 (1-based)
            d_complete = self.dims[t - 1]
            d_continue = self.dims[t]
            if t % 2 == 1:
                rect = (ou, ou + d_complete, ov, ov + d_continue)
                ou += d_complete
            else:
                rect = (ou, ou + d_continue, ov, ov + d_complete)
                ov += d_complete
            self.face_rects.append(rect)
        # last position's axis also completes inside the final face
        if (self.k % 2) == 1:
            ou += self.dims[-1]
        else:
            ov += self.dims[-1]
        self.utot, self.vtot = ou, ov
        # internal portals between consecutive faces, as (right/lower, left/upper)
        self.portals = []
        for t in range(1, self.k - 1):
            u0, u1, v0, v1 = self.face_rects[t - 1]
            if t % 2 == 1:
                self.portals.append(((u1, v0), (u1, v1)))
            else:
                self.portals.append(((u1, v1), (u0, v1)))

    def straight_feasible(self):
        if self.utot == 0.0 or self.vtot == 0.0:
            return False
        for (r, l) in self.portals:
            if r[0] == l[0]:  # vertical portal at u = r[0]
                v = self.vtot * r[0] / self.utot
                if not (min(r[1], l[1]) - 1e-15 <= v <= max(r[1], l[1]) + 1e-15):
                    return False
            else:  # horizontal portal at v = r[1]
                u = self.utot * r[1] / self.vtot
                if not (min(r[0], l[0]) - 1e-15 <= u <= max(r[0], l[0]) + 1e-15):
                    return False
        return True

    def straight_length(self):
        return math.hypot(self.utot, self.vtot)

    def shortest(self):
        """(length, 2-D polyline) of the taut path through the strip."""
        if self.straight_feasible():
            pts = [(0.0, 0.0), (self.utot, self.vtot)]
            return self.straight_length(), pts
        pts = _string_pull((0.0, 0.0), (self.utot, self.vtot), self.portals)
        return _polyline_length(pts), pts

    def portal_crossings(self, polyline):
        """Where the (u,v) path crosses each internal portal, in face order."""
        crossings = []
        seg = 0
        for (r, l) in self.portals:
            vertical = r[0] == l[0]
            target = r[0] if vertical else r[1]
            coord = 0 if vertical else 1
            other = 1 - coord
            while seg < len(polyline) - 1:
                p, q = polyline[seg], polyline[seg + 1]
                if q[coord] >= target - 1e-15:
                    if q[coord] == p[coord]:
                        val = p[other]
                    else:
                        w = (target - p[coord]) / (q[coord] - p[coord])
                        val = p[other] + w * (q[other] - p[other])
                    crossings.append((target, val) if vertical else (val, target))
                    break
                seg += 1
            else:
                crossings.append(polyline[-1])
        return crossings

    def lift(self, crossings, start, goal, signs):
        """Map portal crossings back to joint-space breakpoints.

        Completed axes copy the goal value, untouched axes copy the start
        value, and only the in-progress axis is computed, so coordinates that
        are not moving stay bit-identical.
        """
        verts = []
        for t in range(1, self.k - 1):  # internal portal after face t
            u0, _, v0, _ = self.face_rects[t - 1]
            u_c, v_c = crossings[t - 1]
            point = start.copy()
            for j in range(t):
                a = self.order[j]
                point[a - 1] = goal[a - 1]
            cont_axis = self.order[t]
            local = (v_c - v0) if t % 2 == 1 else (u_c - u0)
            local = min(max(local, 0.0), self.dims[t])
            point[cont_axis - 1] = start[cont_axis - 1] + signs[cont_axis] * local
            verts.append(point)
        verts.append(goal.copy())
        sets = [
            frozenset([self.order[t - 1], self.order[t]]) for t in range(1, self.k)
        ]
        return verts, sets


def _order_bound(dims_by_axis, order):
    u = sum(dims_by_axis[a] for a in order[0::2])
    v = sum(dims_by_axis[a] for a in order[1::2])
    return math.hypot(u, v)


def _two_face_vertices(start, goal, axes, dims_by_axis, signs):
    """Shortest crossing over 2-D faces, minimized over axis orderings.

    Orderings are visited by increasing unfolded straight-line length, which
    is a lower bound on the taut-path length, so the scan stops as soon as no
    remaining ordering can beat the best path found.
    """
    orders = sorted(
        itertools.permutations(axes), key=lambda o: _order_bound(dims_by_axis, o)
    )
    best = None
    for order in orders:
        bound = _order_bound(dims_by_axis, order)
        if best is not None and bound >= best[0] - 1e-15:
            break
        strip = _Strip(dims_by_axis, order)
        length, polyline = strip.shortest()
        if best is None or length < best[0] - 1e-15:
            best = (length, strip, polyline)
    length, strip, polyline = best
    crossings = strip.portal_crossings(polyline)
    return strip.lift(crossings, start, goal, signs)


def surface_shortest_path(
    box: Hypercuboid,
    start,
    goal,
    m: int,
    axis_order: Sequence[int] | None = None,
) -> tuple[list[np.ndarray], list[frozenset]]:
    """Corner-to-corner route over the box's m-dimensional surface.

    Returns the breakpoints after `start` (ending exactly at `goal`) and the
    1-based moving-joint set of each segment. Axes with zero extent never
    appear in a moving set. With m covering every moving axis the route is the
    straight diagonal; with m == 1 it follows edges (axis_order overrides the
    default ascending completion order); with m == 2 it is the geodesic found
    by unfolding face sequences; larger m uses grouped diagonal hops, which
    stay on the surface but are not guaranteed shortest.
    """
    start, goal = _check_corners(box, start, goal)
    n = start.shape[0]
    if not 1 <= m <= n:
        raise ParameterError(f"actuator count {m} outside 1..{n}")
    moving = [i + 1 for i in range(n) if goal[i] != start[i]]
    if not moving:
        return [goal.copy()], []
    if len(moving) <= m:
        return [goal.copy()], [frozenset(moving)]
    if m == 1:
        order = list(axis_order) if axis_order is not None else sorted(moving)
        if sorted(order) != sorted(moving):
            raise ParameterError("axis_order must be a permutation of the moving axes")
        return _edge_vertices(start, goal, order)
    if m == 2:
        dims = {a: abs(goal[a - 1] - start[a - 1]) for a in moving}
        signs = {a: (1.0 if goal[a - 1] >= start[a - 1] else -1.0) for a in moving}
        return _two_face_vertices(start, goal, moving, dims, signs)
    return _grouped_vertices(start, goal, sorted(moving), m)


def _sweep_order(moving, carriage):
    """Joint completion order minimizing single-carriage travel.

    On a line the optimal visit order is a sweep to one extreme and then
    across to the other; ties prefer starting at the lower joint index.
    """
    axes = sorted(moving)
    if carriage is None:
        return axes
    down = sorted([a for a in axes if a <= carriage], reverse=True) + [
        a for a in axes if a > carriage
    ]
    up = [a for a in axes if a >= carriage] + sorted(
        [a for a in axes if a < carriage], reverse=True
    )

    def travel(order):
        t = abs(carriage - order[0])
        for a, b in zip(order, order[1:]):
            t += abs(b - a)
        return t

    td, tu = travel(down), travel(up)
    if td < tu:
        return down
    if tu < td:
        return up
    return down if down[0] <= up[0] else up


def approximation_curve(
    g: CSpaceCurve,
    m: int,
    delta: float,
    grid: int = 2048,
    initial_joint: int | None = None,
    max_anchors: int = 200_000,
) -> PiecewiseLinearPath:
    """Piecewise-linear duplication of g feasible for m roving actuators.

    Anchors are placed where the curve has drifted delta/2 from the previous
    anchor; each anchor pair is bridged across its spanning box surface. The
    result starts at g(0), ends at g(1), moves at most m joints per segment,
    and two-sided max-norm distance to g never exceeds delta.
    """
    if delta <= 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    n = g.dim
    if not 1 <= m <= n:
        raise ParameterError(f"actuator count {m} outside 1..{n}")
    start = g(0.0)
    breakpoints = [start]
    active: list[frozenset] = []
    carriage = initial_joint
    u0 = 0.0
    for _ in range(max_anchors):
        ue = find_next_breakpoint(g, u0, delta, grid=grid)
        a = breakpoints[-1]
        b = g(ue)
        box = spanning_hypercuboid(a, b)
        order = None
        if m == 1:
            moving = [i + 1 for i in range(n) if b[i] != a[i]]
            if len(moving) > 1:
                order = _sweep_order(moving, carriage)
        verts, sets = surface_shortest_path(box, a, b, m, axis_order=order)
        for v, s in zip(verts, sets):
            if np.array_equal(v, breakpoints[-1]):
                continue
            breakpoints.append(v)
            active.append(s)
        if sets:
            last = sorted(sets[-1])
            carriage = last[0] if len(last) == 1 else carriage
        if ue >= 1.0:
            break
        u0 = ue
    else:
        raise ParameterError("anchor limit exceeded; delta too small for this curve")
    return PiecewiseLinearPath(np.array(breakpoints), active)


def verify_delta_approx(
    f: PiecewiseLinearPath,
    g: CSpaceCurve,
    delta: float,
    sample_density: int = 2000,
) -> tuple[bool, float]:
    """Two-sided max-norm proximity check on dense samples.

    Every path sample must be within delta of some curve sample and vice
    versa; returns the worst distance found in either direction.
    """
    if delta <= 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    if sample_density < 1000:
        raise ParameterError("sample_density must be at least 1000")
    if f.dim != g.dim:
        raise ParameterError("path and curve dimensions disagree")
    ts = np.linspace(0.0, 1.0, sample_density)
    fs = np.vstack([f.sample(ts), f.breakpoints])
    gs = g.sample(np.linspace(0.0, 1.0, sample_density))
    d_fg = cKDTree(gs).query(fs, p=np.inf)[0].max()
    d_gf = cKDTree(fs).query(gs, p=np.inf)[0].max()
    worst = float(max(d_fg, d_gf))
    return worst <= delta + 1e-12, worst


def count_traversals(
    path: PiecewiseLinearPath,
    initial: Sequence[int] | None = None,
    m: int | None = None,
) -> tuple[int, list[int], list[np.ndarray]]:
    """Per-step carriage travel and joint rotations for executing a path.

    One step per segment. Carriages already parked at a moving joint stay
    there; each remaining moving joint is served by the nearest free carriage.
    Returns (step count, per-step link travel, per-step joint deltas).
    """
    sizes = [len(s) for s in path.active_sets]
    if m is None:
        m = max(sizes, default=1)
    for k, size in enumerate(sizes):
        if size > m:
            raise InfeasiblePathError(
                f"segment {k} moves {size} joints but only {m} actuators available"
            )
    n = path.dim
    if initial is not None:
        positions = sorted(int(i) for i in initial)
        if len(positions) != m or len(set(positions)) != m:
            raise InfeasiblePathError(f"initial placement must name {m} distinct links")
        for p in positions:
            if not 1 <= p <= n:
                raise InfeasiblePathError(f"initial link {p} outside 1..{n}")
    else:
        first = sorted(path.active_sets[0]) if path.active_sets else []
        positions = list(first[:m])
        spare = [j for j in range(1, n + 1) if j not in positions]
        while len(positions) < m:
            positions.append(spare.pop(0))
        positions.sort()

    deltas = path.segment_deltas()
    travel: list[int] = []
    rotations: list[np.ndarray] = []
    for k, joints in enumerate(path.active_sets):
        need = sorted(joints - set(positions))
        moved = 0
        for j in need:
            free = [i for i, p in enumerate(positions) if p not in joints]
            best = min(free, key=lambda i: (abs(positions[i] - j), positions[i]))
            moved += abs(positions[best] - j)
            positions[best] = j
        travel.append(moved)
        rotations.append(deltas[k].copy())
    return len(path.active_sets), travel, rotations


def traversal_count(path: PiecewiseLinearPath) -> int:
    """Number of carriage placement episodes: one per path segment."""
    return path.n_segments
