import json
import math

import numpy as np
import pytest

from linkrover.bundled import bundled_text
from linkrover.model import endpoint_pose, forward_kinematics
from linkrover.tasks import (
    ELBOW_DOWN,
    ELBOW_UP,
    LineTransportTask,
    PointToPointTask,
    ReachabilityError,
    TaskError,
    TraceCircleTask,
    TraceZTask,
    _batch_manipulability,
    _position_ik,
    ik_3link,
    parse_task,
    reference_trajectory,
    resolve_redundancy,
)


def redundancy_grid_oracle(spec, target, grid=4096):
    """Brute-force scan of the self-motion parameter, both elbow branches.

    The argmax is mapped through the public canonical-twin convention so the
    comparison is well defined despite the mirror symmetry of the optimum.
    """
    from linkrover.tasks import _feasible_theta1_window, canonical_redundancy_solution

    lo, hi = _feasible_theta1_window(spec, target)
    t1s = np.linspace(lo, hi, grid)
    best = None
    for elbow in (ELBOW_UP, ELBOW_DOWN):
        sols = _position_ik(spec, t1s, target, elbow)
        ok = ~np.any(np.isnan(sols), axis=1)
        if not np.any(ok):
            continue
        vals = _batch_manipulability(spec, np.nan_to_num(sols))
        vals[~ok] = -np.inf
        k = int(np.argmax(vals))
        if best is None or vals[k] > best[0]:
            best = (vals[k], sols[k])
    return canonical_redundancy_solution(best[1], target)


class TestIK:
    def test_full_extension(self):
        spec3 = pytest.importorskip("linkrover.model").RobotSpec(n_links=3, link_length=1.0)
        theta = ik_3link(spec3, (3.0, 0.0, 0.0))
        np.testing.assert_allclose(theta, [0, 0, 0], atol=1e-12)

    def test_inverse_of_fk_example(self):
        from linkrover.model import RobotSpec

        spec3 = RobotSpec(n_links=3, link_length=1.0)
        theta = ik_3link(spec3, (2.0, 1.0, 0.0))
        np.testing.assert_allclose(theta, [math.pi / 2, -math.pi / 2, 0.0], atol=1e-12)

    def test_unreachable(self):
        from linkrover.model import RobotSpec

        spec3 = RobotSpec(n_links=3, link_length=1.0)
        with pytest.raises(ReachabilityError):
            ik_3link(spec3, (4.0, 0.0, 0.0))

    def test_round_trip_random_poses(self, arm3, rng):
        for _ in range(1000):
            theta = np.array(
                [
                    rng.uniform(-math.pi, math.pi),
                    rng.uniform(-2.5, 2.5),
                    rng.uniform(-math.pi, math.pi),
                ]
            )
            pose = endpoint_pose(arm3, theta)
            elbow = ELBOW_DOWN if theta[1] >= 0 else ELBOW_UP
            back = ik_3link(arm3, pose, elbow=elbow)
            redone = endpoint_pose(arm3, back)
            assert np.max(np.abs(np.array(redone) - np.array(pose))) <= 1e-9


class TestRedundancy:
    def test_boundary_target_is_singular(self, arm3):
        res = resolve_redundancy(arm3, (0.3, 0.0))
        assert res.singular
        np.testing.assert_allclose(res.theta, [0, 0, 0], atol=1e-12)
        assert res.manipulability == 0.0

    def test_beyond_reach_rejected(self, arm3):
        with pytest.raises(ReachabilityError):
            resolve_redundancy(arm3, (0.31, 0.0))

    def test_matches_grid_oracle(self, arm3, rng):
        for _ in range(25):
            r = rng.uniform(0.05, 0.27)
            ang = rng.uniform(-math.pi, math.pi)
            target = (r * math.cos(ang), r * math.sin(ang))
            res = resolve_redundancy(arm3, target)
            oracle = redundancy_grid_oracle(arm3, target)
            assert np.max(np.abs(res.theta - oracle)) <= 1e-3
            x, y, _ = endpoint_pose(arm3, res.theta)
            assert math.hypot(x - target[0], y - target[1]) <= 1e-8

    def test_local_maximum_against_manifold_neighbors(self, arm3, rng):
        eps = 1e-4
        for _ in range(100):
            r = rng.uniform(0.06, 0.27)
            ang = rng.uniform(-math.pi, math.pi)
            target = np.array([r * math.cos(ang), r * math.sin(ang)])
            res = resolve_redundancy(arm3, target)
            elbow = ELBOW_DOWN if res.theta[2] >= 0 else ELBOW_UP
            here = _batch_manipulability(arm3, res.theta[None, :])[0]
            for sgn in (-1, 1):
                nb = _position_ik(arm3, np.array([res.theta[0] + sgn * eps]), target, elbow)[0]
                if np.any(np.isnan(nb)):
                    continue
                assert _batch_manipulability(arm3, nb[None, :])[0] <= here + 1e-12

    def test_symmetric_target_prefers_positive_base_angle(self, arm3):
        res = resolve_redundancy(arm3, (0.18, 0.0))
        assert res.theta[0] >= 0

    def test_warm_start_tracks_branch(self, arm3):
        cold = resolve_redundancy(arm3, (0.15, 0.10))
        warm = resolve_redundancy(arm3, (0.151, 0.10), seed=cold.theta)
        assert np.max(np.abs(warm.theta - cold.theta)) < 0.05


class TestReferenceTrajectory:
    def test_point_to_point_midpoint(self, arm3):
        task = PointToPointTask(theta_a=(0, 0, 0), theta_b=(0.5, 0.5, 0.5))
        g = reference_trajectory(task, arm3)
        np.testing.assert_allclose(g(0.5), [0.25, 0.25, 0.25], atol=1e-15)

    def test_cup_line_upright_everywhere(self, arm3):
        task = parse_task(json.loads(bundled_text("tasks", "cup_line.json")))
        g = reference_trajectory(task, arm3)
        us = np.linspace(0, 1, 200)
        for theta in g.sample(us):
            assert abs(np.sum(theta) - task.heading) <= 1e-9

    def test_cup_line_tracks_the_line(self, arm3):
        task = parse_task(json.loads(bundled_text("tasks", "cup_line.json")))
        g = reference_trajectory(task, arm3)
        # interpolation nodes are exact; between nodes the drift is tiny
        for u in (0.0, 0.37, 1.0):
            x, y, _ = endpoint_pose(arm3, g(u))
            assert y == pytest.approx(task.start[1], abs=1e-5)
            want_x = task.start[0] + u * (task.end[0] - task.start[0])
            assert x == pytest.approx(want_x, abs=1e-5)
        for u in g._sample_us[:: len(g._sample_us) // 7]:
            x, y, _ = endpoint_pose(arm3, g(float(u)))
            assert y == pytest.approx(task.start[1], abs=1e-9)

    def test_circle_is_closed(self, arm3):
        task = parse_task(json.loads(bundled_text("tasks", "circle.json")))
        g = reference_trajectory(task, arm3)
        np.testing.assert_array_equal(g(0.0), g(1.0))

    def test_circle_endpoint_on_circle(self, arm3):
        task = parse_task(json.loads(bundled_text("tasks", "circle.json")))
        g = reference_trajectory(task, arm3)
        for u in np.linspace(0, 1, 37):
            x, y, _ = endpoint_pose(arm3, g(u))
            r = math.hypot(x - task.center[0], y - task.center[1])
            assert r == pytest.approx(task.radius, abs=1e-6)

    def test_z_visits_corners(self, arm3):
        task = parse_task(json.loads(bundled_text("tasks", "z_letter.json")))
        g = reference_trajectory(task, arm3)
        # corner parameters under constant-speed parametrization
        c = np.asarray(task.corners)
        seg = np.linalg.norm(np.diff(c, axis=0), axis=1)
        cuts = np.concatenate([[0], np.cumsum(seg)]) / np.sum(seg)
        for u, corner in zip(cuts, c):
            x, y, _ = endpoint_pose(arm3, g(u))
            assert math.hypot(x - corner[0], y - corner[1]) <= 1e-6

    def test_continuity_improves_with_sampling(self, arm3):
        base = json.loads(bundled_text("tasks", "circle.json"))
        gaps = []
        for samples in (128, 256):
            task = parse_task({**base, "samples": samples})
            g = reference_trajectory(task, arm3)
            pts = g._sample_points
            gaps.append(np.max(np.abs(np.diff(pts, axis=0))))
        assert gaps[1] < gaps[0]

    def test_unreachable_task_names_the_sample(self, arm3):
        task = LineTransportTask(start=(0.10, 0.18), end=(0.35, 0.18), heading=math.pi / 2)
        with pytest.raises(TaskError, match="u="):
            reference_trajectory(task, arm3)

    def test_parse_rejects_garbage(self):
        with pytest.raises(TaskError):
            parse_task({"task": "spiral"})
        with pytest.raises(TaskError):
            parse_task({"task": "trace_z", "corners": [[0, 0]]})
        with pytest.raises(TaskError):
            parse_task(
                {"task": "point_to_point", "theta_a": [0, 0, 0], "theta_b": [0, 0, 0], "samples": 1}
            )


def test_bundled_tasks_all_feasible(arm3):
    for name in ("point_to_point", "cup_line", "z_letter", "circle"):
        task = parse_task(json.loads(bundled_text("tasks", f"{name}.json")))
        g = reference_trajectory(task, arm3)
        assert g.dim == 3
        pts = g.sample(np.linspace(0, 1, 50))
        assert np.all(np.isfinite(pts))
