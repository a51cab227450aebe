import math

import numpy as np
import pytest

from linkrover.model import (
    DimensionError,
    ManifoldAnchor,
    PlacementError,
    RobotSpec,
    actuated_sets,
    endpoint_pose,
    forward_kinematics,
    jacobian,
    link_orientations,
    manifold_contains,
    manipulability,
    validate_joints,
)
from conftest import fk_chain_oracle


def test_spec_invariants_enforced():
    with pytest.raises(ValueError):
        RobotSpec(n_links=1, link_length=0.1)
    with pytest.raises(ValueError):
        RobotSpec(n_links=3, link_length=-1.0)
    with pytest.raises(ValueError):
        RobotSpec(n_links=3, link_length=0.1, thickness=0.0)
    with pytest.raises(ValueError):
        RobotSpec(n_links=3, link_length=0.1, joint_limit=4.0)
    with pytest.raises(ValueError):
        RobotSpec(n_links=3, link_length=0.1, n_actuators=4)


def test_spec_json_round_trip(arm3):
    text = arm3.to_json()
    again = RobotSpec.from_json(text)
    assert again == arm3
    assert '"n_links": 3' in text
    assert '"link_length_m": 0.1' in text


def test_link_orientations_prefix_sums():
    assert np.allclose(link_orientations([0.0, 0.0, 0.0]), [0, 0, 0])
    np.testing.assert_allclose(
        link_orientations([math.pi / 2, -math.pi / 2, 0.0]), [math.pi / 2, 0.0, 0.0]
    )
    np.testing.assert_allclose(
        link_orientations([math.pi / 4, math.pi / 4]), [math.pi / 4, math.pi / 2]
    )


def test_forward_kinematics_hand_cases():
    spec = RobotSpec(n_links=3, link_length=1.0)
    np.testing.assert_allclose(
        forward_kinematics(spec, [0, 0, 0]), [(1, 0), (2, 0), (3, 0)], atol=1e-15
    )
    np.testing.assert_allclose(
        forward_kinematics(spec, [math.pi / 2, -math.pi / 2, 0]),
        [(0, 1), (1, 1), (2, 1)],
        atol=1e-15,
    )


def test_forward_kinematics_ten_link_total_length():
    spec = RobotSpec(n_links=10, link_length=0.05)
    pts = forward_kinematics(spec, np.zeros(10))
    np.testing.assert_allclose(pts[-1], (0.5, 0.0), atol=1e-15)


def test_forward_kinematics_matches_chain_oracle(snake10, rng):
    for _ in range(200):
        theta = rng.uniform(-math.pi, math.pi, 10)
        got = forward_kinematics(snake10, theta)
        want = fk_chain_oracle(snake10, theta)
        assert np.max(np.abs(got - want)) <= 1e-12


def test_forward_kinematics_dimension_error(arm3):
    with pytest.raises(DimensionError):
        forward_kinematics(arm3, [0.0, 0.0])


def test_rigidity_links_have_length_l(snake10, rng):
    for _ in range(50):
        theta = rng.uniform(-math.pi, math.pi, 10)
        pts = np.vstack([[0, 0], forward_kinematics(snake10, theta)])
        gaps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        assert np.max(np.abs(gaps - snake10.link_length)) <= 1e-12


def test_reach_bounded_by_total_length(snake10, rng):
    for _ in range(50):
        theta = rng.uniform(-math.pi, math.pi, 10)
        x, y, _ = endpoint_pose(snake10, theta)
        assert math.hypot(x, y) <= 10 * snake10.link_length + 1e-12
    # equality only when every joint past the first is straight
    x, y, _ = endpoint_pose(snake10, [0.3] + [0.0] * 9)
    assert math.hypot(x, y) == pytest.approx(0.5, abs=1e-15)


def test_endpoint_pose_cases():
    spec = RobotSpec(n_links=3, link_length=1.0)
    assert endpoint_pose(spec, [0, 0, 0]) == pytest.approx((3, 0, 0))
    assert endpoint_pose(spec, [math.pi / 2, -math.pi / 2, 0]) == pytest.approx((2, 1, 0))
    spec1 = RobotSpec(n_links=2, link_length=1.0)
    x, y, heading = endpoint_pose(spec1, [math.pi / 2, 0.0])
    assert (x, y, heading) == pytest.approx((0, 2, math.pi / 2))


def test_endpoint_heading_matches_last_orientation(arm3, rng):
    for _ in range(20):
        theta = rng.uniform(-2, 2, 3)
        _, _, heading = endpoint_pose(arm3, theta)
        assert heading == link_orientations(theta)[-1]


def test_actuated_sets_cases():
    ja, ju = actuated_sets([2], 3)
    assert ja == {2} and ju == {1, 3}
    ja, ju = actuated_sets([1, 3], 3)
    assert ja == {1, 3} and ju == {2}
    ja, ju = actuated_sets([1, 2, 3, 4], 4)
    assert ja == {1, 2, 3, 4} and ju == frozenset()
    with pytest.raises(PlacementError):
        actuated_sets([0], 3)
    with pytest.raises(PlacementError):
        actuated_sets([2, 2], 3)


def test_manifold_membership():
    anchor = ManifoldAnchor(base_point=np.array([0.1, 0.0, -0.2]), active=[2])
    # zero displacement
    assert manifold_contains([0.1, 0.0, -0.2], anchor)
    assert manifold_contains([0.1, 0.5, -0.2], anchor)
    # unactuated joint moved
    assert not manifold_contains([0.2, 0.0, -0.2], anchor)


def test_manifold_two_actuator_construction():
    base = np.array([0.0, 0.4, 0.0])
    anchor = ManifoldAnchor(base_point=base, active=[1, 3])
    theta = base + 0.3 * np.eye(3)[0] - 0.2 * np.eye(3)[2]
    assert manifold_contains(theta, anchor)
    assert not manifold_contains(base + [0.3, 0.05, -0.2], anchor)
    # displacement outside the allowed range
    assert not manifold_contains(base + [2 * math.pi + 0.1, 0.0, 0.0], anchor)


def test_manifold_invariant_under_actuator_order():
    base = np.zeros(4)
    a1 = ManifoldAnchor(base_point=base, active=[3, 1])
    a2 = ManifoldAnchor(base_point=base, active=[1, 3])
    theta = np.array([0.5, 0.0, -0.7, 0.0])
    assert manifold_contains(theta, a1) == manifold_contains(theta, a2) is True


def test_anchor_from_configuration_zeroes_active():
    anchor = ManifoldAnchor.from_configuration([0.1, 0.2, 0.3], [2])
    np.testing.assert_allclose(anchor.base_point, [0.1, 0.0, 0.3])
    with pytest.raises(ValueError):
        ManifoldAnchor(base_point=np.array([0.1, 0.2, 0.3]), active=[2])


def test_jacobian_hand_cases():
    spec = RobotSpec(n_links=3, link_length=1.0)
    J = jacobian(spec, [0, 0, 0])
    np.testing.assert_allclose(J[:, 2], (0, 1), atol=1e-15)
    # straight chain: column i = (0, (N - i + 1) L), manipulability zero
    np.testing.assert_allclose(J, [[0, 0, 0], [3, 2, 1]], atol=1e-15)
    assert manipulability(spec, [0, 0, 0]) == pytest.approx(0.0, abs=1e-18)


def _jacobian_fd(spec, theta, h=1e-6):
    from linkrover.model import endpoint_pose

    cols = []
    for i in range(spec.n_links):
        up = np.array(theta, dtype=float)
        dn = up.copy()
        up[i] += h
        dn[i] -= h
        xu, yu, _ = endpoint_pose(spec, up)
        xd, yd, _ = endpoint_pose(spec, dn)
        cols.append(((xu - xd) / (2 * h), (yu - yd) / (2 * h)))
    return np.array(cols).T


def test_jacobian_matches_central_differences(snake10, rng):
    for _ in range(100):
        theta = rng.uniform(-math.pi, math.pi, 10)
        J = jacobian(snake10, theta)
        Jfd = _jacobian_fd(snake10, theta)
        assert np.max(np.abs(J - Jfd)) <= 1e-5 * snake10.link_length


def test_validate_joints_limit_check(arm3):
    validate_joints(arm3, [0.7, -0.7, 0.0], check_limit=True)
    with pytest.raises(ValueError):
        validate_joints(arm3, [0.8, 0.0, 0.0], check_limit=True)
    # limit check is opt-in
    validate_joints(arm3, [3.0, 0.0, 0.0])
