import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from linkrover.approx import surface_shortest_path
from linkrover.curves import spanning_hypercuboid
from linkrover.metrics import endpoint_error_bound, per_link_orientation_deviation
from linkrover.model import (
    ManifoldAnchor,
    RobotSpec,
    endpoint_pose,
    forward_kinematics,
    manifold_contains,
)

angles = st.floats(-math.pi, math.pi, allow_nan=False, allow_infinity=False)


@given(st.lists(angles, min_size=2, max_size=8))
def test_rigidity_and_reach(theta):
    spec = RobotSpec(n_links=len(theta), link_length=0.07)
    pts = np.vstack([[0, 0], forward_kinematics(spec, theta)])
    gaps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    assert np.max(np.abs(gaps - spec.link_length)) <= 1e-12
    x, y, _ = endpoint_pose(spec, theta)
    assert math.hypot(x, y) <= spec.n_links * spec.link_length + 1e-12


@given(
    st.lists(angles, min_size=3, max_size=6),
    st.data(),
)
def test_manifold_membership_ignores_actuator_order(theta, data):
    n = len(theta)
    k = data.draw(st.integers(1, n))
    joints = data.draw(
        st.lists(st.integers(1, n), min_size=k, max_size=k, unique=True)
    )
    base = np.array(theta)
    for j in joints:
        base[j - 1] = 0.0
    a_fwd = ManifoldAnchor(base_point=base, active=joints)
    a_rev = ManifoldAnchor(base_point=base, active=list(reversed(joints)))
    probe = base.copy()
    for j in joints:
        probe[j - 1] = data.draw(st.floats(-6.0, 6.0))
    assert manifold_contains(probe, a_fwd) == manifold_contains(probe, a_rev)


@given(st.data())
def test_bound_positive_and_monotone(data):
    n = data.draw(st.integers(2, 8))
    link = data.draw(st.floats(0.01, 0.5))
    # keep both evaluations inside the bound's validity domain
    delta = data.draw(st.floats(1e-4, math.pi / (2 * 1.5 * n)))
    b1 = endpoint_error_bound(n, link, delta)
    b2 = endpoint_error_bound(n, link, delta * 1.5)
    assert 0 < b1 < b2


@given(st.lists(st.floats(-0.05, 0.05), min_size=1, max_size=8))
def test_per_link_deviation_triangle(diffs):
    n = len(diffs)
    t0 = np.zeros(n)
    t = np.array(diffs)
    dev = per_link_orientation_deviation(t, t0)
    assert np.all(dev <= 0.05 * np.arange(1, n + 1) + 1e-12)


@settings(max_examples=40)
@given(st.data())
def test_surface_path_containment_and_sparsity(data):
    n = data.draw(st.integers(2, 6))
    m = data.draw(st.integers(1, n))
    a = np.array(data.draw(st.lists(st.floats(-1, 1), min_size=n, max_size=n)))
    sides = np.array(data.draw(st.lists(st.floats(0, 0.5), min_size=n, max_size=n)))
    b = a + sides
    box = spanning_hypercuboid(a, b)
    verts, sets = surface_shortest_path(box, a, b, m)
    prev = a
    for v, s in zip(verts, sets):
        assert box.contains(v)
        assert len(s) <= m
        changed = {i + 1 for i in np.nonzero(v != prev)[0]}
        assert changed <= s
        prev = v
    np.testing.assert_array_equal(verts[-1], b)
