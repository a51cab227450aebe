"""Planar serial chains driven by link-roving actuators.

Simulation and planning toolkit: forward/inverse kinematics for the chain,
duplication of fully-actuated joint-space trajectories under the roving
actuator constraint, endpoint error bounds, motion plan cost accounting and
replay, collision scenes, and an interactive teleoperation service.
"""

from .model import (
    ManifoldAnchor,
    RobotSpec,
    actuated_sets,
    endpoint_pose,
    forward_kinematics,
    jacobian,
    link_orientations,
    load_robot,
    manifold_contains,
    manipulability,
)
from .curves import CSpaceCurve, Hypercuboid, PiecewiseLinearPath, spanning_hypercuboid
from .approx import (
    approximation_curve,
    count_traversals,
    find_next_breakpoint,
    surface_shortest_path,
    traversal_count,
    verify_delta_approx,
)

__version__ = "0.1.0"

__all__ = [
    "CSpaceCurve",
    "Hypercuboid",
    "ManifoldAnchor",
    "PiecewiseLinearPath",
    "RobotSpec",
    "actuated_sets",
    "approximation_curve",
    "count_traversals",
    "endpoint_pose",
    "find_next_breakpoint",
    "forward_kinematics",
    "jacobian",
    "link_orientations",
    "load_robot",
    "manifold_contains",
    "manipulability",
    "spanning_hypercuboid",
    "surface_shortest_path",
    "traversal_count",
    "verify_delta_approx",
]
