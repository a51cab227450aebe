"""Chain geometry, forward kinematics, and the reduced-actuation constraint.

The robot is a planar serial chain of N equal rigid links joined by passive
revolute joints. M carriage actuators ride along the links; a joint can only
move while a carriage is parked at it, so with the carriages at a fixed set
of joints the configuration is confined to an M-dimensional axis-aligned
plane in joint space.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

MANIFOLD_TOL = 1e-12
DISPLACEMENT_BOUND = 2.0 * math.pi  # per-joint carriage displacement range (-2pi, 2pi)


class DimensionError(ValueError):
    """Joint vector length does not match the robot."""


class PlacementError(ValueError):
    """Actuator placement indices are invalid for the robot."""


@dataclass(frozen=True)
class RobotSpec:
    """Geometry and limits of the chain.

    joint_limit is the symmetric relative-angle bound (radians). It is a
    declared property of the hardware; kinematic functions do not enforce it
    unless asked (see validate_joints).
    """

    n_links: int
    link_length: float
    thickness: float = 0.01
    joint_limit: float = math.pi / 4
    n_actuators: int = 1

    def __post_init__(self):
        if self.n_links < 2:
            raise ValueError(f"need at least 2 links, got {self.n_links}")
        if self.link_length <= 0:
            raise ValueError("link_length must be positive")
        if self.thickness <= 0:
            raise ValueError("thickness must be positive")
        if not 0 < self.joint_limit <= math.pi:
            raise ValueError("joint_limit must be in (0, pi]")
        if not 1 <= self.n_actuators <= self.n_links:
            raise ValueError("n_actuators must be in 1..n_links")

    def to_dict(self) -> dict:
        return {
            "n_links": self.n_links,
            "link_length_m": self.link_length,
            "thickness_m": self.thickness,
            "joint_limit_rad": self.joint_limit,
            "n_actuators": self.n_actuators,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RobotSpec":
        return cls(
            n_links=int(d["n_links"]),
            link_length=float(d["link_length_m"]),
            thickness=float(d["thickness_m"]),
            joint_limit=float(d["joint_limit_rad"]),
            n_actuators=int(d["n_actuators"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RobotSpec":
        return cls.from_dict(json.loads(text))


def load_robot(path) -> RobotSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return RobotSpec.from_json(fh.read())


def as_joint_vector(theta, n: int | None = None) -> np.ndarray:
    """Coerce to a float joint vector, optionally checking its length."""
    th = np.asarray(theta, dtype=float)
    if th.ndim != 1:
        raise DimensionError(f"joint vector must be 1-D, got shape {th.shape}")
    if n is not None and th.shape[0] != n:
        raise DimensionError(f"expected {n} joint angles, got {th.shape[0]}")
    if not np.all(np.isfinite(th)):
        raise ValueError("joint angles must be finite")
    return th


def validate_joints(spec: RobotSpec, theta, check_limit: bool = False) -> np.ndarray:
    """Length check against the robot; limit check only on request."""
    th = as_joint_vector(theta, spec.n_links)
    if check_limit and np.any(np.abs(th) > spec.joint_limit + 1e-12):
        bad = int(np.argmax(np.abs(th)))
        raise ValueError(
            f"joint {bad + 1} angle {th[bad]:.6f} rad exceeds limit {spec.joint_limit:.6f}"
        )
    return th


def link_orientations(theta) -> np.ndarray:
    """World heading of each link: prefix sums of the relative angles.

    No wrapping is applied; angles accumulate as stored.
    """
    th = as_joint_vector(theta)
    return np.cumsum(th)


def forward_kinematics(spec: RobotSpec, theta) -> np.ndarray:
    """Positions of the N link endpoints, base at the origin. Shape (N, 2)."""
    th = validate_joints(spec, theta)
    alpha = np.cumsum(th)
    x = spec.link_length * np.cumsum(np.cos(alpha))
    y = spec.link_length * np.cumsum(np.sin(alpha))
    return np.column_stack([x, y])


def chain_points(spec: RobotSpec, theta) -> np.ndarray:
    """Base point plus all link endpoints, shape (N+1, 2)."""
    pts = forward_kinematics(spec, theta)
    return np.vstack([[0.0, 0.0], pts])


def endpoint_pose(spec: RobotSpec, theta) -> tuple[float, float, float]:
    """End-effector (x, y, heading). Heading is the last link orientation."""
    th = validate_joints(spec, theta)
    alpha = np.cumsum(th)
    x = spec.link_length * float(np.sum(np.cos(alpha)))
    y = spec.link_length * float(np.sum(np.sin(alpha)))
    return x, y, float(alpha[-1])


def batch_endpoints(spec: RobotSpec, thetas: np.ndarray) -> np.ndarray:
    """End-effector positions for a (S, N) batch of joint vectors, shape (S, 2)."""
    th = np.asarray(thetas, dtype=float)
    alpha = np.cumsum(th, axis=1)
    x = spec.link_length * np.sum(np.cos(alpha), axis=1)
    y = spec.link_length * np.sum(np.sin(alpha), axis=1)
    return np.column_stack([x, y])


def jacobian(spec: RobotSpec, theta) -> np.ndarray:
    """2xN end-effector Jacobian.

    Column i is the sum over links i..N of (-L sin a_k, L cos a_k): rotating
    joint i swings every downstream link.
    """
    th = validate_joints(spec, theta)
    alpha = np.cumsum(th)
    sx = -spec.link_length * np.sin(alpha)
    cy = spec.link_length * np.cos(alpha)
    # reversed cumulative sums give the per-column tail sums
    jx = np.cumsum(sx[::-1])[::-1]
    jy = np.cumsum(cy[::-1])[::-1]
    return np.vstack([jx, jy])


def manipulability(spec: RobotSpec, theta) -> float:
    """det(J J^T), the squared volume measure used for redundancy resolution."""
    J = jacobian(spec, theta)
    return float(np.linalg.det(J @ J.T))


def canonical_placement(links, n: int) -> tuple[int, ...]:
    """Validate actuator link indices (1-based) and return them sorted."""
    idx = tuple(int(i) for i in links)
    if len(idx) == 0:
        raise PlacementError("placement needs at least one actuator")
    if len(set(idx)) != len(idx):
        raise PlacementError(f"duplicate actuator links in {idx}")
    for i in idx:
        if not 1 <= i <= n:
            raise PlacementError(f"actuator link {i} outside 1..{n}")
    return tuple(sorted(idx))


def actuated_sets(placement, n: int) -> tuple[frozenset, frozenset]:
    """Split joints 1..n into the actuated set and its complement."""
    act = frozenset(canonical_placement(placement, n))
    return act, frozenset(range(1, n + 1)) - act


@dataclass(frozen=True)
class ManifoldAnchor:
    """The axis-aligned plane of configurations reachable without moving a carriage.

    base_point holds the frozen joint angles, zeroed at actuated joints;
    active is the 1-based set of actuated joints.
    """

    base_point: np.ndarray
    active: frozenset
    displacement_bound: float = DISPLACEMENT_BOUND

    def __post_init__(self):
        p = as_joint_vector(self.base_point)
        object.__setattr__(self, "base_point", p)
        object.__setattr__(self, "active", frozenset(int(i) for i in self.active))
        for i in self.active:
            if not 1 <= i <= p.shape[0]:
                raise PlacementError(f"active joint {i} outside 1..{p.shape[0]}")
            if p[i - 1] != 0.0:
                raise ValueError(f"base point must be zero at actuated joint {i}")

    @classmethod
    def from_configuration(cls, theta, placement) -> "ManifoldAnchor":
        """Anchor through a configuration with carriages parked at `placement`."""
        th = as_joint_vector(theta)
        active, _ = actuated_sets(placement, th.shape[0])
        p = th.copy()
        for i in active:
            p[i - 1] = 0.0
        return cls(base_point=p, active=active)


def manifold_contains(theta, anchor: ManifoldAnchor, tol: float = MANIFOLD_TOL) -> bool:
    """True iff theta lies on the anchor plane with in-range displacements.

    Unactuated coordinates must match the base point to within tol (pure
    copies are exact; tol only absorbs arithmetic noise). Actuated
    displacements must stay inside the open (-2pi, 2pi) range.
    """
    th = as_joint_vector(theta, anchor.base_point.shape[0])
    diff = th - anchor.base_point
    for i in range(th.shape[0]):
        joint = i + 1
        if joint in anchor.active:
            if not -anchor.displacement_bound < diff[i] < anchor.displacement_bound:
                return False
        elif abs(diff[i]) > tol:
            return False
    return True
