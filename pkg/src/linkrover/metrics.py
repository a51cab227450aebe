"""Endpoint error bounds and empirical error measures.

When every joint of the tracking robot stays within delta of the reference
robot, the end effector cannot drift further than an explicit trigonometric
sum; these functions evaluate that bound and measure the actual drift of a
generated path against its reference curve.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .curves import CSpaceCurve, PiecewiseLinearPath
from .model import RobotSpec, batch_endpoints


class BoundDomainError(ValueError):
    """The closed-form bound is only valid while N * delta <= pi/2."""


def _check_domain(n: int, delta: float):
    if delta < 0:
        raise BoundDomainError(f"delta must be non-negative, got {delta}")
    if n * delta > math.pi / 2 + 1e-12:
        raise BoundDomainError(
            f"bound invalid: n*delta = {n * delta:.6f} exceeds pi/2"
        )


def endpoint_error_bound(n: int, link_length: float, delta: float) -> float:
    """Worst-case planar endpoint distance for per-joint deviation delta.

    Equals 2L * sum_i sin(i*delta/2); valid while n*delta <= pi/2.
    """
    _check_domain(n, delta)
    i = np.arange(1, n + 1)
    return 2.0 * link_length * float(np.sum(np.sin(i * delta / 2.0)))


def planar_pose_bounds(n: int, link_length: float, delta: float) -> tuple[float, float]:
    """(position, orientation) bounds when the last joint sets orientation.

    Position uses the first n-1 links; orientation error is at most n*delta.
    """
    _check_domain(n, delta)
    i = np.arange(1, n)
    pos = 2.0 * link_length * float(np.sum(np.sin(i * delta / 2.0)))
    return pos, n * delta


def orientation_error(theta, theta0) -> float:
    """Absolute end-effector heading difference: |sum of joint differences|."""
    a = np.asarray(theta, dtype=float)
    b = np.asarray(theta0, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"joint vector shapes disagree: {a.shape} vs {b.shape}")
    return float(abs(np.sum(a - b)))


def per_link_orientation_deviation(theta, theta0) -> np.ndarray:
    """|alpha_i - alpha_i0| per link: prefix-sum differences, elementwise abs."""
    a = np.asarray(theta, dtype=float)
    b = np.asarray(theta0, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"joint vector shapes disagree: {a.shape} vs {b.shape}")
    return np.abs(np.cumsum(a) - np.cumsum(b))


def _sampled_endpoints(spec: RobotSpec, thetas: np.ndarray) -> np.ndarray:
    return batch_endpoints(spec, thetas)


def empirical_endpoint_error(
    f: PiecewiseLinearPath,
    g: CSpaceCurve,
    spec: RobotSpec,
    samples: int = 2000,
    two_sided: bool = False,
) -> float:
    """Workspace drift of the tracking endpoint from the reference trace.

    For each sampled path point, distance to the nearest reference endpoint;
    returns the largest such gap. The measure is one-sided by definition;
    two_sided=True additionally takes the reverse direction's worst gap,
    which is often the more honest number for self-crossing traces.
    """
    if f.dim != g.dim or f.dim != spec.n_links:
        raise ValueError("path, curve, and robot dimensions disagree")
    ts = np.linspace(0.0, 1.0, samples)
    f_pts = _sampled_endpoints(spec, np.vstack([f.sample(ts), f.breakpoints]))
    g_pts = _sampled_endpoints(spec, g.sample(ts))
    d_fg = float(cKDTree(g_pts).query(f_pts)[0].max())
    if not two_sided:
        return d_fg
    d_gf = float(cKDTree(f_pts).query(g_pts)[0].max())
    return max(d_fg, d_gf)


def empirical_orientation_error(
    f: PiecewiseLinearPath, g: CSpaceCurve, samples: int = 2000
) -> float:
    """Largest heading gap between each path sample and its nearest reference heading."""
    ts = np.linspace(0.0, 1.0, samples)
    f_h = np.sum(np.vstack([f.sample(ts), f.breakpoints]), axis=1)
    g_h = np.sort(np.sum(g.sample(ts), axis=1))
    pos = np.clip(np.searchsorted(g_h, f_h), 1, g_h.shape[0] - 1)
    best = np.minimum(np.abs(f_h - g_h[pos - 1]), np.abs(f_h - g_h[pos]))
    return float(best.max())


@dataclass(frozen=True)
class ErrorReport:
    """One row of a bound-versus-measurement comparison."""

    delta: float
    bound_pos: float
    bound_ori: float
    empirical_pos: float
    empirical_ori: float

    CSV_HEADER = "delta,bound_pos_m,bound_ori_rad,empirical_pos_m,empirical_ori_rad"

    def csv_row(self) -> str:
        return (
            f"{self.delta:.17g},{self.bound_pos:.17g},{self.bound_ori:.17g},"
            f"{self.empirical_pos:.17g},{self.empirical_ori:.17g}"
        )


def error_report(
    f: PiecewiseLinearPath,
    g: CSpaceCurve,
    spec: RobotSpec,
    delta: float,
    samples: int = 2000,
) -> ErrorReport:
    """Evaluate bound and measurement together for one tolerance setting."""
    return ErrorReport(
        delta=delta,
        bound_pos=endpoint_error_bound(spec.n_links, spec.link_length, delta),
        bound_ori=spec.n_links * delta,
        empirical_pos=empirical_endpoint_error(f, g, spec, samples=samples),
        empirical_ori=empirical_orientation_error(f, g, samples=samples),
    )


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    buf.write(ErrorReport.CSV_HEADER + "\n")
    for r in reports:
        buf.write(r.csv_row() + "\n")
    return buf.getvalue()
