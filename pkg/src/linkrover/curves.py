"""Joint-space curves, piecewise-linear carriage paths, and boxes.

A reference trajectory is any continuous map u in [0,1] -> R^N. The carriage
robot tracks it with a piecewise-linear path whose segments each move at most
M coordinates; those segments live on faces of small axis-aligned boxes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class CSpaceCurve:
    """Evaluation handle for a continuous joint-space curve on [0, 1].

    `fn` maps a scalar parameter to an N-vector. Pass vectorized=True when fn
    also accepts a 1-D parameter array and returns an (S, N) block; otherwise
    sampling falls back to a per-point loop.
    """

    def __init__(self, fn: Callable, dim: int, vectorized: bool = False):
        self.fn = fn
        self.dim = int(dim)
        self.vectorized = bool(vectorized)

    def __call__(self, u: float) -> np.ndarray:
        out = np.asarray(self.fn(float(u)), dtype=float)
        if out.shape != (self.dim,):
            raise ValueError(f"curve returned shape {out.shape}, expected ({self.dim},)")
        return out

    def sample(self, us) -> np.ndarray:
        """Evaluate at many parameters, shape (len(us), dim)."""
        us = np.asarray(us, dtype=float)
        if self.vectorized:
            out = np.asarray(self.fn(us), dtype=float)
            if out.shape != (us.shape[0], self.dim):
                raise ValueError(f"vectorized curve returned shape {out.shape}")
            return out
        return np.array([self(u) for u in us])

    @classmethod
    def from_samples(cls, us, points) -> "CSpaceCurve":
        """Piecewise-linear interpolant through (u, point) samples.

        us must be strictly increasing and span [0, 1].
        """
        us = np.asarray(us, dtype=float)
        pts = np.asarray(points, dtype=float)
        if us.ndim != 1 or pts.ndim != 2 or us.shape[0] != pts.shape[0]:
            raise ValueError("need matching 1-D parameters and 2-D points")
        if us[0] != 0.0 or us[-1] != 1.0 or np.any(np.diff(us) <= 0):
            raise ValueError("parameters must increase strictly from 0 to 1")
        dim = pts.shape[1]

        def interp(u):
            u = np.atleast_1d(np.asarray(u, dtype=float))
            u = np.clip(u, 0.0, 1.0)
            hi = np.clip(np.searchsorted(us, u, side="right"), 1, us.shape[0] - 1)
            lo = hi - 1
            w = (u - us[lo]) / (us[hi] - us[lo])
            out = pts[lo] + w[:, None] * (pts[hi] - pts[lo])
            return out

        def fn(u):
            if np.isscalar(u) or np.ndim(u) == 0:
                return interp(u)[0]
            return interp(u)

        curve = cls(fn, dim, vectorized=True)
        curve._sample_us = us
        curve._sample_points = pts
        return curve

    @classmethod
    def line(cls, a, b) -> "CSpaceCurve":
        """Straight segment from a to b."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)

        def fn(u):
            u = np.asarray(u, dtype=float)
            if u.ndim == 0:
                return a + float(u) * (b - a)
            return a[None, :] + u[:, None] * (b - a)[None, :]

        return cls(fn, a.shape[0], vectorized=True)


@dataclass(frozen=True)
class Hypercuboid:
    """Axis-aligned box given by per-coordinate lower/upper bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        up = np.asarray(self.upper, dtype=float)
        if lo.shape != up.shape or lo.ndim != 1:
            raise ValueError("corner shapes disagree")
        if np.any(lo > up):
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def sides(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, point, tol: float = 1e-12) -> bool:
        p = np.asarray(point, dtype=float)
        return bool(np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol))


def spanning_hypercuboid(a, b) -> Hypercuboid:
    """Smallest box containing both corners."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("corner shapes disagree")
    return Hypercuboid(np.minimum(a, b), np.maximum(a, b))


class PiecewiseLinearPath:
    """Ordered breakpoints in R^N with the moving-joint set of each segment.

    The path parameter t in [0, 1] follows cumulative Euclidean arc length.
    active_sets[k] names the 1-based joints that move on the segment from
    breakpoint k to k+1; every other coordinate is carried over bit-exactly.
    """

    def __init__(self, breakpoints, active_sets: Sequence[frozenset] | None = None):
        pts = np.asarray(breakpoints, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("need a (K, N) breakpoint array")
        self.breakpoints = pts
        n_seg = pts.shape[0] - 1
        if active_sets is None:
            active_sets = [
                frozenset(int(i) + 1 for i in np.nonzero(pts[k + 1] != pts[k])[0])
                for k in range(n_seg)
            ]
        if len(active_sets) != n_seg:
            raise ValueError(f"expected {n_seg} active sets, got {len(active_sets)}")
        self.active_sets = [frozenset(int(i) for i in s) for s in active_sets]
        seg = np.diff(pts, axis=0)
        self._seg_len = np.linalg.norm(seg, axis=1) if n_seg else np.zeros(0)
        total = float(self._seg_len.sum())
        self.length = total
        if n_seg and total > 0:
            self._cum = np.concatenate([[0.0], np.cumsum(self._seg_len)]) / total
        else:
            self._cum = np.linspace(0.0, 1.0, pts.shape[0])

    @property
    def dim(self) -> int:
        return self.breakpoints.shape[1]

    @property
    def n_segments(self) -> int:
        return self.breakpoints.shape[0] - 1

    def point_at(self, t: float) -> np.ndarray:
        return self.sample([t])[0]

    def sample(self, ts) -> np.ndarray:
        """Evaluate at many path parameters, shape (len(ts), N)."""
        ts = np.clip(np.asarray(ts, dtype=float), 0.0, 1.0)
        pts = self.breakpoints
        if pts.shape[0] == 1 or self.length == 0.0:
            return np.repeat(pts[:1], ts.shape[0], axis=0)
        hi = np.clip(np.searchsorted(self._cum, ts, side="right"), 1, pts.shape[0] - 1)
        lo = hi - 1
        denom = self._cum[hi] - self._cum[lo]
        # zero-length segments cannot be selected by searchsorted on a strictly
        # increasing cum array, but guard the division anyway
        w = np.where(denom > 0, (ts - self._cum[lo]) / np.where(denom > 0, denom, 1.0), 0.0)
        return pts[lo] + w[:, None] * (pts[hi] - pts[lo])

    def as_curve(self) -> CSpaceCurve:
        def fn(t):
            t = np.asarray(t, dtype=float)
            if t.ndim == 0:
                return self.sample([float(t)])[0]
            return self.sample(t)

        return CSpaceCurve(fn, self.dim, vectorized=True)

    def segment_deltas(self) -> np.ndarray:
        """Per-segment coordinate changes, shape (n_segments, N)."""
        return np.diff(self.breakpoints, axis=0)

    def total_rotation(self) -> float:
        """Sum over segments of the L1 coordinate displacement."""
        return float(np.abs(self.segment_deltas()).sum())

    def to_csv(self) -> str:
        """One breakpoint per row: N angle columns plus the arriving move set."""
        buf = io.StringIO()
        n = self.dim
        header = ",".join(f"theta_{i + 1}" for i in range(n))
        buf.write(header + ",active_joints\n")
        for k, row in enumerate(self.breakpoints):
            cols = ",".join(f"{v:.17g}" for v in row)
            if k == 0:
                active = ""
            else:
                active = "|".join(str(j) for j in sorted(self.active_sets[k - 1]))
            buf.write(f"{cols},{active}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PiecewiseLinearPath":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        header = lines[0].split(",")
        n = len(header) - 1
        pts = []
        sets = []
        for ln in lines[1:]:
            cols = ln.split(",")
            pts.append([float(c) for c in cols[:n]])
            tag = cols[n].strip()
            if pts and len(pts) > 1:
                sets.append(frozenset(int(tok) for tok in tag.split("|") if tok))
        return cls(np.asarray(pts), sets)
