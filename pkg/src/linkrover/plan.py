"""Motion plans for a single roving actuator: parsing, cost models, replay.

A plan is an ordered list of steps; each step drives the carriage from one
link to another and then rotates the joint it arrived at. Time and energy
split into a travel term, a rotation term, and a fixed per-step delay.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .model import RobotSpec


class PlanFormatError(ValueError):
    """A plan file line does not follow the step schema."""


class InfeasiblePlanError(ValueError):
    """A step rotates a joint the carriage is not parked at."""


class JointLimitError(ValueError):
    """A replayed state exceeds the robot's declared joint limit."""


@dataclass(frozen=True)
class PlanStep:
    """Carriage run from `start` to `end`, then a rotation of joint `end`.

    turn_rad may be zero (pure travel); start == end means rotate in place.
    """

    joint: int
    turn_rad: float
    start: int
    end: int

    def __post_init__(self):
        if self.joint != self.end:
            raise InfeasiblePlanError(
                f"step rotates joint {self.joint} but the carriage stops at link {self.end}"
            )

    @property
    def travel_links(self) -> int:
        return abs(self.end - self.start)

    def line(self) -> str:
        deg = math.degrees(self.turn_rad)
        return f"rotate {self.joint} {deg:+.10g} translate {self.start} {self.end}"


@dataclass
class Plan:
    """Ordered steps plus any totals the source material declared for itself."""

    steps: list[PlanStep]
    declared: dict = field(default_factory=dict)
    phases: dict = field(default_factory=dict)  # phase name -> step index range

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    def validate(self, spec: RobotSpec):
        for k, s in enumerate(self.steps):
            for link in (s.start, s.end, s.joint):
                if not 1 <= link <= spec.n_links:
                    raise InfeasiblePlanError(
                        f"step {k + 1} uses link {link}, robot has {spec.n_links}"
                    )
        return self

    def phase_steps(self, name: str) -> list[PlanStep]:
        lo, hi = self.phases[name]
        return self.steps[lo:hi]


def parse_plan(text: str) -> Plan:
    """Parse the one-step-per-line format.

    Lines: `rotate <joint> <deg> translate <from> <to>`, optional
    `declare <key> <value>` headers and `phase <name>` markers; `#` comments.
    """
    steps: list[PlanStep] = []
    declared: dict = {}
    phases: dict = {}
    open_phase = None
    for ln_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "declare":
            if len(tok) != 3:
                raise PlanFormatError(f"line {ln_no}: declare needs a key and a value")
            declared[tok[1]] = float(tok[2])
        elif tok[0] == "phase":
            if len(tok) != 2:
                raise PlanFormatError(f"line {ln_no}: phase needs a name")
            if open_phase is not None:
                phases[open_phase] = (phases[open_phase][0], len(steps))
            phases[tok[1]] = (len(steps), None)
            open_phase = tok[1]
        elif tok[0] == "rotate":
            if len(tok) != 6 or tok[3] != "translate":
                raise PlanFormatError(
                    f"line {ln_no}: expected 'rotate <joint> <deg> translate <from> <to>'"
                )
            try:
                joint = int(tok[1])
                deg = float(tok[2])
                start = int(tok[4])
                end = int(tok[5])
            except ValueError as exc:
                raise PlanFormatError(f"line {ln_no}: {exc}") from exc
            steps.append(
                PlanStep(joint=joint, turn_rad=math.radians(deg), start=start, end=end)
            )
        else:
            raise PlanFormatError(f"line {ln_no}: unknown directive {tok[0]!r}")
    if open_phase is not None:
        phases[open_phase] = (phases[open_phase][0], len(steps))
    return Plan(steps=steps, declared=declared, phases=phases)


def serialize_plan(plan: Plan) -> str:
    buf = io.StringIO()
    for key, value in plan.declared.items():
        buf.write(f"declare {key} {value:.10g}\n")
    boundaries = {lo: name for name, (lo, _) in plan.phases.items()}
    for k, step in enumerate(plan.steps):
        if k in boundaries:
            buf.write(f"phase {boundaries[k]}\n")
        buf.write(step.line() + "\n")
    return buf.getvalue()


def load_plan(path) -> Plan:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_plan(fh.read())


@dataclass(frozen=True)
class CostParams:
    """Speeds and coefficients of the carriage cost model.

    v: carriage travel speed (m/s). omega: joint rotation speed (rad/s).
    t_delay: fixed overhead per step (s). k_n, k_theta: energy per meter of
    travel and per radian of rotation.
    """

    v: float = 0.03
    omega: float = math.radians(18.0)
    t_delay: float = 1.0
    k_n: float = 1.0
    k_theta: float = 1.0

    def __post_init__(self):
        if self.v <= 0 or self.omega <= 0:
            raise ValueError("speeds must be positive")
        if self.t_delay < 0 or self.k_n < 0 or self.k_theta < 0:
            raise ValueError("delay and energy coefficients must be non-negative")


def summarize(plan: Plan) -> tuple[float, int, int]:
    """(total turning in degrees, total carriage travel in links, step count)."""
    turn = sum(abs(math.degrees(s.turn_rad)) for s in plan.steps)
    travel = sum(s.travel_links for s in plan.steps)
    return turn, travel, plan.n_steps


def total_time(plan: Plan, params: CostParams, link_length: float) -> float:
    """Travel time plus rotation time plus per-step delay."""
    travel = sum(s.travel_links for s in plan.steps)
    turn = sum(abs(s.turn_rad) for s in plan.steps)
    return (
        link_length * travel / params.v
        + turn / params.omega
        + plan.n_steps * params.t_delay
    )


def total_energy(plan: Plan, params: CostParams, link_length: float) -> float:
    """Linear energy model: travel distance and rotation, each with a coefficient."""
    travel = sum(s.travel_links for s in plan.steps)
    turn = sum(abs(s.turn_rad) for s in plan.steps)
    return params.k_n * link_length * travel + params.k_theta * turn


def point_to_point_time(
    dtheta,
    mode: str,
    params: CostParams,
    link_length: float,
    initial_joint: int | None = None,
) -> float:
    """Closed-form traversal times between two joint configurations.

    fully_actuated: all joints rotate at once, so only the largest rotation
    matters. two_actuator (3 joints): one carriage keeps joint k for both
    phases while the other hops once. one_actuator: one rotation per moving
    joint with carriage travel between them.
    """
    d = np.abs(np.asarray(dtheta, dtype=float))
    if mode == "fully_actuated":
        return float(d.max(initial=0.0)) / params.omega
    if mode == "two_actuator":
        if d.shape[0] != 3:
            raise ValueError("the two-actuator closed form needs exactly 3 joints")
        best = math.inf
        for k in range(3):
            i, j = [x for x in range(3) if x != k]
            best = min(best, max(d[k], d[i]) + max(d[k], d[j]))
        return (
            best / params.omega + link_length / params.v + 2.0 * params.t_delay
        )
    if mode == "one_actuator":
        moving = [i + 1 for i in range(d.shape[0]) if d[i] > 0.0]
        if not moving:
            return 0.0
        lo, hi = min(moving), max(moving)
        span = hi - lo
        approach = 0 if initial_joint is None else min(
            abs(initial_joint - lo), abs(initial_joint - hi)
        )
        return (
            link_length * (span + approach) / params.v
            + float(d.sum()) / params.omega
            + len(moving) * params.t_delay
        )
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class ReplayState:
    """Robot state at a step boundary during plan execution."""

    step: int
    theta: np.ndarray
    carriage: int


def replay(
    plan: Plan,
    spec: RobotSpec,
    initial_theta=None,
    initial_carriage: int = 1,
    limit_mode: str = "final",
) -> list[ReplayState]:
    """Execute a plan and emit the state after every step.

    Each step asserts the carriage path is consistent (it must start where
    the previous step ended) and that the rotated joint is where the carriage
    stops. limit_mode 'final' checks the post-rotation angle of each step
    against the robot's declared joint limit; 'strict' additionally requires
    every rotation to start inside the limit; 'none' skips the check.
    """
    if limit_mode not in ("none", "final", "strict"):
        raise ValueError(f"unknown limit_mode {limit_mode!r}")
    plan.validate(spec)
    theta = (
        np.zeros(spec.n_links)
        if initial_theta is None
        else np.array(initial_theta, dtype=float)
    )
    if theta.shape != (spec.n_links,):
        raise ValueError("initial joint vector has the wrong length")
    carriage = int(initial_carriage)
    if not 1 <= carriage <= spec.n_links:
        raise InfeasiblePlanError(f"initial carriage link {carriage} outside the chain")
    states = [ReplayState(step=0, theta=theta.copy(), carriage=carriage)]
    tol = 1e-9
    for k, step in enumerate(plan.steps, start=1):
        if step.start != carriage:
            raise InfeasiblePlanError(
                f"step {k} starts at link {step.start} but the carriage is at {carriage}"
            )
        carriage = step.end
        if step.joint != carriage:
            raise InfeasiblePlanError(
                f"step {k} rotates joint {step.joint} while the carriage is at link {carriage}"
            )
        if limit_mode == "strict" and abs(theta[step.joint - 1]) > spec.joint_limit + tol:
            raise JointLimitError(
                f"step {k}: joint {step.joint} starts at "
                f"{math.degrees(theta[step.joint - 1]):.2f} deg, beyond the limit"
            )
        theta = theta.copy()
        theta[step.joint - 1] += step.turn_rad
        if limit_mode in ("final", "strict") and abs(
            theta[step.joint - 1]
        ) > spec.joint_limit + tol:
            raise JointLimitError(
                f"step {k}: joint {step.joint} ends at "
                f"{math.degrees(theta[step.joint - 1]):.2f} deg, beyond the limit "
                f"{math.degrees(spec.joint_limit):.2f} deg"
            )
        states.append(ReplayState(step=k, theta=theta, carriage=carriage))
    return states


def sweep_states(plan: Plan, spec: RobotSpec, initial_theta=None, resolution_deg: float = 1.0):
    """Yield (step, theta) for every intermediate rotation micro-state.

    Joint angles move at `resolution_deg` increments inside each step, which
    is what collision checking runs against; the final micro-state of each
    step lands exactly on the step's target angle.
    """
    theta = (
        np.zeros(spec.n_links)
        if initial_theta is None
        else np.array(initial_theta, dtype=float)
    )
    yield 0, theta.copy()
    res = math.radians(resolution_deg)
    for k, step in enumerate(plan.steps, start=1):
        target = theta[step.joint - 1] + step.turn_rad
        n_sub = max(1, math.ceil(abs(step.turn_rad) / res))
        start_angle = theta[step.joint - 1]
        for s in range(1, n_sub + 1):
            theta = theta.copy()
            if s == n_sub:
                theta[step.joint - 1] = target
            else:
                theta[step.joint - 1] = start_angle + step.turn_rad * (s / n_sub)
            yield k, theta.copy()


def replay_to_csv(states, spec: RobotSpec) -> str:
    buf = io.StringIO()
    cols = ",".join(f"theta_{i + 1}" for i in range(spec.n_links))
    buf.write(f"step,{cols},carriage_link\n")
    for st in states:
        angles = ",".join(f"{v:.17g}" for v in st.theta)
        buf.write(f"{st.step},{angles},{st.carriage}\n")
    return buf.getvalue()


def plan_from_path(path, initial_joint: int | None = None) -> Plan:
    """Single-carriage step schedule realizing a path's breakpoints.

    Multi-joint segments are decomposed into per-joint rotations (travel
    ordered to sweep the chain), so the result is an exact rendering for
    one-actuator paths and a one-actuator equivalent otherwise.
    """
    from .approx import _sweep_order  # local import to avoid a cycle

    steps: list[PlanStep] = []
    deltas = path.segment_deltas()
    carriage = initial_joint
    for k, joints in enumerate(path.active_sets):
        moving = [j for j in sorted(joints) if deltas[k][j - 1] != 0.0]
        if not moving:
            continue
        order = _sweep_order(moving, carriage)
        for j in order:
            start = carriage if carriage is not None else j
            steps.append(
                PlanStep(joint=j, turn_rad=float(deltas[k][j - 1]), start=start, end=j)
            )
            carriage = j
    return Plan(steps=steps)
