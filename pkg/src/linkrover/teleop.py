"""Teleoperation session core: a pure state machine over operator commands.

Two-channel control mirrors the hardware: one channel drives the carriage
along the links, the other rotates the joint it is engaged with. Engagement
is explicit; while a joint is engaged the carriage cannot drive, and every
joint that is not engaged holds its angle bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .model import RobotSpec, forward_kinematics
from .plan import Plan
from .scene import Scene, can_grasp, collides

TICK_S = 0.02  # integration step
MAX_COMMAND_S = 10.0
ENGAGE_SNAP = 1e-6
V_MPS = 0.03  # carriage ground speed
OMEGA_RAD_S = math.radians(18.0)  # joint rotation speed


class ProtocolError(ValueError):
    """Malformed command payload."""


@dataclass(frozen=True)
class Command:
    kind: str
    direction: int = 0
    duration: float = 0.0
    plan: Plan | None = None
    scene: Scene | None = None
    name: str = ""


def drive(direction: int, duration: float) -> Command:
    return Command(kind="drive", direction=direction, duration=duration)


def rotate(direction: int, duration: float) -> Command:
    return Command(kind="rotate", direction=direction, duration=duration)


def engage() -> Command:
    return Command(kind="engage")


def disengage() -> Command:
    return Command(kind="disengage")


def load_plan(plan: Plan, name: str = "") -> Command:
    return Command(kind="load_plan", plan=plan, name=name)


def step_plan() -> Command:
    return Command(kind="step_plan")


def reset() -> Command:
    return Command(kind="reset")


def load_scene(scene: Scene, name: str = "") -> Command:
    return Command(kind="load_scene", scene=scene, name=name)


@dataclass(frozen=True)
class SessionState:
    spec: RobotSpec
    theta: np.ndarray
    carriage_pos: float  # continuous, in link lengths along the chain, 0..N
    engaged_joint: int | None
    scene: Scene | None
    grasped: bool
    clock: float
    plan: Plan | None = None
    plan_cursor: int = 0
    plan_name: str = ""

    @classmethod
    def fresh(cls, spec: RobotSpec, scene: Scene | None = None) -> "SessionState":
        return cls(
            spec=spec,
            theta=np.zeros(spec.n_links),
            carriage_pos=0.0,
            engaged_joint=None,
            scene=scene,
            grasped=False,
            clock=0.0,
        )


@dataclass(frozen=True)
class Event:
    kind: str
    detail: dict = field(default_factory=dict)


def _contacts(state: SessionState):
    if state.scene is None:
        return []
    hit, contact = collides(state.scene, state.spec, state.theta)
    return [list(contact)] if hit else []


def _grasp_now(state: SessionState) -> bool:
    if state.scene is None:
        return False
    return can_grasp(state.spec, state.theta, state.scene)


def _validated_duration(cmd: Command):
    if not 0.0 < cmd.duration <= MAX_COMMAND_S:
        raise ProtocolError(
            f"duration must be in (0, {MAX_COMMAND_S:g}] seconds, got {cmd.duration}"
        )
    if cmd.direction not in (-1, 1):
        raise ProtocolError(f"direction must be +1 or -1, got {cmd.direction}")


def apply_command(state: SessionState, cmd: Command) -> tuple[SessionState, list[Event]]:
    """Advance the session by one command; returns the new state and events.

    Pure function: the input state is never mutated. Rejected commands leave
    the state unchanged (including the clock) and emit a 'rejected' event.
    """
    events: list[Event] = []

    if cmd.kind == "drive":
        _validated_duration(cmd)
        if state.engaged_joint is not None:
            return state, [
                Event("rejected", {"reason": "cannot drive while a joint is engaged"})
            ]
        # carriage ground speed expressed in link lengths per second
        speed = V_MPS / state.spec.link_length
        pos = state.carriage_pos
        remaining = cmd.duration
        while remaining > 1e-12:
            dt = min(TICK_S, remaining)
            pos = min(max(pos + cmd.direction * speed * dt, 0.0), float(state.spec.n_links))
            remaining -= dt
        new = replace(state, carriage_pos=pos, clock=state.clock + cmd.duration)
        return new, events

    if cmd.kind == "rotate":
        _validated_duration(cmd)
        if state.engaged_joint is None:
            return state, [Event("rejected", {"reason": "no joint engaged"})]
        j = state.engaged_joint
        omega = OMEGA_RAD_S
        limit = state.spec.joint_limit
        theta = state.theta.copy()
        grasped = state.grasped
        frozen = False
        clamped = False
        remaining = cmd.duration
        while remaining > 1e-12 and not frozen:
            dt = min(TICK_S, remaining)
            remaining -= dt
            before = theta[j - 1]
            after = before + cmd.direction * omega * dt
            if after > limit:
                after, clamped = limit, True
            elif after < -limit:
                after, clamped = -limit, True
            if after == before:
                continue
            trial = theta.copy()
            trial[j - 1] = after
            if state.scene is not None:
                hit, contact = collides(state.scene, state.spec, trial)
                if hit:
                    events.append(
                        Event("collision", {"contact": list(contact), "joint": j})
                    )
                    frozen = True
                    continue  # keep the pre-contact angle, let the clock run out
            theta = trial
            if not grasped and state.scene is not None:
                if can_grasp(state.spec, theta, state.scene):
                    grasped = True
                    events.append(Event("grasp", {}))
        if clamped:
            events.append(Event("clamp", {"joint": j, "limit_rad": limit}))
        new = replace(
            state, theta=theta, grasped=grasped, clock=state.clock + cmd.duration
        )
        return new, events

    if cmd.kind == "engage":
        if state.engaged_joint is not None:
            return state, [Event("rejected", {"reason": "already engaged"})]
        nearest = round(state.carriage_pos)
        if abs(state.carriage_pos - nearest) > ENGAGE_SNAP or not (
            1 <= nearest <= state.spec.n_links
        ):
            return state, [
                Event(
                    "rejected",
                    {"reason": f"carriage at {state.carriage_pos:.4f}, not at a joint"},
                )
            ]
        new = replace(state, engaged_joint=int(nearest), carriage_pos=float(nearest))
        return new, [Event("engaged", {"joint": int(nearest)})]

    if cmd.kind == "disengage":
        if state.engaged_joint is None:
            return state, []
        return replace(state, engaged_joint=None), [Event("disengaged", {})]

    if cmd.kind == "load_plan":
        if cmd.plan is None:
            raise ProtocolError("load_plan needs a plan")
        cmd.plan.validate(state.spec)
        new = replace(state, plan=cmd.plan, plan_cursor=0, plan_name=cmd.name)
        return new, [Event("plan_loaded", {"name": cmd.name, "steps": cmd.plan.n_steps})]

    if cmd.kind == "step_plan":
        if state.plan is None:
            return state, [Event("rejected", {"reason": "no plan loaded"})]
        if state.plan_cursor >= state.plan.n_steps:
            return state, [Event("plan_done", {})]
        step = state.plan.steps[state.plan_cursor]
        theta = state.theta.copy()
        theta[step.joint - 1] += step.turn_rad
        # plan steps apply the recorded rotation verbatim (no manual clamp);
        # the duration charged is the kinematic time of the motion, including
        # the approach drive from wherever the carriage currently sits
        travel = abs(state.carriage_pos - step.start) + step.travel_links
        duration = (
            travel * state.spec.link_length / V_MPS
            + abs(step.turn_rad) / OMEGA_RAD_S
        )
        grasped = state.grasped
        events = []
        if state.scene is not None:
            hit, contact = collides(state.scene, state.spec, theta)
            if hit:
                events.append(Event("collision", {"contact": list(contact)}))
            if not grasped and can_grasp(state.spec, theta, state.scene):
                grasped = True
                events.append(Event("grasp", {}))
        new = replace(
            state,
            theta=theta,
            carriage_pos=float(step.end),
            engaged_joint=None,
            plan_cursor=state.plan_cursor + 1,
            grasped=grasped,
            clock=state.clock + duration,
        )
        events.append(
            Event(
                "plan_step",
                {"index": state.plan_cursor + 1, "of": state.plan.n_steps},
            )
        )
        return new, events

    if cmd.kind == "reset":
        new = SessionState.fresh(state.spec, state.scene)
        return new, [Event("reset", {})]

    if cmd.kind == "load_scene":
        if cmd.scene is None:
            raise ProtocolError("load_scene needs a scene")
        new = replace(state, scene=cmd.scene, grasped=False)
        return new, [Event("scene_loaded", {"name": cmd.name})]

    raise ProtocolError(f"unknown command kind {cmd.kind!r}")


def snapshot(state: SessionState) -> dict:
    """Wire payload describing the session; identical states serialize identically."""
    pts = forward_kinematics(state.spec, state.theta)
    return {
        "joints": [float(v) for v in state.theta],
        "fk": [[float(p[0]), float(p[1])] for p in pts],
        "carriage_pos": float(state.carriage_pos),
        "engaged_joint": state.engaged_joint,
        "grasped": bool(state.grasped),
        "clock_s": float(state.clock),
        "contacts": _contacts(state),
        "can_grasp": _grasp_now(state),
        "plan": (
            None
            if state.plan is None
            else {
                "name": state.plan_name,
                "cursor": state.plan_cursor,
                "steps": state.plan.n_steps,
            }
        ),
        "spec": state.spec.to_dict(),
    }
