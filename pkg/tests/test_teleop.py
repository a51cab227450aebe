import json
import math

import numpy as np
import pytest

from linkrover.bundled import bundled_plan, bundled_robot, bundled_text
from linkrover.model import RobotSpec
from linkrover.plan import Plan, replay
from linkrover.scene import Scene
from linkrover.teleop import (
    MAX_COMMAND_S,
    ProtocolError,
    SessionState,
    apply_command,
    disengage,
    drive,
    engage,
    load_plan,
    load_scene,
    reset,
    rotate,
    snapshot,
    step_plan,
)


@pytest.fixture
def session(snake10):
    return SessionState.fresh(snake10)


def run(state, *cmds):
    all_events = []
    for c in cmds:
        state, events = apply_command(state, c)
        all_events.extend(events)
    return state, all_events


class TestDrive:
    def test_speed_in_link_lengths(self, session):
        new, events = apply_command(session, drive(+1, 1.0))
        assert new.carriage_pos == pytest.approx(0.6, abs=1e-9)  # 3 cm/s over 5 cm links
        assert events == []
        assert new.clock == pytest.approx(1.0)

    def test_clamped_at_chain_ends(self, session):
        state, _ = run(session, drive(-1, 2.0))
        assert state.carriage_pos == 0.0
        state, _ = run(state, *[drive(+1, 10.0)] * 4)
        assert state.carriage_pos == 10.0

    def test_rejected_while_engaged(self, session):
        state, _ = run(session, drive(+1, 10.0 / 6))  # reach joint 1 exactly
        state, ev = run(state, engage())
        assert state.engaged_joint == 1
        before = state
        state, events = apply_command(state, drive(+1, 1.0))
        assert events[0].kind == "rejected"
        assert state == before  # untouched, including the clock

    def test_duration_validated(self, session):
        with pytest.raises(ProtocolError):
            apply_command(session, drive(+1, 0.0))
        with pytest.raises(ProtocolError):
            apply_command(session, drive(+1, MAX_COMMAND_S + 1))


class TestEngageRotate:
    def drive_to_joint(self, state, joint):
        # 0.6 links per second
        need = (joint - state.carriage_pos) / 0.6
        state, _ = run(state, *([drive(+1, 10.0)] * int(need // 10)))
        rem = (joint - state.carriage_pos) / 0.6
        if rem > 0:
            state, _ = run(state, drive(+1, rem))
        return state

    def test_engage_requires_joint_position(self, session):
        state, _ = run(session, drive(+1, 0.5))  # 0.3 links, between joints
        state, events = run(state, engage())
        assert events[-1].kind == "rejected"
        assert state.engaged_joint is None

    def test_rotate_without_engagement_rejected(self, session):
        state, events = run(session, rotate(+1, 1.0))
        assert events[0].kind == "rejected"
        assert state.clock == 0.0

    def test_rotation_rate_and_clamp(self, session):
        state = self.drive_to_joint(session, 1)
        state, _ = run(state, engage())
        clock0 = state.clock
        state, events = run(state, rotate(+1, 2.5))
        # 18 deg/s for 2.5 s reaches the 45 deg limit exactly, then clamps
        assert state.theta[0] == pytest.approx(math.pi / 4, abs=1e-9)
        assert any(e.kind == "clamp" for e in events)
        state, events = run(state, rotate(+1, 1.0))
        assert state.theta[0] == pytest.approx(math.pi / 4, abs=1e-9)
        assert state.clock == pytest.approx(clock0 + 3.5)

    def test_only_engaged_joint_moves(self, session, rng):
        state = self.drive_to_joint(session, 2)
        state, _ = run(state, engage())
        before = state.theta.copy()
        state, _ = run(state, rotate(-1, 1.5))
        moved = np.nonzero(state.theta != before)[0]
        assert list(moved) == [1]
        untouched = [i for i in range(10) if i != 1]
        assert np.array_equal(state.theta[untouched], before[untouched])

    def test_disengage_then_drive(self, session):
        state = self.drive_to_joint(session, 1)
        state, _ = run(state, engage(), rotate(+1, 0.5), disengage())
        state, events = run(state, drive(+1, 1.0))
        assert state.carriage_pos > 1.0
        assert not any(e.kind == "rejected" for e in events)


class TestCollisionFreeze:
    def test_rotation_freezes_on_contact(self, snake10):
        scene = Scene.from_json(bundled_text("scenes", "teleop_pass.json"))
        state = SessionState.fresh(snake10, scene)
        # engage joint 4 (carriage starts at 0): drive exactly 4 links
        for _ in range(4):
            state, _ = run(state, drive(+1, 10.0 / 6))
        state, events = run(state, engage())
        assert state.engaged_joint == 4
        state, events = run(state, rotate(+1, 10.0), rotate(+1, 10.0))
        assert any(e.kind == "collision" for e in events)
        # the chain stopped before interpenetration
        from linkrover.scene import collides

        hit, _ = collides(scene, snake10, state.theta)
        assert not hit

    def test_grasp_event_latches(self, snake10):
        # target on the arc the tip sweeps while joint 10 rotates
        ang = math.radians(20)
        scene = Scene(
            obstacles=(),
            target_center=(0.45 + 0.05 * math.cos(ang), 0.05 * math.sin(ang)),
            target_radius=0.01,
            grasp_radius=0.015,
        )
        state = SessionState.fresh(snake10, scene)
        for _ in range(9):
            state, _ = run(state, drive(+1, 10.0 / 6))
        state, _ = run(state, engage())
        state, events = run(state, rotate(+1, 2.0))
        assert any(e.kind == "grasp" for e in events)
        assert state.grasped
        state, events = run(state, rotate(-1, 2.0))
        assert state.grasped  # sticky


class TestPlanReplayEquivalence:
    def test_final_state_matches_cost_model_replay(self, session):
        plan = bundled_plan("pass_and_grasp")
        state, _ = run(session, load_plan(plan, "pass_and_grasp"))
        for _ in range(plan.n_steps):
            state, events = apply_command(state, step_plan())
            assert not any(e.kind == "rejected" for e in events)
        spec = bundled_robot("snake10_wide")
        want = replay(plan, spec)[-1].theta
        assert np.max(np.abs(state.theta - want)) <= 1e-9
        assert state.plan_cursor == 17
        _, done = apply_command(state, step_plan())
        assert done[0].kind == "plan_done"

    def test_grasp_during_return_phase(self, snake10):
        scene = Scene.from_json(bundled_text("scenes", "narrow_pass.json"))
        state = SessionState.fresh(snake10, scene)
        plan = bundled_plan("pass_and_grasp")
        state, _ = run(state, load_plan(plan, "pass_and_grasp"))
        grasped_after = None
        for k in range(plan.n_steps):
            state, events = apply_command(state, step_plan())
            if grasped_after is None and state.grasped:
                grasped_after = k + 1
        assert grasped_after == 8  # end of the reaching phase
        assert state.grasped  # still held through the return

    def test_step_charges_approach_travel(self, session):
        plan = Plan(steps=bundled_plan("pass_and_grasp").steps[2:3])  # travel 2 -> 6
        state, _ = run(session, load_plan(plan, "tail"))
        state, events = apply_command(state, step_plan())
        # approach 0 -> 2 plus the recorded 2 -> 6 run, plus 45 deg of turning
        want = (2 + 4) * 0.05 / 0.03 + math.radians(45) / math.radians(18)
        assert state.clock == pytest.approx(want, abs=1e-9)
        assert state.carriage_pos == 6.0


class TestSnapshotAndDeterminism:
    def test_fresh_snapshot(self, session):
        snap = snapshot(session)
        assert snap["joints"] == [0.0] * 10
        assert snap["carriage_pos"] == 0.0
        assert snap["clock_s"] == 0.0
        assert snap["engaged_joint"] is None
        assert len(snap["fk"]) == 10

    def test_snapshot_idempotent(self, session):
        a = json.dumps(snapshot(session), sort_keys=True)
        b = json.dumps(snapshot(session), sort_keys=True)
        assert a == b

    def test_transcript_determinism(self, snake10):
        cmds = [
            drive(+1, 10.0 / 6),
            engage(),
            rotate(+1, 1.3),
            disengage(),
            drive(+1, 2.0),
            engage(),
            rotate(-1, 0.7),
        ]
        outs = []
        for _ in range(2):
            state = SessionState.fresh(snake10)
            frames = []
            for c in cmds:
                state, events = apply_command(state, c)
                frames.append(json.dumps(snapshot(state), sort_keys=True))
            outs.append(frames)
        assert outs[0] == outs[1]

    def test_clock_sums_executed_durations(self, snake10):
        state = SessionState.fresh(snake10)
        state, _ = run(state, drive(+1, 10.0 / 6))
        state, _ = run(state, engage())
        state, _ = run(state, rotate(+1, 1.0), rotate(-1, 0.5))
        state, _ = run(state, rotate(+1, 0.25))
        assert state.clock == pytest.approx(10.0 / 6 + 1.75, abs=1e-9)
        # rejected commands charge nothing
        state, _ = run(state, drive(+1, 1.0))
        assert state.clock == pytest.approx(10.0 / 6 + 1.75, abs=1e-9)

    def test_manifold_invariant_random_transcript(self, snake10, rng):
        state = SessionState.fresh(snake10)
        prev = state.theta.copy()
        for _ in range(60):
            roll = rng.integers(0, 4)
            if roll == 0:
                state, _ = run(state, drive(int(rng.choice([-1, 1])), float(rng.uniform(0.1, 3))))
            elif roll == 1:
                state, _ = run(state, engage())
            elif roll == 2:
                state, _ = run(state, disengage())
            else:
                state, _ = run(state, rotate(int(rng.choice([-1, 1])), float(rng.uniform(0.1, 2))))
            changed = np.nonzero(state.theta != prev)[0]
            if changed.size:
                assert state.engaged_joint is not None
                assert list(changed) == [state.engaged_joint - 1]
            prev = state.theta.copy()

    def test_reset(self, session):
        state, _ = run(session, drive(+1, 2.0))
        state, _ = run(state, reset())
        assert state.carriage_pos == 0.0
        assert state.clock == 0.0
        assert not state.grasped


class TestSceneCommand:
    def test_load_scene_clears_grasp(self, snake10):
        scene = Scene.from_json(bundled_text("scenes", "teleop_pass.json"))
        state = SessionState.fresh(snake10)
        state, events = run(state, load_scene(scene, "teleop_pass"))
        assert events[0].kind == "scene_loaded"
        assert state.scene is not None
