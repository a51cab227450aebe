"""Calibrate the bundled narrow-pass scene against the bundled maneuver.

Replays the ten-link plan at 1 degree resolution, measures how much of the
wall line the robot body sweeps through, and reports where the wall slabs and
the target disc can sit. The chosen numbers are frozen into scene.py; this
script re-derives and checks them.
"""

import numpy as np

from linkrover.bundled import bundled_plan, bundled_robot
from linkrover.plan import Plan, replay, sweep_states
from linkrover.scene import collides, narrow_pass_scene, robot_footprint

WALL_X = (0.2475, 0.2525)
MARGIN = 0.0075


def main():
    spec = bundled_robot("snake10_wide")
    plan = bundled_plan("pass_and_grasp")

    # how high does any link body reach inside the wall band, over the sweep?
    band_max_y = -np.inf
    band_min_y = np.inf
    n_states = 0
    for _, theta in sweep_states(plan, spec, resolution_deg=1.0):
        n_states += 1
        for rect in robot_footprint(spec, theta).rectangles:
            xs = rect[:, 0]
            if xs.max() < WALL_X[0] - 0.002 or xs.min() > WALL_X[1] + 0.002:
                continue
            band_max_y = max(band_max_y, rect[:, 1].max())
            band_min_y = min(band_min_y, rect[:, 1].min())
    print(f"swept {n_states} states")
    print(f"wall-band sweep y range: [{band_min_y:.6f}, {band_max_y:.6f}]")
    print(f"bottom wall must start above {band_max_y + MARGIN:.6f}")

    # where does the reaching phase end?
    reach = Plan(steps=plan.phase_steps("reach"))
    states = replay(reach, spec)
    final = states[-1].theta
    from linkrover.model import endpoint_pose

    x, y, _ = endpoint_pose(spec, final)
    print(f"reach endpoint: ({x!r}, {y!r})")

    # verify the frozen scene against the full sweep
    scene = narrow_pass_scene(spec)
    worst = None
    for step, theta in sweep_states(plan, spec, resolution_deg=1.0):
        hit, contact = collides(scene, spec, theta)
        if hit:
            worst = (step, contact)
            break
    print("frozen scene collision-free:", worst is None, worst or "")


if __name__ == "__main__":
    main()
