"""Command-line front end.

Subcommands: fk (pose of a configuration), approx (duplicate a task trajectory
under the actuator budget), sweep (tolerance/actuator grids to CSV), replay
(execute a plan through a scene), serve (teleoperation server). Exit codes:
0 success, 1 domain failure, 2 usage.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bundled
from .approx import approximation_curve, count_traversals, verify_delta_approx
from .curves import PiecewiseLinearPath
from .metrics import (
    empirical_endpoint_error,
    empirical_orientation_error,
    endpoint_error_bound,
)
from .model import RobotSpec, endpoint_pose, forward_kinematics, load_robot
from .plan import (
    CostParams,
    InfeasiblePlanError,
    JointLimitError,
    Plan,
    load_plan,
    plan_from_path,
    replay,
    replay_to_csv,
    serialize_plan,
    summarize,
    sweep_states,
    total_time,
)
from .scene import Scene, can_grasp, collides, load_scene, robot_footprint
from .svg import SvgCanvas, draw_robot, draw_scene
from .tasks import load_task, parse_task, reference_trajectory

DEFAULT_ROBOT = "arm3"


def _resolve_robot(value: str | None, fallback: str = DEFAULT_ROBOT) -> RobotSpec:
    if value is None:
        return bundled.bundled_robot(fallback)
    if Path(value).exists():
        return load_robot(value)
    return bundled.bundled_robot(value)


def _resolve_task(value: str):
    if Path(value).exists():
        return load_task(value)
    return parse_task(json.loads(bundled.bundled_text("tasks", f"{value}.json")))


def _resolve_plan(value: str) -> Plan:
    if Path(value).exists():
        return load_plan(value)
    return bundled.bundled_plan(value)


def _resolve_scene(value: str) -> Scene:
    if Path(value).exists():
        return load_scene(value)
    return Scene.from_json(bundled.bundled_text("scenes", f"{value}.json"))


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def _parse_formats(text: str) -> list[str]:
    formats = [tok.strip() for tok in text.split(",") if tok.strip()]
    bad = [f for f in formats if f not in ("csv", "json", "svg")]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown output formats: {bad}")
    return formats


def _chain_svg(spec: RobotSpec, theta, scene: Scene | None = None) -> str:
    pts = np.vstack([[0, 0], forward_kinematics(spec, theta)])
    lo = pts.min(axis=0) - 2 * spec.link_length
    hi = pts.max(axis=0) + 2 * spec.link_length
    if scene is not None:
        for poly in scene.obstacles:
            lo = np.minimum(lo, poly.min(axis=0) - 0.02)
            hi = np.maximum(hi, poly.max(axis=0) + 0.02)
    canvas = SvgCanvas((lo[0], hi[0]), (lo[1], hi[1]))
    if scene is not None:
        draw_scene(canvas, scene)
    draw_robot(canvas, robot_footprint(spec, theta))
    return canvas.to_string()


def cmd_fk(args) -> int:
    spec = _resolve_robot(args.spec)
    theta = np.asarray(args.theta, dtype=float)
    if args.deg:
        theta = np.radians(theta)
    if theta.shape[0] != spec.n_links:
        print(
            f"error: {theta.shape[0]} angles for a {spec.n_links}-link robot",
            file=sys.stderr,
        )
        return 2
    x, y, heading = endpoint_pose(spec, theta)
    print(f"endpoint: x={x:.12g} m  y={y:.12g} m  heading={heading:.12g} rad")
    for i, p in enumerate(forward_kinematics(spec, theta), start=1):
        print(f"link {i}: ({p[0]:.12g}, {p[1]:.12g})")
    if args.svg:
        Path(args.svg).write_text(_chain_svg(spec, theta), encoding="utf-8")
        print(f"wrote {args.svg}")
    return 0


def cmd_approx(args) -> int:
    spec = _resolve_robot(args.spec)
    task = _resolve_task(args.task)
    formats = set(args.format)
    g = reference_trajectory(task, spec)
    path = approximation_curve(g, args.m, args.delta, initial_joint=args.initial_joint)
    ok, worst = verify_delta_approx(path, g, args.delta, sample_density=args.samples)
    n_step, travel, _ = count_traversals(path)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if "csv" in formats:
        (out / "path.csv").write_text(path.to_csv(), encoding="utf-8")
        derived = plan_from_path(path, initial_joint=args.initial_joint)
        (out / "plan.txt").write_text(serialize_plan(derived), encoding="utf-8")
    report = {
        "task": args.task,
        "m": args.m,
        "delta": args.delta,
        "verified": bool(ok),
        "worst_distance": worst,
        "n_segments": path.n_segments,
        "traversals": n_step,
        "carriage_travel_links": int(sum(travel)),
        "total_rotation_rad": path.total_rotation(),
    }
    if "json" in formats:
        (out / "report.json").write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    print(
        f"verified={str(ok).lower()} worst={worst:.6g} traversals={n_step} "
        f"rotation={path.total_rotation():.6g} rad"
    )
    if not ok:
        print(f"error: worst distance {worst:.6g} exceeds delta {args.delta}", file=sys.stderr)
        return 1
    return 0


def _sweep_rows(spec, task, m_list, deltas, t_r, t_s, samples):
    g = reference_trajectory(task, spec)
    rows = []
    for delta in deltas:
        for m in m_list:
            path = approximation_curve(g, m, delta)
            ok, worst = verify_delta_approx(path, g, delta, sample_density=samples)
            n_step, _, _ = count_traversals(path)
            rotation = path.total_rotation()
            time_s = t_r * rotation + t_s * n_step
            emp_pos = empirical_endpoint_error(path, g, spec, samples=samples)
            emp_ori = empirical_orientation_error(path, g, samples=samples)
            rows.append(
                {
                    "delta": delta,
                    "m": m,
                    "verified": ok,
                    "worst_distance": worst,
                    "traversals": n_step,
                    "rotation_rad": rotation,
                    "time_s": time_s,
                    "empirical_pos_m": emp_pos,
                    "empirical_ori_rad": emp_ori,
                    "bound_pos_m": endpoint_error_bound(
                        spec.n_links, spec.link_length, delta
                    ),
                    "bound_ori_rad": spec.n_links * delta,
                }
            )
    return rows


SWEEP_HEADER = (
    "delta,m,verified,worst_distance,traversals,rotation_rad,time_s,"
    "empirical_pos_m,empirical_ori_rad,bound_pos_m,bound_ori_rad"
)


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(SWEEP_HEADER + "\n")
    for r in rows:
        buf.write(
            f"{r['delta']:.17g},{r['m']},{str(r['verified']).lower()},"
            f"{r['worst_distance']:.17g},{r['traversals']},{r['rotation_rad']:.17g},"
            f"{r['time_s']:.17g},{r['empirical_pos_m']:.17g},{r['empirical_ori_rad']:.17g},"
            f"{r['bound_pos_m']:.17g},{r['bound_ori_rad']:.17g}\n"
        )
    return buf.getvalue()


def cmd_sweep(args) -> int:
    spec = _resolve_robot(args.spec)
    task = _resolve_task(args.task)
    for d in args.delta:
        if d <= 0:
            print(f"error: delta must be positive, got {d}", file=sys.stderr)
            return 2
    rows = _sweep_rows(spec, task, args.m, args.delta, args.t_r, args.t_s, args.samples)
    text = sweep_csv(rows)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        sys.stdout.write(text)
    if not all(r["verified"] for r in rows):
        print("error: some rows failed verification", file=sys.stderr)
        return 1
    return 0


def _storyboard(spec, scene, plan, states) -> str:
    pts_all = [np.vstack([[0, 0], forward_kinematics(spec, s.theta)]) for s in states]
    lo = np.min([p.min(axis=0) for p in pts_all], axis=0) - 0.05
    hi = np.max([p.max(axis=0) for p in pts_all], axis=0) + 0.05
    if scene is not None:
        for poly in scene.obstacles:
            lo = np.minimum(lo, poly.min(axis=0) - 0.02)
            hi = np.maximum(hi, poly.max(axis=0) + 0.02)
    canvas = SvgCanvas((lo[0], hi[0]), (lo[1], hi[1]), width_px=800)
    if scene is not None:
        draw_scene(canvas, scene)
    trace = [endpoint_pose(spec, s.theta)[:2] for s in states]
    n = len(states)
    for k, st in enumerate(states):
        fp = robot_footprint(spec, st.theta)
        carriage = fp.rectangles[st.carriage - 1] if k == n - 1 else None
        shade = 0.12 + 0.88 * (k / max(n - 1, 1))
        for rect in fp.rectangles:
            canvas.polygon(rect, fill="#8899bb", opacity=0.10 + 0.25 * shade)
        if carriage is not None:
            canvas.polygon(carriage, fill="#d33")
    canvas.polyline(trace, stroke="#111", width=1.2)
    return canvas.to_string()


def cmd_replay(args) -> int:
    spec = _resolve_robot(args.spec, fallback="snake10_wide")
    plan = _resolve_plan(args.plan)
    scene = _resolve_scene(args.scene) if args.scene else None
    try:
        states = replay(plan, spec, limit_mode=args.limit_mode)
    except (InfeasiblePlanError, JointLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    turn_deg, travel_links, n_steps = summarize(plan)
    params = CostParams()
    time_s = total_time(plan, params, spec.link_length)
    print(
        f"turning total: {turn_deg:.10g} deg over {n_steps} steps, "
        f"carriage travel {travel_links} links"
    )
    declared = plan.declared.get("total_turning_deg")
    if declared is not None and abs(declared - turn_deg) > 1e-9:
        print(
            f"note: plan file declares {declared:.10g} deg of turning; "
            f"the row-by-row sum is {turn_deg:.10g} deg"
        )
        declared_time = (
            spec.link_length * travel_links / params.v
            + math.radians(declared) / params.omega
            + n_steps * params.t_delay
        )
        print(
            f"time: {time_s:.6g} s (recomputed turning) / "
            f"{declared_time:.6g} s (declared turning)"
        )
    else:
        print(f"time: {time_s:.6g} s")

    collisions = []
    grasped_at = None
    if scene is not None:
        for step, theta in sweep_states(plan, spec, resolution_deg=args.resolution_deg):
            hit, contact = collides(scene, spec, theta)
            if hit:
                collisions.append({"step": step, "contact": list(contact)})
            if grasped_at is None and can_grasp(spec, theta, scene):
                grasped_at = step
        print(
            f"collisions: {len(collisions)}"
            + (f" (first at step {collisions[0]['step']})" if collisions else "")
        )
        print(f"grasp: {'step ' + str(grasped_at) if grasped_at is not None else 'never'}")

    formats = set(args.format)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        (out / "states.csv").write_text(replay_to_csv(states, spec), encoding="utf-8")
        written.append("states.csv")
    report = {
        "turning_total_deg": turn_deg,
        "declared_turning_deg": declared,
        "carriage_travel_links": travel_links,
        "n_steps": n_steps,
        "time_s": time_s,
        "collisions": collisions,
        "grasped_at_step": grasped_at,
    }
    if "json" in formats:
        (out / "report.json").write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        written.append("report.json")
    if "svg" in formats:
        (out / "storyboard.svg").write_text(
            _storyboard(spec, scene, plan, states), encoding="utf-8"
        )
        written.append("storyboard.svg")
    print(f"wrote {out}/: {', '.join(written)}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import build_app

    spec = _resolve_robot(args.spec, fallback="snake10")
    scene = _resolve_scene(args.scene) if args.scene else None
    app = build_app(spec=spec, scene=scene, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linkrover",
        description="Planar chains driven by link-roving actuators: kinematics, "
        "trajectory duplication, plan replay, teleoperation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fk", help="forward kinematics of one configuration")
    p.add_argument(
        "--theta", required=True, type=_parse_floats, help="comma-separated joint angles"
    )
    p.add_argument("--deg", action="store_true", help="angles are in degrees")
    p.add_argument("--spec", help="robot spec JSON path or bundled name")
    p.add_argument("--svg", help="write a chain drawing to this file")
    p.set_defaults(fn=cmd_fk)

    p = sub.add_parser("approx", help="duplicate a task trajectory with m actuators")
    p.add_argument("--task", required=True, help="task JSON path or bundled name")
    p.add_argument("--m", type=int, required=True, help="number of roving actuators")
    p.add_argument("--delta", type=float, required=True, help="max-norm tolerance (rad)")
    p.add_argument("--spec", help="robot spec JSON path or bundled name")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--format", type=_parse_formats, default=["csv", "json"],
                   help="outputs to write, e.g. csv,json")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--initial-joint", type=int, default=None)
    p.set_defaults(fn=cmd_approx)

    p = sub.add_parser("sweep", help="grid over tolerances and actuator counts")
    p.add_argument("--task", required=True)
    p.add_argument("--m", type=_parse_ints, required=True, help="e.g. 1,2")
    p.add_argument("--delta", type=_parse_floats, required=True, help="e.g. 0.05,0.1,0.2")
    p.add_argument("--spec", help="robot spec JSON path or bundled name")
    p.add_argument("--out", help="CSV output path (stdout when omitted)")
    p.add_argument("--t-r", type=float, default=1.0, help="seconds per radian of rotation")
    p.add_argument("--t-s", type=float, default=1.0, help="seconds per carriage traversal")
    p.add_argument("--samples", type=int, default=2000)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("replay", help="execute a plan, check a scene, render a storyboard")
    p.add_argument("--plan", default="pass_and_grasp", help="plan path or bundled name")
    p.add_argument("--scene", default="narrow_pass", help="scene path or bundled name ('' to skip)")
    p.add_argument("--spec", help="robot spec JSON path or bundled name")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--format", type=_parse_formats, default=["csv", "json", "svg"],
                   help="outputs to write, e.g. csv,svg,json")
    p.add_argument("--resolution-deg", type=float, default=1.0)
    p.add_argument(
        "--limit-mode",
        choices=["none", "final", "strict"],
        default="final",
        help="joint limit validation during replay",
    )
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("serve", help="run the teleoperation server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8700)
    p.add_argument("--spec", help="robot spec JSON path or bundled name")
    p.add_argument("--scene", default="teleop_pass", help="scene path or bundled name")
    p.add_argument("--ui-dir", default=None, help="directory with the built web UI")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
