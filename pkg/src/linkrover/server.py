"""WebSocket teleoperation service and static UI host.

One session per connection. Client messages are {type, args, seq} envelopes;
the server answers each with zero or more {type: "event"} frames and exactly
one {type: "snapshot"} frame, all carrying seq_ack. Malformed input yields a
{type: "error"} frame and leaves the session untouched.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse

from . import bundled
from .model import RobotSpec
from .plan import PlanFormatError, parse_plan
from .scene import Scene
from .teleop import (
    Command,
    ProtocolError,
    SessionState,
    apply_command,
    snapshot,
)

FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>linkrover</title></head>
<body><h1>linkrover teleoperation service</h1>
<p>No web UI bundle is installed. Build the frontend and pass --ui-dir,
or talk to the WebSocket endpoint at <code>/ws</code> directly.</p>
</body></html>
"""


def _command_from_message(msg: dict, spec: RobotSpec) -> Command:
    kind = msg.get("type")
    args = msg.get("args") or {}
    if kind in ("drive", "rotate"):
        return Command(
            kind=kind,
            direction=int(args.get("direction", 0)),
            duration=float(args.get("duration", 0.0)),
        )
    if kind in ("engage", "disengage", "step_plan", "reset"):
        return Command(kind=kind)
    if kind == "load_plan":
        name = args.get("name")
        if name:
            plan = bundled.bundled_plan(name)
        elif "text" in args:
            plan = parse_plan(args["text"])
            name = "inline"
        else:
            raise ProtocolError("load_plan needs a bundled name or plan text")
        return Command(kind="load_plan", plan=plan, name=name)
    if kind == "load_scene":
        name = args.get("name")
        if not name:
            raise ProtocolError("load_scene needs a scene name")
        scene = Scene.from_json(bundled.bundled_text("scenes", f"{name}.json"))
        return Command(kind="load_scene", scene=scene, name=name)
    raise ProtocolError(f"unknown command type {kind!r}")


def _scene_payload(scene: Scene | None) -> dict | None:
    return None if scene is None else scene.to_dict()


def build_app(
    spec: RobotSpec | None = None,
    scene: Scene | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    spec = spec or bundled.bundled_robot("snake10")
    app = FastAPI(title="linkrover teleop")
    ui_path = Path(ui_dir) if ui_dir else None

    @app.get("/", response_class=HTMLResponse)
    def index():
        if ui_path is not None and (ui_path / "index.html").exists():
            return HTMLResponse((ui_path / "index.html").read_text(encoding="utf-8"))
        return HTMLResponse(FALLBACK_PAGE)

    @app.get("/static/{name:path}")
    def static(name: str):
        if ui_path is None:
            return JSONResponse({"error": "no UI bundle"}, status_code=404)
        target = (ui_path / name).resolve()
        if not str(target).startswith(str(ui_path.resolve())) or not target.is_file():
            return JSONResponse({"error": "not found"}, status_code=404)
        return FileResponse(target)

    @app.get("/api/spec")
    def get_spec():
        return JSONResponse(spec.to_dict())

    @app.get("/api/scenes")
    def get_scenes():
        names = [n[: -len(".json")] for n in bundled.list_bundle("scenes")]
        return JSONResponse({"scenes": names})

    @app.get("/api/plans")
    def get_plans():
        names = [n[: -len(".txt")] for n in bundled.list_bundle("plans")]
        return JSONResponse({"plans": names})

    @app.get("/api/scene/{name}")
    def get_scene(name: str):
        try:
            payload = json.loads(bundled.bundled_text("scenes", f"{name}.json"))
        except FileNotFoundError:
            return JSONResponse({"error": "not found"}, status_code=404)
        return JSONResponse(payload)

    @app.websocket("/ws")
    async def ws_session(ws: WebSocket):
        await ws.accept()
        state = SessionState.fresh(spec, scene)

        async def send(obj: dict):
            await ws.send_text(json.dumps(obj, sort_keys=True, separators=(",", ":")))

        await send(
            {
                "type": "snapshot",
                "seq_ack": 0,
                "payload": snapshot(state),
                "scene": _scene_payload(state.scene),
            }
        )
        try:
            while True:
                raw = await ws.receive_text()
                seq = None
                try:
                    msg = json.loads(raw)
                    seq = msg.get("seq")
                    cmd = _command_from_message(msg, spec)
                    state, events = apply_command(state, cmd)
                except (
                    ProtocolError,
                    PlanFormatError,
                    ValueError,
                    KeyError,
                    TypeError,
                    FileNotFoundError,
                ) as exc:
                    await send({"type": "error", "seq_ack": seq, "payload": str(exc)})
                    continue
                for ev in events:
                    await send(
                        {
                            "type": "event",
                            "seq_ack": seq,
                            "payload": {"kind": ev.kind, **ev.detail},
                        }
                    )
                frame = {"type": "snapshot", "seq_ack": seq, "payload": snapshot(state)}
                if any(ev.kind in ("scene_loaded", "reset") for ev in events):
                    frame["scene"] = _scene_payload(state.scene)
                await send(frame)
        except WebSocketDisconnect:
            return

    return app
