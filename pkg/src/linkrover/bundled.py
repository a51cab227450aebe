"""Access to the data files shipped with the package."""

from __future__ import annotations

from importlib import resources

from .model import RobotSpec
from .plan import Plan, parse_plan


def _read(relpath: str) -> str:
    node = resources.files(__package__) / "data"
    for part in relpath.split("/"):
        node = node / part
    return node.read_text(encoding="utf-8")


def list_bundle(kind: str) -> list[str]:
    """Names available under one data directory (plans, robots, scenes, tasks)."""
    node = resources.files(__package__) / "data" / kind
    return sorted(p.name for p in node.iterdir() if p.is_file())


def bundled_plan(name: str = "pass_and_grasp") -> Plan:
    return parse_plan(_read(f"plans/{name}.txt"))


def bundled_robot(name: str) -> RobotSpec:
    return RobotSpec.from_json(_read(f"robots/{name}.json"))


def bundled_text(kind: str, filename: str) -> str:
    return _read(f"{kind}/{filename}")
