"""Tiny SVG writer for chain drawings and replay storyboards.

Only the handful of primitives the CLI needs; world coordinates are meters
with y up, flipped to screen space on write.
"""

from __future__ import annotations

import io


class SvgCanvas:
    def __init__(self, x_range, y_range, width_px: int = 640):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        span_x = self.x1 - self.x0
        span_y = self.y1 - self.y0
        if span_x <= 0 or span_y <= 0:
            raise ValueError("empty drawing range")
        self.scale = width_px / span_x
        self.width = width_px
        self.height = span_y * self.scale
        self._body = io.StringIO()

    def _pt(self, p):
        x = (p[0] - self.x0) * self.scale
        y = (self.y1 - p[1]) * self.scale
        return f"{x:.2f},{y:.2f}"

    def polygon(self, pts, fill="#888", stroke="none", opacity=1.0):
        path = " ".join(self._pt(p) for p in pts)
        self._body.write(
            f'<polygon points="{path}" fill="{fill}" stroke="{stroke}" '
            f'fill-opacity="{opacity:g}"/>\n'
        )

    def polyline(self, pts, stroke="#000", width=1.5):
        path = " ".join(self._pt(p) for p in pts)
        self._body.write(
            f'<polyline points="{path}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width:g}"/>\n'
        )

    def circle(self, center, radius_m, fill="#36c", stroke="none"):
        x = (center[0] - self.x0) * self.scale
        y = (self.y1 - center[1]) * self.scale
        r = radius_m * self.scale
        self._body.write(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r:.2f}" fill="{fill}" stroke="{stroke}"/>\n'
        )

    def text(self, anchor, label, size_px=12, fill="#333"):
        x = (anchor[0] - self.x0) * self.scale
        y = (self.y1 - anchor[1]) * self.scale
        self._body.write(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size_px}" '
            f'font-family="sans-serif" fill="{fill}">{label}</text>\n'
        )

    def to_string(self) -> str:
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width:.0f}" '
            f'height="{self.height:.0f}" viewBox="0 0 {self.width:.0f} {self.height:.0f}">\n'
            f'<rect width="100%" height="100%" fill="#fff"/>\n'
            f"{self._body.getvalue()}</svg>\n"
        )


def draw_robot(canvas: SvgCanvas, footprint, carriage_rect=None, trace=None):
    for rect in footprint.rectangles:
        canvas.polygon(rect, fill="#c8ccd4", stroke="#555")
    if trace is not None and len(trace) > 1:
        canvas.polyline(trace, stroke="#111", width=1.0)
    if carriage_rect is not None:
        canvas.polygon(carriage_rect, fill="#d33", stroke="#a00")


def draw_scene(canvas: SvgCanvas, scene):
    for poly in scene.obstacles:
        canvas.polygon(poly, fill="#777", stroke="#333")
    canvas.circle(scene.target_center, scene.target_radius, fill="#36c")
