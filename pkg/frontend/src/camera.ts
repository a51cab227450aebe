// World (meters, y up) to screen (pixels, y down) mapping with preserved
// aspect ratio and a small margin.

export interface Camera {
  scale: number; // pixels per meter
  ox: number; // world origin x in pixels
  oy: number; // world origin y in pixels
}

export interface Bounds {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function fitCamera(bounds: Bounds, widthPx: number, heightPx: number, marginPx = 20): Camera {
  const spanX = Math.max(bounds.xMax - bounds.xMin, 1e-6);
  const spanY = Math.max(bounds.yMax - bounds.yMin, 1e-6);
  const scale = Math.min(
    (widthPx - 2 * marginPx) / spanX,
    (heightPx - 2 * marginPx) / spanY,
  );
  const cx = (bounds.xMin + bounds.xMax) / 2;
  const cy = (bounds.yMin + bounds.yMax) / 2;
  return {
    scale,
    ox: widthPx / 2 - cx * scale,
    oy: heightPx / 2 + cy * scale,
  };
}

export function toScreen(cam: Camera, x: number, y: number): [number, number] {
  return [cam.ox + x * cam.scale, cam.oy - y * cam.scale];
}

export function growBounds(b: Bounds, x: number, y: number): Bounds {
  return {
    xMin: Math.min(b.xMin, x),
    xMax: Math.max(b.xMax, x),
    yMin: Math.min(b.yMin, y),
    yMax: Math.max(b.yMax, y),
  };
}
