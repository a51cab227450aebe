// Pure renderer: a snapshot plus cached scene geometry becomes an ordered
// draw-command list. No canvas access here, so the output is replayable and
// comparable byte for byte; the painter in main.ts executes the commands.

import { Camera, Bounds, fitCamera, growBounds, toScreen } from './camera';
import { SceneGeometry, Snapshot, checkSnapshot } from './protocol';

export type DrawCmd =
  | { k: 'poly'; pts: [number, number][]; fill: string; stroke: string }
  | { k: 'circle'; c: [number, number]; r: number; fill: string; stroke: string }
  | { k: 'line'; pts: [number, number][]; stroke: string; w: number }
  | { k: 'text'; p: [number, number]; size: number; text: string; fill: string };

export interface RenderOptions {
  widthPx: number;
  heightPx: number;
  trace: [number, number][]; // endpoint history in world meters
}

const BODY_FILL = '#c8ccd4';
const BODY_STROKE = '#555a66';
const BODY_HIT = '#f2a3a3';
const CARRIAGE_FREE = '#d84343';
const CARRIAGE_ENGAGED = '#f5a623';
const OBSTACLE = '#7a7f87';
const TARGET = '#3a6fc4';
const TARGET_HELD = '#3fae57';
const TRACE = '#20242b';

function linkRect(
  a: [number, number],
  b: [number, number],
  half: number,
): [number, number][] {
  const dx = b[0] - a[0];
  const dy = b[1] - a[1];
  const len = Math.hypot(dx, dy) || 1;
  const nx = (-dy / len) * half;
  const ny = (dx / len) * half;
  return [
    [a[0] - nx, a[1] - ny],
    [b[0] - nx, b[1] - ny],
    [b[0] + nx, b[1] + ny],
    [a[0] + nx, a[1] + ny],
  ];
}

function chainPoints(snap: Snapshot): [number, number][] {
  return [[0, 0], ...snap.fk];
}

export function worldBounds(snap: Snapshot, scene: SceneGeometry | null): Bounds {
  const reach = snap.spec.n_links * snap.spec.link_length_m;
  let b: Bounds = { xMin: -0.1 * reach, xMax: reach, yMin: -0.6 * reach, yMax: 0.6 * reach };
  for (const p of chainPoints(snap)) b = growBounds(b, p[0], p[1]);
  if (scene) {
    for (const poly of scene.obstacles) {
      for (const v of poly) b = growBounds(b, v[0], v[1]);
    }
    b = growBounds(b, scene.target.center[0], scene.target.center[1]);
  }
  const pad = 0.05 * reach;
  return { xMin: b.xMin - pad, xMax: b.xMax + pad, yMin: b.yMin - pad, yMax: b.yMax + pad };
}

function carriagePose(snap: Snapshot): { a: [number, number]; b: [number, number] } {
  const pts = chainPoints(snap);
  const n = snap.spec.n_links;
  const pos = Math.min(Math.max(snap.carriage_pos, 0), n);
  const idx = Math.min(Math.floor(pos), n - 1);
  const frac = pos - idx;
  const p = pts[idx];
  const q = pts[idx + 1];
  const cx = p[0] + frac * (q[0] - p[0]);
  const cy = p[1] + frac * (q[1] - p[1]);
  const len = Math.hypot(q[0] - p[0], q[1] - p[1]) || 1;
  const ux = (q[0] - p[0]) / len;
  const uy = (q[1] - p[1]) / len;
  const halfLen = 0.35 * snap.spec.link_length_m;
  return {
    a: [cx - ux * halfLen, cy - uy * halfLen],
    b: [cx + ux * halfLen, cy + uy * halfLen],
  };
}

export function render(
  snapRaw: unknown,
  scene: SceneGeometry | null,
  opts: RenderOptions,
): DrawCmd[] {
  const snap = checkSnapshot(snapRaw);
  const cam = fitCamera(worldBounds(snap, scene), opts.widthPx, opts.heightPx);
  const s = (p: [number, number]) => toScreen(cam, p[0], p[1]);
  const cmds: DrawCmd[] = [];

  if (scene) {
    for (const poly of scene.obstacles) {
      cmds.push({
        k: 'poly',
        pts: poly.map((v) => s([v[0], v[1]])),
        fill: OBSTACLE,
        stroke: '#44484f',
      });
    }
    cmds.push({
      k: 'circle',
      c: s(scene.target.center),
      r: scene.target.radius_m * cam.scale,
      fill: snap.grasped ? TARGET_HELD : TARGET,
      stroke: 'none',
    });
  }

  if (opts.trace.length > 1) {
    cmds.push({ k: 'line', pts: opts.trace.map(s), stroke: TRACE, w: 1 });
  }

  const pts = chainPoints(snap);
  const half = snap.spec.thickness_m / 2;
  const hitLinks = new Set(snap.contacts.map((c) => c[0]));
  for (let i = 0; i < snap.spec.n_links; i++) {
    const rect = linkRect(pts[i], pts[i + 1], half);
    cmds.push({
      k: 'poly',
      pts: rect.map(s),
      fill: hitLinks.has(i + 1) ? BODY_HIT : BODY_FILL,
      stroke: BODY_STROKE,
    });
  }

  const carriage = carriagePose(snap);
  const rect = linkRect(carriage.a, carriage.b, half * 1.8);
  cmds.push({
    k: 'poly',
    pts: rect.map(s),
    fill: snap.engaged_joint !== null ? CARRIAGE_ENGAGED : CARRIAGE_FREE,
    stroke: '#803030',
  });

  const status =
    `t=${snap.clock_s.toFixed(2)}s carriage=${snap.carriage_pos.toFixed(2)}` +
    (snap.engaged_joint !== null ? ` engaged=j${snap.engaged_joint}` : '') +
    (snap.grasped ? ' grasped' : '') +
    (snap.plan ? ` plan ${snap.plan.cursor}/${snap.plan.steps}` : '');
  cmds.push({ k: 'text', p: [8, 16], size: 12, text: status, fill: '#20242b' });
  for (const [link, obstacle] of snap.contacts) {
    cmds.push({
      k: 'text',
      p: [8, 32],
      size: 12,
      text: `contact: link ${link} / obstacle ${obstacle}`,
      fill: '#b3261e',
    });
  }
  return cmds;
}

export function renderLog(cmds: DrawCmd[]): string {
  return cmds.map((c) => JSON.stringify(c)).join('\n');
}
