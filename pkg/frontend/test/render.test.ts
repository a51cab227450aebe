import { readFileSync } from 'node:fs';
import { describe, expect, it } from 'vitest';

import { render, renderLog } from '../src/render';
import { SceneGeometry, Snapshot } from '../src/protocol';

const fixture = JSON.parse(
  readFileSync(new URL('../fixtures/sample_snapshot.json', import.meta.url), 'utf-8'),
) as { snapshot: Snapshot; scene: SceneGeometry };

const OPTS = { widthPx: 900, heightPx: 560, trace: [] as [number, number][] };

describe('render', () => {
  it('produces a byte-identical draw log for identical inputs', () => {
    const a = renderLog(render(fixture.snapshot, fixture.scene, OPTS));
    const b = renderLog(render(fixture.snapshot, fixture.scene, OPTS));
    expect(a).toBe(b);
    expect(a.length).toBeGreaterThan(100);
  });

  it('draws one body rectangle per link plus the carriage marker', () => {
    const cmds = render(fixture.snapshot, fixture.scene, OPTS);
    const polys = cmds.filter((c) => c.k === 'poly');
    // 2 obstacle slabs + 10 links + 1 carriage
    expect(polys.length).toBe(fixture.scene.obstacles.length + 10 + 1);
    const circles = cmds.filter((c) => c.k === 'circle');
    expect(circles.length).toBe(1); // the target disc
  });

  it('marks the carriage and engaged state distinctly', () => {
    const free = render(fixture.snapshot, fixture.scene, OPTS);
    const engagedSnap = { ...fixture.snapshot, engaged_joint: 4 };
    const engaged = render(engagedSnap, fixture.scene, OPTS);
    const lastPoly = (cmds: ReturnType<typeof render>) =>
      [...cmds].reverse().find((c) => c.k === 'poly') as { fill: string };
    expect(lastPoly(free).fill).not.toBe(lastPoly(engaged).fill);
  });

  it('highlights contacts', () => {
    const hitSnap = { ...fixture.snapshot, contacts: [[3, 0]] as [number, number][] };
    const cmds = render(hitSnap, fixture.scene, OPTS);
    const texts = cmds.filter((c) => c.k === 'text');
    expect(texts.some((t) => t.k === 'text' && t.text.includes('contact: link 3'))).toBe(true);
  });

  it('rejects malformed snapshots instead of drawing garbage', () => {
    expect(() => render({ joints: [0, 1] }, fixture.scene, OPTS)).toThrow(/malformed/);
  });

  it('renders a fixed frame transcript to a byte-identical log', async () => {
    const { initialViewModel, markSent, reduce } = await import('../src/viewmodel');
    const frames = [
      { type: 'snapshot' as const, seq_ack: 0, payload: fixture.snapshot, scene: fixture.scene },
      { type: 'event' as const, seq_ack: 1, payload: { kind: 'engaged', joint: 2 } },
      {
        type: 'snapshot' as const,
        seq_ack: 1,
        payload: { ...fixture.snapshot, engaged_joint: 2 },
      },
      {
        type: 'snapshot' as const,
        seq_ack: 2,
        payload: { ...fixture.snapshot, carriage_pos: 3.5 },
      },
    ];
    const runLog = () => {
      let vm = initialViewModel();
      vm = markSent(vm, 1);
      vm = markSent(vm, 2);
      const logs: string[] = [];
      for (const f of frames) {
        vm = reduce(vm, f);
        if (f.type === 'snapshot' && vm.snapshot) {
          logs.push(
            renderLog(
              render(vm.snapshot, vm.scene, { ...OPTS, trace: vm.trace }),
            ),
          );
        }
      }
      return logs.join('\n---\n');
    };
    const a = runLog();
    const b = runLog();
    expect(a).toBe(b);
  });

  it('draws the endpoint trace when present', () => {
    const withTrace = {
      ...OPTS,
      trace: [
        [0.1, 0.0],
        [0.12, 0.01],
        [0.14, 0.03],
      ] as [number, number][],
    };
    const cmds = render(fixture.snapshot, fixture.scene, withTrace);
    expect(cmds.some((c) => c.k === 'line')).toBe(true);
  });
});
