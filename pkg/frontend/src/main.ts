// Browser bootstrap: wire the socket, control loop, reducer, and painter.

import { ControlLoop, QUANTUM_S } from './controls';
import { DrawCmd, render } from './render';
import { SessionSocket } from './socket';
import { CommandEnvelope } from './protocol';
import { ViewModel, initialViewModel, markSent, reduce, setConnected } from './viewmodel';

function paint(ctx: CanvasRenderingContext2D, cmds: DrawCmd[], w: number, h: number): void {
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = '#fdfdfd';
  ctx.fillRect(0, 0, w, h);
  for (const c of cmds) {
    if (c.k === 'poly') {
      ctx.beginPath();
      c.pts.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
      ctx.closePath();
      ctx.fillStyle = c.fill;
      ctx.fill();
      if (c.stroke !== 'none') {
        ctx.strokeStyle = c.stroke;
        ctx.stroke();
      }
    } else if (c.k === 'circle') {
      ctx.beginPath();
      ctx.arc(c.c[0], c.c[1], c.r, 0, 2 * Math.PI);
      ctx.fillStyle = c.fill;
      ctx.fill();
    } else if (c.k === 'line') {
      ctx.beginPath();
      c.pts.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
      ctx.strokeStyle = c.stroke;
      ctx.lineWidth = c.w;
      ctx.stroke();
      ctx.lineWidth = 1;
    } else {
      ctx.fillStyle = c.fill;
      ctx.font = `${c.size}px sans-serif`;
      ctx.fillText(c.text, c.p[0], c.p[1]);
    }
  }
}

function start(): void {
  const canvas = document.getElementById('view') as HTMLCanvasElement;
  const ctx = canvas.getContext('2d')!;
  const bannerEl = document.getElementById('banner')!;
  const noticesEl = document.getElementById('notices')!;
  const loop = new ControlLoop();
  let vm: ViewModel = initialViewModel();

  const proto = location.protocol === 'https:' ? 'wss' : 'ws';
  const socket = new SessionSocket(
    `${proto}://${location.host}/ws`,
    (frame) => {
      vm = reduce(vm, frame);
      if (vm.snapshot?.engaged_joint !== undefined) {
        loop.observeEngaged(vm.snapshot?.engaged_joint != null);
      }
      redraw();
    },
    (connected) => {
      vm = setConnected(vm, connected);
      redraw();
    },
  );

  function sendAll(cmds: CommandEnvelope[]): void {
    if (!vm.connected) return;
    for (const c of cmds) {
      vm = markSent(vm, c.seq);
      socket.send(c);
    }
  }

  function redraw(): void {
    if (vm.snapshot) {
      const cmds = render(vm.snapshot, vm.scene, {
        widthPx: canvas.width,
        heightPx: canvas.height,
        trace: vm.trace,
      });
      paint(ctx, cmds, canvas.width, canvas.height);
    }
    bannerEl.textContent = vm.banner ?? '';
    noticesEl.textContent = vm.notices.join('\n');
  }

  document.addEventListener('keydown', (e) => {
    if (e.repeat) return;
    sendAll(loop.keyDown(e.code));
    if (
      ['ArrowRight', 'ArrowLeft', 'Space', 'KeyA', 'KeyD', 'KeyR', 'KeyN'].includes(e.code)
    ) {
      e.preventDefault();
    }
  });
  document.addEventListener('keyup', (e) => loop.keyUp(e.code));
  setInterval(() => sendAll(loop.tick()), QUANTUM_S * 1000);

  function tap(code: string): CommandEnvelope[] {
    const cmds = loop.keyDown(code);
    loop.keyUp(code);
    return cmds;
  }
  const buttons: [string, () => CommandEnvelope[]][] = [
    ['btn-engage', () => tap('Space')],
    ['btn-reset', () => tap('KeyR')],
    ['btn-load', () => [loop.loadPlan('pass_and_grasp')]],
    ['btn-step', () => [loop.stepPlan()]],
    ['btn-manual', () => {
      loop.manualMode();
      return [];
    }],
  ];
  for (const [id, fn] of buttons) {
    document.getElementById(id)?.addEventListener('click', () => sendAll(fn()));
  }

  socket.connect();
}

document.addEventListener('DOMContentLoaded', start);
