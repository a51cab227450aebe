// Two-channel control: held keys turn into fixed-duration command quanta on a
// 100 ms cadence, discrete keys fire on the press edge. Sequence numbers are
// strictly increasing across every emitted command.

import { CommandEnvelope } from './protocol';

export const QUANTUM_S = 0.1;

export type ControlMode = 'manual' | 'replay';

export interface KeyBinding {
  driveForward: string;
  driveBack: string;
  rotateCcw: string;
  rotateCw: string;
  engageToggle: string;
  reset: string;
  stepPlan: string;
}

export const DEFAULT_BINDING: KeyBinding = {
  driveForward: 'ArrowRight',
  driveBack: 'ArrowLeft',
  rotateCcw: 'KeyA',
  rotateCw: 'KeyD',
  engageToggle: 'Space',
  reset: 'KeyR',
  stepPlan: 'KeyN',
};

export class ControlLoop {
  private held = new Set<string>();
  private seq = 0;
  private engagedBelief = false;
  mode: ControlMode = 'manual';

  constructor(private binding: KeyBinding = DEFAULT_BINDING) {}

  get lastSeq(): number {
    return this.seq;
  }

  private next(type: CommandEnvelope['type'], args: Record<string, unknown> = {}): CommandEnvelope {
    this.seq += 1;
    return { type, args, seq: this.seq };
  }

  // Edge-triggered keys emit immediately; held keys are sampled by tick().
  keyDown(code: string): CommandEnvelope[] {
    if (this.held.has(code)) return []; // auto-repeat
    this.held.add(code);
    if (code === this.binding.engageToggle) {
      this.engagedBelief = !this.engagedBelief;
      return [this.next(this.engagedBelief ? 'engage' : 'disengage')];
    }
    if (code === this.binding.reset) {
      this.engagedBelief = false;
      return [this.next('reset')];
    }
    if (code === this.binding.stepPlan && this.mode === 'replay') {
      return [this.next('step_plan')];
    }
    return [];
  }

  keyUp(code: string): void {
    this.held.delete(code);
  }

  // called every QUANTUM_S while the page is active
  tick(): CommandEnvelope[] {
    if (this.mode !== 'manual') return [];
    const out: CommandEnvelope[] = [];
    const b = this.binding;
    if (this.held.has(b.driveForward) !== this.held.has(b.driveBack)) {
      out.push(
        this.next('drive', {
          direction: this.held.has(b.driveForward) ? 1 : -1,
          duration: QUANTUM_S,
        }),
      );
    }
    if (this.held.has(b.rotateCcw) !== this.held.has(b.rotateCw)) {
      out.push(
        this.next('rotate', {
          direction: this.held.has(b.rotateCcw) ? 1 : -1,
          duration: QUANTUM_S,
        }),
      );
    }
    return out;
  }

  // server is the source of truth; resync the toggle belief from snapshots
  observeEngaged(engaged: boolean): void {
    this.engagedBelief = engaged;
  }

  loadPlan(name: string): CommandEnvelope {
    this.mode = 'replay';
    return this.next('load_plan', { name });
  }

  stepPlan(): CommandEnvelope {
    return this.next('step_plan');
  }

  manualMode(): void {
    this.mode = 'manual';
  }
}

// The recorded transcript format used for parity testing: exactly what the
// control loop emits when an operator loads a plan and steps it to the end.
export function planTranscript(name: string, steps: number): CommandEnvelope[] {
  const loop = new ControlLoop();
  const out = [loop.loadPlan(name)];
  for (let i = 0; i < steps; i++) out.push(loop.stepPlan());
  return out;
}
