// Reducer over server frames. Only acknowledged snapshots reach the screen;
// unknown acks and error frames surface in the banner, and the end-effector
// trace accumulates here so rendering stays a pure function of this state.

import { SceneGeometry, ServerFrame, Snapshot, checkSnapshot } from './protocol';

export interface ViewModel {
  snapshot: Snapshot | null;
  scene: SceneGeometry | null;
  trace: [number, number][];
  pending: number[]; // seqs sent but not yet acknowledged
  banner: string | null;
  notices: string[]; // recent event descriptions, newest last
  connected: boolean;
}

export const MAX_TRACE = 2000;
const MAX_NOTICES = 6;

export function initialViewModel(): ViewModel {
  return {
    snapshot: null,
    scene: null,
    trace: [],
    pending: [],
    banner: null,
    notices: [],
    connected: false,
  };
}

export function markSent(vm: ViewModel, seq: number): ViewModel {
  return { ...vm, pending: [...vm.pending, seq] };
}

export function setConnected(vm: ViewModel, connected: boolean): ViewModel {
  return { ...vm, connected, banner: connected ? null : 'disconnected; controls disabled' };
}

function ackMatched(vm: ViewModel, seqAck: number | null): { vm: ViewModel; ok: boolean } {
  if (seqAck === null || seqAck === 0) return { vm, ok: true };
  if (vm.pending.includes(seqAck)) {
    return { vm: { ...vm, pending: vm.pending.filter((s) => s !== seqAck) }, ok: true };
  }
  // acks may repeat across the event+snapshot pair of one command
  if (vm.pending.every((s) => s > seqAck)) return { vm, ok: true };
  return { vm, ok: false };
}

export function reduce(vm: ViewModel, frame: ServerFrame): ViewModel {
  if (frame.type === 'error') {
    return { ...vm, banner: `server error: ${frame.payload}` };
  }
  const { vm: acked, ok } = ackMatched(vm, frame.seq_ack);
  if (!ok) {
    return { ...vm, banner: `unmatched ack ${frame.seq_ack}` };
  }
  vm = acked;
  if (frame.type === 'event') {
    const kind = frame.payload.kind;
    const detail = Object.entries(frame.payload)
      .filter(([k]) => k !== 'kind')
      .map(([k, v]) => `${k}=${JSON.stringify(v)}`)
      .join(' ');
    const line = detail ? `${kind}: ${detail}` : kind;
    const notices = [...vm.notices, line].slice(-MAX_NOTICES);
    const banner = kind === 'rejected' ? `rejected: ${detail}` : vm.banner;
    return { ...vm, notices, banner };
  }
  // snapshot frame: validate before accepting; keep the last good one on failure
  let snap: Snapshot;
  try {
    snap = checkSnapshot(frame.payload);
  } catch (exc) {
    return { ...vm, banner: `bad snapshot: ${(exc as Error).message}` };
  }
  const tip = snap.fk[snap.fk.length - 1];
  let trace = vm.trace;
  const last = trace[trace.length - 1];
  if (!last || last[0] !== tip[0] || last[1] !== tip[1]) {
    trace = [...trace, [tip[0], tip[1]] as [number, number]].slice(-MAX_TRACE);
  }
  const scene = 'scene' in frame && frame.scene !== undefined ? frame.scene ?? null : vm.scene;
  const banner = vm.banner?.startsWith('rejected') ? vm.banner : null;
  return { ...vm, snapshot: snap, scene, trace, banner };
}
