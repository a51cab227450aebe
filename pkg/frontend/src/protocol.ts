// Wire protocol shared with the teleoperation server: client envelopes carry
// {type, args, seq}; server frames are snapshot / event / error with seq_ack.

export type CommandType =
  | 'drive'
  | 'rotate'
  | 'engage'
  | 'disengage'
  | 'load_plan'
  | 'step_plan'
  | 'reset'
  | 'load_scene';

export interface CommandEnvelope {
  type: CommandType;
  args: Record<string, unknown>;
  seq: number;
}

export interface Snapshot {
  joints: number[];
  fk: [number, number][];
  carriage_pos: number;
  engaged_joint: number | null;
  grasped: boolean;
  clock_s: number;
  contacts: [number, number][];
  can_grasp: boolean;
  plan: { name: string; cursor: number; steps: number } | null;
  spec: {
    n_links: number;
    link_length_m: number;
    thickness_m: number;
    joint_limit_rad: number;
    n_actuators: number;
  };
}

export interface SceneGeometry {
  name: string;
  obstacles: number[][][];
  target: { center: [number, number]; radius_m: number };
  grasp_radius_m: number;
  pass_width_m: number | null;
}

export type ServerFrame =
  | { type: 'snapshot'; seq_ack: number | null; payload: Snapshot; scene?: SceneGeometry | null }
  | { type: 'event'; seq_ack: number | null; payload: { kind: string } & Record<string, unknown> }
  | { type: 'error'; seq_ack: number | null; payload: string };

export function encodeCommand(cmd: CommandEnvelope): string {
  // field order is fixed so identical commands serialize identically
  return JSON.stringify({ type: cmd.type, args: cmd.args, seq: cmd.seq });
}

export function decodeFrame(raw: string): ServerFrame {
  const obj = JSON.parse(raw);
  if (
    typeof obj !== 'object' ||
    obj === null ||
    !['snapshot', 'event', 'error'].includes(obj.type)
  ) {
    throw new Error(`not a server frame: ${raw.slice(0, 80)}`);
  }
  return obj as ServerFrame;
}

export function checkSnapshot(snap: unknown): Snapshot {
  const s = snap as Snapshot;
  if (
    !s ||
    !Array.isArray(s.joints) ||
    !Array.isArray(s.fk) ||
    typeof s.carriage_pos !== 'number' ||
    typeof s.clock_s !== 'number' ||
    !s.spec ||
    s.fk.length !== s.joints.length
  ) {
    throw new Error('malformed snapshot payload');
  }
  return s;
}
