// Wire types for the session service. These mirror the server's JSON
// schema exactly; nothing here is interpreted, only shuttled and checked.

export const SCHEMA_VERSION = 1;

// --- client -> server ---

export interface CreateSessionMessage {
  type: "create_session";
  config?: Record<string, unknown>;
}

export interface CommandMessage {
  type: "command";
  text: string;
}

export interface InputMessage {
  type: "input";
  forward?: number;
  turn?: number;
  aim_azimuth_delta?: number;
  aim_elevation_delta?: number;
  reach_delta?: number;
  rotation_delta?: number;
}

export interface PauseMessage {
  type: "pause";
}

export interface ResumeMessage {
  type: "resume";
}

export type ClientMessage =
  | CreateSessionMessage
  | CommandMessage
  | InputMessage
  | PauseMessage
  | ResumeMessage;

// --- server -> client ---

export interface AckMessage {
  type: "ack";
  schema_version: number;
  ok: boolean;
  error?: { code: string; message: string };
  // create_session acks carry these:
  session_id?: number;
  mode?: string;
  config?: SessionConfigEcho;
  // command acks may carry these:
  command?: string;
  trial_index?: number;
  paused?: boolean;
}

export interface SessionConfigEcho {
  arena: ArenaInfo;
  thresholds: ThresholdsInfo;
  mode: string;
  seed: number;
  realtime: boolean;
  [key: string]: unknown;
}

export interface ArenaInfo {
  radius: number;
  span: number; // total fan width, degrees
  segment_count: number;
  tick: number;
  table_height: number;
  grasp_height: number;
  v_max: number;
  omega_max: number;
  reach_min: number;
  reach_max: number;
  [key: string]: unknown;
}

export interface ThresholdsInfo {
  accessible_distance: number;
  graspable_aim: number;
  graspable_band: [number, number];
  dwell: number;
  timeout: number;
  [key: string]: unknown;
}

export interface SceneObject {
  kind: string;
  position: [number, number, number];
  principal_axis: [number, number, number];
  [key: string]: unknown;
}

export interface SceneMessage {
  type: "scene";
  schema_version: number;
  arena: ArenaInfo;
  objects: SceneObject[];
  mode: string;
  trial_index: number;
}

export interface AudioCue {
  left_gain: number;
  right_gain: number;
  itd_us: number;
  beep_period_ms: number | null;
  source: string;
}

export interface Frame {
  type: "frame";
  schema_version: number;
  tick: number;
  phase: string;
  avatar: { x: number; y: number; heading: number };
  wrist: {
    offset: [number, number, number];
    aim_azimuth: number;
    aim_elevation: number;
    rotation: number;
  };
  prosthesis: {
    aperture: number;
    wrist_rotation: number;
    gesture: string;
    holding: boolean;
  };
  audio_cue: AudioCue | null;
  prompt: string | null;
  events: { kind: string; text: string }[];
  clocks: { t1_s: number | null; t2_s: number | null };
  done: { success: boolean; fail_reason: string | null } | null;
  input: Record<string, number>;
}

export type ServerMessage = AckMessage | SceneMessage | Frame;

export function parseServerMessage(raw: string): ServerMessage {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new Error(`server sent non-JSON payload: ${raw.slice(0, 80)}`);
  }
  if (typeof data !== "object" || data === null || !("type" in data)) {
    throw new Error("server message missing a type field");
  }
  const type = (data as { type: unknown }).type;
  if (type !== "ack" && type !== "scene" && type !== "frame") {
    throw new Error(`unknown server message type: ${String(type)}`);
  }
  return data as ServerMessage;
}

export function isFrame(msg: ServerMessage): msg is Frame {
  return msg.type === "frame";
}

export function isScene(msg: ServerMessage): msg is SceneMessage {
  return msg.type === "scene";
}

export function isAck(msg: ServerMessage): msg is AckMessage {
  return msg.type === "ack";
}
