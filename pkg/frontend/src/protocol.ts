// Wire protocol for the layout steering service (JSON text frames,
// protocol version 1). Mirrors the service's documented schemas exactly:
// every message and frame type round-trips through encode/decode.

export const PROTOCOL_VERSION = 1;

export type Criterion =
  | "ST" | "IL" | "NP" | "CR" | "CAM" | "AR" | "ANR" | "VR" | "GB";

export type ClientMessage =
  | { type: "set_weight"; criterion: Criterion; value: number; id?: number }
  | { type: "pin_node"; node: number; x: number; y: number; id?: number }
  | { type: "unpin_node"; node: number; id?: number }
  | { type: "pause"; id?: number }
  | { type: "resume"; id?: number }
  | { type: "reset"; seed: number; id?: number }
  | { type: "set_lr"; value: number; id?: number };

export interface HelloFrame {
  type: "hello";
  version: number;
  graph: string;
  n: number;
  edges: [number, number][];
  criteria: Criterion[];
  weights: Record<string, number>;
  every: number;
}

export interface StateFrame {
  type: "state";
  version: number;
  iteration: number;
  positions: [number, number][];
  ema: number | null;
  qualities: Record<string, number> | null;
}

export interface AckFrame {
  type: "ack";
  id: number | null;
  ok: boolean;
  iteration?: number;
  error?: string;
}

export interface HeartbeatFrame {
  type: "heartbeat";
  iteration: number;
  paused: boolean;
}

export interface DoneFrame {
  type: "done";
  iteration: number;
}

export interface ErrorFrame {
  type: "error";
  message: string;
}

export type ServerFrame =
  | HelloFrame | StateFrame | AckFrame | HeartbeatFrame | DoneFrame | ErrorFrame;

export class ProtocolError extends Error {}

const CRITERIA: Criterion[] = ["ST", "IL", "NP", "CR", "CAM", "AR", "ANR", "VR", "GB"];

export function encodeMessage(msg: ClientMessage): string {
  validateMessage(msg);
  return JSON.stringify(msg);
}

export function decodeMessage(text: string): ClientMessage {
  const raw = parseObject(text);
  validateMessage(raw as ClientMessage);
  return raw as ClientMessage;
}

function validateMessage(msg: ClientMessage): void {
  switch (msg.type) {
    case "set_weight":
      if (!CRITERIA.includes(msg.criterion)) {
        throw new ProtocolError(`unknown criterion ${String(msg.criterion)}`);
      }
      requireFinite(msg.value, "value");
      if (msg.value < 0) throw new ProtocolError("weight must be >= 0");
      return;
    case "pin_node":
      requireInt(msg.node, "node");
      requireFinite(msg.x, "x");
      requireFinite(msg.y, "y");
      return;
    case "unpin_node":
      requireInt(msg.node, "node");
      return;
    case "pause":
    case "resume":
      return;
    case "reset":
      requireInt(msg.seed, "seed");
      return;
    case "set_lr":
      requireFinite(msg.value, "value");
      if (msg.value <= 0) throw new ProtocolError("learning rate must be > 0");
      return;
    default:
      throw new ProtocolError(`unknown message type ${(msg as { type?: string }).type}`);
  }
}

export function encodeFrame(frame: ServerFrame): string {
  return JSON.stringify(frame);
}

export function decodeFrame(text: string): ServerFrame {
  const raw = parseObject(text) as Record<string, unknown>;
  switch (raw.type) {
    case "hello": {
      const f = raw as unknown as HelloFrame;
      requireInt(f.n, "n");
      if (!Array.isArray(f.edges)) throw new ProtocolError("hello.edges must be a list");
      if (!Array.isArray(f.criteria)) throw new ProtocolError("hello.criteria must be a list");
      return f;
    }
    case "state": {
      const f = raw as unknown as StateFrame;
      requireInt(f.iteration, "iteration");
      if (!Array.isArray(f.positions) || f.positions.some((p) => p.length !== 2)) {
        throw new ProtocolError("state.positions must be [x, y] pairs");
      }
      return f;
    }
    case "ack": {
      const f = raw as unknown as AckFrame;
      if (typeof f.ok !== "boolean") throw new ProtocolError("ack.ok must be boolean");
      return f;
    }
    case "heartbeat": {
      const f = raw as unknown as HeartbeatFrame;
      requireInt(f.iteration, "iteration");
      return f;
    }
    case "done": {
      const f = raw as unknown as DoneFrame;
      requireInt(f.iteration, "iteration");
      return f;
    }
    case "error": {
      const f = raw as unknown as ErrorFrame;
      if (typeof f.message !== "string") throw new ProtocolError("error.message must be text");
      return f;
    }
    default:
      throw new ProtocolError(`unknown frame type ${String(raw.type)}`);
  }
}

function parseObject(text: string): unknown {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new ProtocolError(`bad JSON: ${String(err)}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new ProtocolError("frame must be a JSON object");
  }
  return raw;
}

function requireFinite(v: unknown, name: string): void {
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ProtocolError(`${name} must be a finite number`);
  }
}

function requireInt(v: unknown, name: string): void {
  if (typeof v !== "number" || !Number.isInteger(v)) {
    throw new ProtocolError(`${name} must be an integer`);
  }
}
