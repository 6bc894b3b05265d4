// Message types for the session-service wire protocol (schema version 1).
// The UI is a pure client: it renders what the server sends and never
// recomputes model logic locally.

export type ModelKind = "habits" | "reactance" | "halo";

export interface ParamSpec {
  path: string;
  kind: "number" | "toggle" | "action";
  label: string;
  min?: number;
  max?: number;
  takes_value?: boolean;
}

export interface Capabilities {
  model: ModelKind;
  params: ParamSpec[];
  metrics: string[];
  population_size: number;
  world: { width: number; height: number };
}

export interface CitizenSprite {
  id: number;
  x: number;
  y: number;
  kind?: string;
  mode?: string;
  satisfaction?: number;
  opinion?: number;
  susceptible?: boolean;
  halo?: boolean;
  message?: number;
  broadcasting?: boolean;
  history_len?: number;
}

export interface FrameMessage {
  type: "frame";
  session: string;
  tick: number;
  metrics: Record<string, number | null>;
  agents?: CitizenSprite[];
}

export interface CreatedMessage {
  type: "created";
  session: string;
  tick: number;
  protocol: number;
  capabilities: Capabilities;
}

export interface AckMessage {
  type: "ack";
  session: string;
  verb: string;
  tick?: number;
  applies_at?: number;
  path?: string;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
  path?: string;
}

export interface SubscribedMessage {
  type: "subscribed";
  session: string;
  tick: number;
}

export type ServerMessage =
  | CreatedMessage
  | AckMessage
  | ErrorMessage
  | SubscribedMessage
  | FrameMessage;

export function parseServerMessage(raw: string): ServerMessage {
  const msg = JSON.parse(raw) as { type?: string };
  switch (msg.type) {
    case "created":
    case "ack":
    case "error":
    case "subscribed":
    case "frame":
      return msg as ServerMessage;
    default:
      throw new Error(`unknown server message type: ${String(msg.type)}`);
  }
}

export interface ScenarioPreset {
  name: string;
  model: ModelKind;
  description: string;
  overrides: Record<string, unknown>;
  seed: number;
}
