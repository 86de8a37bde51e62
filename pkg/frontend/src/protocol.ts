/**
 * Wire types for the simulation service and defensive frame decoding.
 *
 * A state frame must carry `type: "state"` and a numeric `tick`; frames
 * missing either are dropped. Unknown extra fields are ignored so the panel
 * stays forward compatible with server additions.
 */

export interface Pose {
  x: number;
  y: number;
  theta: number;
}

export interface SegInfo {
  fractions: { soil: number; crop: number; weed: number };
  mask_png_base64?: string;
}

export interface StateFrame {
  type: "state";
  tick: number;
  t: number;
  truth: Pose;
  fused: Pose;
  gps: { x: number; y: number };
  heading: { raw: number; filtered: number; median?: number };
  nav: { waypoint_index: number; done: boolean };
  cmd: { vx: number; omega: number };
  mode: "auto" | "teleop";
  seg: SegInfo | null;
}

export interface TwistMessage {
  type: "twist";
  vx: number;
  omega: number;
}

export interface ModeMessage {
  type: "mode";
  value: "auto" | "teleop";
}

export interface ServerLimits {
  vMax: number;
  omegaMax: number;
}

const warned = new Set<string>();

/** Log each distinct decode failure reason once, not per frame. */
export function warnOnce(reason: string): void {
  if (!warned.has(reason)) {
    warned.add(reason);
    console.warn(`dropping frame: ${reason}`);
  }
}

/** Visible for tests. */
export function resetWarnings(): void {
  warned.clear();
}

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isPose(v: unknown): v is Pose {
  if (typeof v !== "object" || v === null) return false;
  const p = v as Record<string, unknown>;
  return isFiniteNumber(p.x) && isFiniteNumber(p.y) && isFiniteNumber(p.theta);
}

/**
 * Parse and validate one websocket payload. Returns null (and warns once per
 * failure reason) when the frame is unusable. Error replies from the server
 * are also surfaced here as null with their own warning.
 */
export function decodeStateFrame(data: string): StateFrame | null {
  let raw: unknown;
  try {
    raw = JSON.parse(data);
  } catch {
    warnOnce("malformed JSON");
    return null;
  }
  if (typeof raw !== "object" || raw === null) {
    warnOnce("payload is not an object");
    return null;
  }
  const frame = raw as Record<string, unknown>;
  if (frame.type === "error") {
    warnOnce(`server error reply: ${String(frame.reason)}`);
    return null;
  }
  if (frame.type !== "state") {
    warnOnce("missing or unknown frame type");
    return null;
  }
  if (!isFiniteNumber(frame.tick)) {
    warnOnce("missing tick");
    return null;
  }
  if (!isPose(frame.truth) || !isPose(frame.fused)) {
    warnOnce("missing truth/fused pose");
    return null;
  }
  const gps = frame.gps as Record<string, unknown> | undefined;
  if (!gps || !isFiniteNumber(gps.x) || !isFiniteNumber(gps.y)) {
    warnOnce("missing gps position");
    return null;
  }
  const heading = frame.heading as Record<string, unknown> | undefined;
  if (!heading || !isFiniteNumber(heading.raw) || !isFiniteNumber(heading.filtered)) {
    warnOnce("missing heading fields");
    return null;
  }
  const cmd = frame.cmd as Record<string, unknown> | undefined;
  const nav = frame.nav as Record<string, unknown> | undefined;
  return {
    type: "state",
    tick: frame.tick,
    t: isFiniteNumber(frame.t) ? frame.t : frame.tick,
    truth: frame.truth as Pose,
    fused: frame.fused as Pose,
    gps: { x: gps.x as number, y: gps.y as number },
    heading: {
      raw: heading.raw as number,
      filtered: heading.filtered as number,
      median: isFiniteNumber(heading.median) ? heading.median : undefined,
    },
    nav: {
      waypoint_index: nav && isFiniteNumber(nav.waypoint_index) ? (nav.waypoint_index as number) : 0,
      done: nav ? Boolean(nav.done) : false,
    },
    cmd: {
      vx: cmd && isFiniteNumber(cmd.vx) ? (cmd.vx as number) : 0,
      omega: cmd && isFiniteNumber(cmd.omega) ? (cmd.omega as number) : 0,
    },
    mode: frame.mode === "teleop" ? "teleop" : "auto",
    seg: (frame.seg as SegInfo | null | undefined) ?? null,
  };
}

/** Pull the robot's command limits out of the /config payload. */
export function limitsFromConfig(config: unknown): ServerLimits {
  const fallback = { vMax: 0.5, omegaMax: 1.0 };
  if (typeof config !== "object" || config === null) return fallback;
  const robot = (config as Record<string, unknown>).robot;
  if (typeof robot !== "object" || robot === null) return fallback;
  const r = robot as Record<string, unknown>;
  return {
    vMax: isFiniteNumber(r.v_max) ? r.v_max : fallback.vMax,
    omegaMax: isFiniteNumber(r.omega_max) ? r.omega_max : fallback.omegaMax,
  };
}
