/**
 * Keyboard teleop: pressed keys accumulate velocity steps per tick, releasing
 * everything snaps the command back to zero, and outgoing messages never
 * exceed the limits advertised by /config. A rate limiter caps sends at
 * 20 Hz regardless of key-repeat rate.
 */

import type { ServerLimits, TwistMessage } from "./protocol.js";

interface Axis {
  vx: number;
  omega: number;
}

/** WASD and arrows; left turn is positive yaw. */
const KEY_AXES: Record<string, Axis> = {
  KeyW: { vx: 1, omega: 0 },
  ArrowUp: { vx: 1, omega: 0 },
  KeyS: { vx: -1, omega: 0 },
  ArrowDown: { vx: -1, omega: 0 },
  KeyA: { vx: 0, omega: 1 },
  ArrowLeft: { vx: 0, omega: 1 },
  KeyD: { vx: 0, omega: -1 },
  ArrowRight: { vx: 0, omega: -1 },
};

export function isTeleopKey(code: string): boolean {
  return code in KEY_AXES;
}

function clamp(v: number, limit: number): number {
  return Math.min(Math.max(v, -limit), limit);
}

export class TeleopInput {
  private pressed = new Set<string>();
  vx = 0;
  omega = 0;

  constructor(
    private limits: ServerLimits,
    private stepV = 0.1,
    private stepOmega = 0.2,
  ) {}

  setLimits(limits: ServerLimits): void {
    this.limits = limits;
  }

  keyDown(code: string): void {
    if (isTeleopKey(code)) this.pressed.add(code);
  }

  keyUp(code: string): void {
    this.pressed.delete(code);
  }

  releaseAll(): void {
    this.pressed.clear();
  }

  /** Advance one control tick and build the message to send. */
  tick(): TwistMessage {
    if (this.pressed.size === 0) {
      this.vx = 0;
      this.omega = 0;
    } else {
      let dvx = 0;
      let domega = 0;
      for (const code of this.pressed) {
        const axis = KEY_AXES[code];
        dvx += axis.vx;
        domega += axis.omega;
      }
      this.vx = clamp(this.vx + dvx * this.stepV, this.limits.vMax);
      this.omega = clamp(this.omega + domega * this.stepOmega, this.limits.omegaMax);
    }
    return { type: "twist", vx: this.vx, omega: this.omega };
  }
}

/** Allows at most one send per interval (default 50 ms = 20 Hz). */
export class RateLimiter {
  private lastSend = -Infinity;

  constructor(private intervalMs = 50) {}

  shouldSend(nowMs: number): boolean {
    if (nowMs - this.lastSend >= this.intervalMs) {
      this.lastSend = nowMs;
      return true;
    }
    return false;
  }
}
