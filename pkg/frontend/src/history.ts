/**
 * Frame history consumed by the charts. Everything rendered derives from
 * these buffered frames and nothing else, so the panel's series agree with
 * the server-side CSV log for the same run. Stale or duplicate ticks are
 * dropped to keep the series monotone.
 */

import type { StateFrame } from "./protocol.js";

export interface XY {
  x: number;
  y: number;
}

export interface TrajectorySeries {
  truth: XY[];
  fused: XY[];
  gps: XY[];
}

export interface HeadingSeries {
  t: number[];
  raw: number[];
  filtered: number[];
}

export class FrameBuffer {
  private frames: StateFrame[] = [];

  constructor(private capacity = 20_000) {}

  get length(): number {
    return this.frames.length;
  }

  latest(): StateFrame | null {
    return this.frames.length ? this.frames[this.frames.length - 1] : null;
  }

  push(frame: StateFrame): boolean {
    const last = this.latest();
    if (last !== null && frame.tick <= last.tick) return false;
    this.frames.push(frame);
    if (this.frames.length > this.capacity) {
      this.frames.splice(0, this.frames.length - this.capacity);
    }
    return true;
  }

  clear(): void {
    this.frames = [];
  }

  /** One point per received frame, per series. */
  trajectory(): TrajectorySeries {
    return {
      truth: this.frames.map((f) => ({ x: f.truth.x, y: f.truth.y })),
      fused: this.frames.map((f) => ({ x: f.fused.x, y: f.fused.y })),
      gps: this.frames.map((f) => ({ x: f.gps.x, y: f.gps.y })),
    };
  }

  /** Raw and filtered heading, one sample per received frame. */
  heading(): HeadingSeries {
    return {
      t: this.frames.map((f) => f.t),
      raw: this.frames.map((f) => f.heading.raw),
      filtered: this.frames.map((f) => f.heading.filtered),
    };
  }
}
