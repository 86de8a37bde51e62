import { describe, expect, it } from "vitest";

import { FrameBuffer } from "../src/history.js";
import { fractionBarWidths } from "../src/overlay.js";
import type { StateFrame } from "../src/protocol.js";

function frame(tick: number, overrides: Partial<StateFrame> = {}): StateFrame {
  return {
    type: "state",
    tick,
    t: tick * 0.02,
    truth: { x: tick * 0.1, y: 0, theta: 0.1 },
    fused: { x: tick * 0.1 + 0.01, y: 0.02, theta: 0.11 },
    gps: { x: tick * 0.1 - 0.02, y: -0.01 },
    heading: { raw: 0.1 + 0.001 * tick, filtered: 0.1 },
    nav: { waypoint_index: 0, done: false },
    cmd: { vx: 0.2, omega: 0 },
    mode: "auto",
    seg: null,
    ...overrides,
  };
}

describe("FrameBuffer", () => {
  it("keeps one chart point per frame in every series", () => {
    const buf = new FrameBuffer();
    for (let i = 0; i < 100; i++) buf.push(frame(i));
    const traj = buf.trajectory();
    expect(traj.truth).toHaveLength(100);
    expect(traj.fused).toHaveLength(100);
    expect(traj.gps).toHaveLength(100);
    expect(buf.heading().raw).toHaveLength(100);
  });

  it("renders exactly the received values (no client-side physics)", () => {
    const buf = new FrameBuffer();
    const frames = [frame(1), frame(2), frame(5)];
    frames.forEach((f) => buf.push(f));
    const heading = buf.heading();
    expect(heading.raw).toEqual(frames.map((f) => f.heading.raw));
    expect(heading.filtered).toEqual(frames.map((f) => f.heading.filtered));
    expect(heading.t).toEqual(frames.map((f) => f.t));
    const traj = buf.trajectory();
    expect(traj.truth[2]).toEqual({ x: frames[2].truth.x, y: frames[2].truth.y });
  });

  it("drops stale or duplicate ticks to stay monotone", () => {
    const buf = new FrameBuffer();
    expect(buf.push(frame(10))).toBe(true);
    expect(buf.push(frame(10))).toBe(false);
    expect(buf.push(frame(9))).toBe(false);
    expect(buf.push(frame(11))).toBe(true);
    expect(buf.length).toBe(2);
  });

  it("bounds memory at the configured capacity", () => {
    const buf = new FrameBuffer(50);
    for (let i = 0; i < 200; i++) buf.push(frame(i));
    expect(buf.length).toBe(50);
    expect(buf.latest()!.tick).toBe(199);
  });

  it("identical frame streams produce identical chart series", () => {
    const a = new FrameBuffer();
    const b = new FrameBuffer();
    for (let i = 0; i < 25; i++) {
      a.push(frame(i));
      b.push(frame(i));
    }
    expect(a.heading()).toEqual(b.heading());
    expect(a.trajectory()).toEqual(b.trajectory());
  });
});

describe("fraction bars", () => {
  it("maps fractions to percent widths", () => {
    const widths = fractionBarWidths({
      fractions: { soil: 0.9, crop: 0.08, weed: 0.02 },
    });
    expect(widths).toEqual({ soil: 90, crop: 8, weed: 2 });
  });

  it("empty seg yields zero bars", () => {
    expect(fractionBarWidths(null)).toEqual({ soil: 0, crop: 0, weed: 0 });
  });
});
