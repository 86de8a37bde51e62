/**
 * End-to-end round trip against the real simulation service: spawn the
 * Python server, drive it over /ws exactly like the panel does, and check
 * that telemetry reflects commands within the latency budget and agrees
 * with the server's own heading log.
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { decodeStateFrame, type StateFrame } from "../src/protocol.js";

const PORT = 8700 + Math.floor(Math.random() * 200);
const BASE = `http://127.0.0.1:${PORT}`;
let server: ChildProcess;

async function waitForServer(timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/state`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("simulation service did not come up");
}

function openSocket(): Promise<WebSocket> {
  return new Promise((resolve, reject) => {
    const ws = new WebSocket(`ws://127.0.0.1:${PORT}/ws`);
    ws.once("open", () => resolve(ws));
    ws.once("error", reject);
  });
}

function collectFrames(
  ws: WebSocket,
  predicate: (f: StateFrame) => boolean,
  timeoutMs = 5000,
): Promise<{ frame: StateFrame; elapsedMs: number }> {
  const started = performance.now();
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => {
      ws.off("message", onMessage);
      reject(new Error("timed out waiting for matching frame"));
    }, timeoutMs);
    const onMessage = (data: WebSocket.RawData) => {
      const frame = decodeStateFrame(data.toString());
      if (frame && predicate(frame)) {
        clearTimeout(timer);
        ws.off("message", onMessage);
        resolve({ frame, elapsedMs: performance.now() - started });
      }
    };
    ws.on("message", onMessage);
  });
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "fieldbench-e2e-"));
  const configPath = join(dir, "world.json");
  writeFileSync(
    configPath,
    JSON.stringify({ seed: 3, sim: { mode: "teleop", duration: 600 } }),
  );
  server = spawn(
    "python3",
    ["-m", "fieldbench.cli", "serve", "--config", configPath, "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 30_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("teleop round trip", () => {
  it("reflects a clamped twist in the next state frame within 200 ms", async () => {
    const ws = await openSocket();
    try {
      // establish the stream first so latency excludes connection setup
      await collectFrames(ws, () => true);
      const waiting = collectFrames(ws, (f) => f.cmd.vx > 0);
      ws.send(JSON.stringify({ type: "twist", vx: 5.0, omega: 0.2 }));
      const { frame, elapsedMs } = await waiting;
      expect(frame.cmd.vx).toBeCloseTo(0.5, 9); // clamped to v_max
      expect(frame.cmd.omega).toBeCloseTo(0.2, 9);
      expect(elapsedMs).toBeLessThan(200);
    } finally {
      ws.close();
    }
  });

  it("acknowledges mode switches in telemetry", async () => {
    const ws = await openSocket();
    try {
      ws.send(JSON.stringify({ type: "mode", value: "auto" }));
      const { frame } = await collectFrames(ws, (f) => f.mode === "auto");
      expect(frame.mode).toBe("auto");
      ws.send(JSON.stringify({ type: "mode", value: "teleop" }));
      await collectFrames(ws, (f) => f.mode === "teleop");
    } finally {
      ws.close();
    }
  });

  it("replies with an error for unknown message types and keeps streaming", async () => {
    const ws = await openSocket();
    try {
      const errorReply = new Promise<Record<string, unknown>>((resolve) => {
        const onMessage = (data: WebSocket.RawData) => {
          const parsed = JSON.parse(data.toString());
          if (parsed.type === "error") {
            ws.off("message", onMessage);
            resolve(parsed);
          }
        };
        ws.on("message", onMessage);
      });
      ws.send(JSON.stringify({ type: "foo" }));
      const reply = await errorReply;
      expect(String(reply.reason)).toContain("foo");
      await collectFrames(ws, () => true); // stream still alive
    } finally {
      ws.close();
    }
  });
});

describe("chart data agrees with the server log", () => {
  it("heading values shown by the UI equal heading.csv rows for the same ticks", async () => {
    const ws = await openSocket();
    const frames: StateFrame[] = [];
    try {
      while (frames.length < 8) {
        const { frame } = await collectFrames(ws, () => true);
        if (!frames.length || frame.tick > frames[frames.length - 1].tick) {
          frames.push(frame);
        }
      }
    } finally {
      ws.close();
    }
    const csv = await (await fetch(`${BASE}/log/heading.csv`)).text();
    const rows = new Map<number, { raw: number; filtered: number }>();
    for (const line of csv.trim().split("\n").slice(1)) {
      const [t, raw, , filtered] = line.split(",");
      rows.set(Number(t), { raw: Number(raw), filtered: Number(filtered) });
    }
    for (const frame of frames) {
      const row = rows.get(frame.t);
      expect(row, `no CSV row for t=${frame.t}`).toBeDefined();
      expect(row!.raw).toBeCloseTo(frame.heading.raw, 12);
      expect(row!.filtered).toBeCloseTo(frame.heading.filtered, 12);
    }
  });
});
