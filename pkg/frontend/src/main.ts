/**
 * Panel wiring: socket -> frame buffer -> render loop, plus keyboard teleop
 * and the mode toggle. All simulation influence goes through schema-valid
 * /ws messages; rendering reads only received frames.
 */

import { drawHeadingStrip, drawTrajectory } from "./charts.js";
import { FrameBuffer } from "./history.js";
import { updateSegPanel } from "./overlay.js";
import { decodeStateFrame, limitsFromConfig } from "./protocol.js";
import { ReconnectingSocket } from "./socket.js";
import { RateLimiter, TeleopInput, isTeleopKey } from "./teleop.js";

const buffer = new FrameBuffer();
const teleop = new TeleopInput({ vMax: 0.5, omegaMax: 1.0 });
const limiter = new RateLimiter(50); // 20 Hz command cap

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const banner = $("banner");
const modeButton = $<HTMLButtonElement>("mode-toggle");
const statusLine = $("status-line");
const trajectoryCanvas = $<HTMLCanvasElement>("trajectory");
const headingCanvas = $<HTMLCanvasElement>("heading");
const segPanel = $("seg-panel");
const segImage = $<HTMLImageElement>("seg-mask");

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
const socket = new ReconnectingSocket(wsUrl, {
  onMessage: (data) => {
    const frame = decodeStateFrame(data);
    if (frame) buffer.push(frame);
  },
  onStatus: (connected) => {
    banner.style.display = connected ? "none" : "block";
    if (connected) buffer.clear(); // a fresh connection may be a fresh run
  },
});
socket.connect();

fetch("/config")
  .then((r) => r.json())
  .then((cfg) => teleop.setLimits(limitsFromConfig(cfg)))
  .catch(() => undefined);

window.addEventListener("keydown", (ev) => {
  if (isTeleopKey(ev.code)) {
    ev.preventDefault();
    teleop.keyDown(ev.code);
  }
});
window.addEventListener("keyup", (ev) => teleop.keyUp(ev.code));
window.addEventListener("blur", () => teleop.releaseAll());

modeButton.addEventListener("click", () => {
  const current = buffer.latest()?.mode ?? "auto";
  const next = current === "auto" ? "teleop" : "auto";
  socket.send({ type: "mode", value: next });
});

// Teleop command pump: one input tick per animation frame, sends capped at 20 Hz.
let lastSent = { vx: NaN, omega: NaN };
setInterval(() => {
  const latest = buffer.latest();
  if (!latest || latest.mode !== "teleop") return;
  const msg = teleop.tick();
  const changed = msg.vx !== lastSent.vx || msg.omega !== lastSent.omega;
  const keepAlive = msg.vx !== 0 || msg.omega !== 0; // refresh the dead-man
  if ((changed || keepAlive) && limiter.shouldSend(performance.now())) {
    if (socket.send(msg)) lastSent = { vx: msg.vx, omega: msg.omega };
  }
}, 50);

function render(): void {
  const latest = buffer.latest();
  if (latest) {
    drawTrajectory(trajectoryCanvas, buffer.trajectory());
    drawHeadingStrip(headingCanvas, buffer.heading());
    updateSegPanel(segPanel, segImage, latest.seg);
    modeButton.textContent = `mode: ${latest.mode}`;
    statusLine.textContent =
      `tick ${latest.tick}  t=${latest.t.toFixed(2)}s  ` +
      `cmd vx=${latest.cmd.vx.toFixed(2)} omega=${latest.cmd.omega.toFixed(2)}  ` +
      `waypoint ${latest.nav.waypoint_index}${latest.nav.done ? " (done)" : ""}`;
  }
  requestAnimationFrame(render);
}
requestAnimationFrame(render);
