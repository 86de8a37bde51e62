/**
 * Plain-canvas charts: a top-down trajectory plot and a scrolling heading
 * strip chart (raw in blue, filtered in red, matching the log plots).
 */

import type { HeadingSeries, TrajectorySeries, XY } from "./history.js";

export const SERIES_COLORS = {
  truth: "#202020",
  fused: "#2a7de1",
  gps: "#bbbbbb",
  raw: "#2a7de1",
  filtered: "#d43f3f",
};

interface Bounds {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

function boundsOf(pointLists: XY[][], pad = 0.5): Bounds {
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const points of pointLists) {
    for (const p of points) {
      xMin = Math.min(xMin, p.x);
      xMax = Math.max(xMax, p.x);
      yMin = Math.min(yMin, p.y);
      yMax = Math.max(yMax, p.y);
    }
  }
  if (!Number.isFinite(xMin)) return { xMin: -1, xMax: 1, yMin: -1, yMax: 1 };
  return { xMin: xMin - pad, xMax: xMax + pad, yMin: yMin - pad, yMax: yMax + pad };
}

function drawPolyline(
  ctx: CanvasRenderingContext2D,
  points: XY[],
  bounds: Bounds,
  width: number,
  height: number,
  color: string,
): void {
  if (points.length === 0) return;
  const sx = (x: number) => ((x - bounds.xMin) / (bounds.xMax - bounds.xMin)) * width;
  const sy = (y: number) => height - ((y - bounds.yMin) / (bounds.yMax - bounds.yMin)) * height;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(sx(points[0].x), sy(points[0].y));
  for (const p of points) ctx.lineTo(sx(p.x), sy(p.y));
  ctx.stroke();
}

export function drawTrajectory(canvas: HTMLCanvasElement, series: TrajectorySeries): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const bounds = boundsOf([series.truth, series.fused, series.gps]);
  drawPolyline(ctx, series.gps, bounds, canvas.width, canvas.height, SERIES_COLORS.gps);
  drawPolyline(ctx, series.fused, bounds, canvas.width, canvas.height, SERIES_COLORS.fused);
  drawPolyline(ctx, series.truth, bounds, canvas.width, canvas.height, SERIES_COLORS.truth);
  const head = series.truth[series.truth.length - 1];
  if (head) {
    const sx = ((head.x - bounds.xMin) / (bounds.xMax - bounds.xMin)) * canvas.width;
    const sy =
      canvas.height - ((head.y - bounds.yMin) / (bounds.yMax - bounds.yMin)) * canvas.height;
    ctx.fillStyle = SERIES_COLORS.truth;
    ctx.beginPath();
    ctx.arc(sx, sy, 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

export function drawHeadingStrip(
  canvas: HTMLCanvasElement,
  series: HeadingSeries,
  window = 600,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const n = series.t.length;
  const start = Math.max(0, n - window);
  const ts = series.t.slice(start);
  const rawPts = ts.map((t, i) => ({ x: t, y: series.raw[start + i] }));
  const filtPts = ts.map((t, i) => ({ x: t, y: series.filtered[start + i] }));
  const bounds = boundsOf([rawPts, filtPts], 0.2);
  drawPolyline(ctx, rawPts, bounds, canvas.width, canvas.height, SERIES_COLORS.raw);
  drawPolyline(ctx, filtPts, bounds, canvas.width, canvas.height, SERIES_COLORS.filtered);
}
