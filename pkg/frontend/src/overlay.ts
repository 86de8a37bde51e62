/**
 * Segmentation overlay: latest mask image (when the server includes it) and
 * per-class pixel-fraction bars. Soil / crop / weed render blue / green /
 * red, matching the server's colorized masks.
 */

import type { SegInfo } from "./protocol.js";

export const CLASS_COLORS: Record<string, string> = {
  soil: "#2850dc",
  crop: "#32c846",
  weed: "#e63232",
};

export function fractionBarWidths(seg: SegInfo | null): Record<string, number> {
  if (!seg) return { soil: 0, crop: 0, weed: 0 };
  return {
    soil: Math.round(100 * seg.fractions.soil),
    crop: Math.round(100 * seg.fractions.crop),
    weed: Math.round(100 * seg.fractions.weed),
  };
}

export function updateSegPanel(
  container: HTMLElement,
  imgEl: HTMLImageElement,
  seg: SegInfo | null,
): void {
  const widths = fractionBarWidths(seg);
  for (const cls of ["soil", "crop", "weed"]) {
    const bar = container.querySelector<HTMLElement>(`[data-bar="${cls}"]`);
    const label = container.querySelector<HTMLElement>(`[data-label="${cls}"]`);
    if (bar) bar.style.width = `${widths[cls]}%`;
    if (label) {
      label.textContent = seg
        ? `${cls} ${(100 * seg.fractions[cls as keyof SegInfo["fractions"]]).toFixed(1)}%`
        : `${cls} –`;
    }
  }
  if (seg?.mask_png_base64) {
    imgEl.src = `data:image/png;base64,${seg.mask_png_base64}`;
    imgEl.style.display = "block";
  }
}
