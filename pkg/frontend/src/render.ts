/**
 * Pure pixel-buffer rendering. No DOM here: everything returns RGBA
 * frames that main.ts blits onto a canvas, which keeps rendering rules
 * unit-testable.
 */

import { colorize, divergingColor, Rgb } from './colorize.js';
import { CoverageMapJson, DiffMapJson } from './api.js';

export interface Frame {
  width: number;
  height: number;
  data: Uint8ClampedArray<ArrayBuffer>; // RGBA
}

export const MARKER_RADIUS_PX = 4;

function blank(width: number, height: number): Frame {
  const data = new Uint8ClampedArray(width * height * 4);
  for (let k = 3; k < data.length; k += 4) data[k] = 255;
  return { width, height, data };
}

function putPixel(f: Frame, x: number, y: number, c: Rgb): void {
  if (x < 0 || y < 0 || x >= f.width || y >= f.height) return;
  const o = (y * f.width + x) * 4;
  f.data[o] = c.r;
  f.data[o + 1] = c.g;
  f.data[o + 2] = c.b;
  f.data[o + 3] = 255;
}

/**
 * Map cell (i, j) covers canvas column i-band and row band for j with the
 * region's y axis pointing up (row 0 of the frame is the top of the region).
 */
export function renderMap(map: CoverageMapJson, sizePx: number): Frame {
  const res = map.resolution;
  if (!(res >= 1)) throw new Error('map resolution must be >= 1');
  if (map.values.length !== res * res) throw new Error('malformed map payload');
  const f = blank(sizePx, sizePx);
  for (let py = 0; py < sizePx; py++) {
    const j = res - 1 - Math.min(Math.floor((py / sizePx) * res), res - 1);
    for (let px = 0; px < sizePx; px++) {
      const i = Math.min(Math.floor((px / sizePx) * res), res - 1);
      putPixel(f, px, py, colorize(map.values[i * res + j]));
    }
  }
  return f;
}

/** Diverging rendering with a shared ±max|diff| scale. */
export function renderDiff(map: DiffMapJson, sizePx: number): Frame {
  const res = map.resolution;
  if (map.values.length !== res * res) throw new Error('malformed diff payload');
  let scale = 0;
  for (const v of map.values) scale = Math.max(scale, Math.abs(v));
  if (scale <= 0) scale = 1;
  const f = blank(sizePx, sizePx);
  for (let py = 0; py < sizePx; py++) {
    const j = res - 1 - Math.min(Math.floor((py / sizePx) * res), res - 1);
    for (let px = 0; px < sizePx; px++) {
      const i = Math.min(Math.floor((px / sizePx) * res), res - 1);
      putPixel(f, px, py, divergingColor(map.values[i * res + j] / scale));
    }
  }
  return f;
}

/** Draw BS markers as filled dots (black with white rim). */
export function drawMarkers(
  f: Frame, markers: [number, number][], sideKm: number): void {
  for (const [xKm, yKm] of markers) {
    const cx = Math.round((xKm / sideKm) * f.width);
    const cy = Math.round((1 - yKm / sideKm) * f.height);
    for (let dy = -MARKER_RADIUS_PX; dy <= MARKER_RADIUS_PX; dy++) {
      for (let dx = -MARKER_RADIUS_PX; dx <= MARKER_RADIUS_PX; dx++) {
        const d2 = dx * dx + dy * dy;
        if (d2 > MARKER_RADIUS_PX * MARKER_RADIUS_PX) continue;
        const rim = d2 > (MARKER_RADIUS_PX - 1.5) * (MARKER_RADIUS_PX - 1.5);
        putPixel(f, cx + dx, cy + dy,
                 rim ? { r: 255, g: 255, b: 255 } : { r: 0, g: 0, b: 0 });
      }
    }
  }
}

/** Canvas pixel -> region coordinates (km); canvas row 0 is max-y. */
export function canvasToMap(
  px: number, py: number, sizePx: number, sideKm: number,
): { xKm: number; yKm: number } {
  return {
    xKm: (px / sizePx) * sideKm,
    yKm: (1 - py / sizePx) * sideKm,
  };
}

/** Index of the marker within hit range of a canvas point, or -1. */
export function hitTestMarker(
  px: number, py: number, markers: [number, number][],
  sizePx: number, sideKm: number,
): number {
  const slop = MARKER_RADIUS_PX + 2;
  for (let k = 0; k < markers.length; k++) {
    const mx = (markers[k][0] / sideKm) * sizePx;
    const my = (1 - markers[k][1] / sideKm) * sizePx;
    if ((mx - px) * (mx - px) + (my - py) * (my - py) <= slop * slop) return k;
  }
  return -1;
}
