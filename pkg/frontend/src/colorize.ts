/**
 * Coverage colors. Must stay pixel-identical to the server's renderer:
 * linear blue→red ramp with round-half-away-from-zero quantization.
 */

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

function roundHalfAway(x: number): number {
  return Math.floor(x + 0.5); // x >= 0 here
}

/** Coverage probability (0..1) to heat-map color: 0 = blue, 1 = red. */
export function colorize(v: number): Rgb {
  if (!(v >= 0 && v <= 1)) {
    throw new Error(`coverage value out of range: ${v}`);
  }
  return { r: roundHalfAway(255 * v), g: 0, b: roundHalfAway(255 * (1 - v)) };
}

/** Diverging blue→white→red ramp for difference maps, t in [-1, 1]. */
export function divergingColor(t: number): Rgb {
  const c = Math.max(-1, Math.min(1, t));
  return {
    r: roundHalfAway(255 * (1 - Math.max(0, -c))),
    g: roundHalfAway(255 * (1 - Math.abs(c))),
    b: roundHalfAway(255 * (1 - Math.max(0, c))),
  };
}
