/**
 * World-to-canvas transform. World coordinates have y growing upward;
 * canvas pixels have y growing downward, so the transform flips y.
 */

export interface Viewport {
  scale: number;
  /** Pixel x of world x = 0. */
  left: number;
  /** Pixel y of world y = 0. */
  bottom: number;
}

/** Fit world bounds into a width x height canvas, centered, aspect preserved. */
export function fitViewport(
  bounds: [number, number],
  width: number,
  height: number,
  margin = 4,
): Viewport {
  const [bw, bh] = bounds;
  const scale = Math.min((width - 2 * margin) / bw, (height - 2 * margin) / bh);
  const left = (width - bw * scale) / 2;
  const bottom = height - (height - bh * scale) / 2;
  return { scale, left, bottom };
}

export function toPixel(v: Viewport, p: [number, number]): [number, number] {
  return [v.left + p[0] * v.scale, v.bottom - p[1] * v.scale];
}

export function fromPixel(v: Viewport, p: [number, number]): [number, number] {
  return [(p[0] - v.left) / v.scale, (v.bottom - p[1]) / v.scale];
}
