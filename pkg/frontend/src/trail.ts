import type { Viewport } from "./viewport.js";
import { toPixel } from "./viewport.js";

/**
 * Gray ramp for trail segments: light where the robot launched,
 * near black where it stopped.
 */
export function trailShade(index: number, count: number): string {
  const t = count <= 1 ? 1 : index / (count - 1);
  const v = Math.round(208 - 176 * t);
  return `rgb(${v},${v},${v})`;
}

export interface TrailSegment {
  from: [number, number];
  to: [number, number];
  shade: string;
}

/** Pixel-space polyline segments for one trail, shaded start to finish. */
export function trailSegments(
  trail: [number, number][],
  viewport: Viewport,
): TrailSegment[] {
  const segments: TrailSegment[] = [];
  const count = trail.length - 1;
  for (let i = 0; i < count; i += 1) {
    segments.push({
      from: toPixel(viewport, trail[i]!),
      to: toPixel(viewport, trail[i + 1]!),
      shade: trailShade(i, count),
    });
  }
  return segments;
}
