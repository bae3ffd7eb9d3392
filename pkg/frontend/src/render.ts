import type { MapGeometry } from "./types.js";
import type { Viewport } from "./viewport.js";
import { toPixel } from "./viewport.js";
import { trailSegments } from "./trail.js";

/** The slice of CanvasRenderingContext2D the painters touch. The painters
 * only ever assign string styles; the union keeps real contexts assignable. */
export interface Canvas2DLike {
  lineWidth: number;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  arc(
    x: number,
    y: number,
    radius: number,
    startAngle: number,
    endAngle: number,
  ): void;
  fill(): void;
}

export const WALL_COLOR = "#4a4a55";
export const GOAL_COLOR = "#2f9e44";
export const START_COLOR = "#1971c2";

/** Walls as segments plus goal ring and start dot. Painted before trails. */
export function drawMap(
  ctx: Canvas2DLike,
  geometry: MapGeometry,
  viewport: Viewport,
): void {
  ctx.lineWidth = 2;
  ctx.strokeStyle = WALL_COLOR;
  ctx.beginPath();
  for (const [x1, y1, x2, y2] of geometry.walls) {
    const a = toPixel(viewport, [x1, y1]);
    const b = toPixel(viewport, [x2, y2]);
    ctx.moveTo(a[0], a[1]);
    ctx.lineTo(b[0], b[1]);
  }
  ctx.stroke();

  const goal = toPixel(viewport, geometry.goal);
  ctx.lineWidth = 1.5;
  ctx.strokeStyle = GOAL_COLOR;
  ctx.beginPath();
  ctx.arc(goal[0], goal[1], 5 * viewport.scale, 0, 2 * Math.PI);
  ctx.stroke();

  const start = toPixel(viewport, [geometry.start[0], geometry.start[1]]);
  ctx.fillStyle = START_COLOR;
  ctx.beginPath();
  ctx.arc(start[0], start[1], 2.5, 0, 2 * Math.PI);
  ctx.fill();
}

/**
 * One trail as a shaded polyline, light at launch and dark at the stop.
 * A single-point trail becomes a dark dot at that point.
 */
export function drawTrail(
  ctx: Canvas2DLike,
  trail: [number, number][],
  viewport: Viewport,
): void {
  if (trail.length === 0) {
    return;
  }
  if (trail.length === 1) {
    const only = toPixel(viewport, trail[0]!);
    ctx.fillStyle = "rgb(32,32,32)";
    ctx.beginPath();
    ctx.arc(only[0], only[1], 2, 0, 2 * Math.PI);
    ctx.fill();
    return;
  }
  ctx.lineWidth = 1.5;
  for (const segment of trailSegments(trail, viewport)) {
    ctx.strokeStyle = segment.shade;
    ctx.beginPath();
    ctx.moveTo(segment.from[0], segment.from[1]);
    ctx.lineTo(segment.to[0], segment.to[1]);
    ctx.stroke();
  }
}

/** Full card image: map behind, then the candidate trail. */
export function renderCard(
  ctx: Canvas2DLike,
  geometry: MapGeometry,
  trail: [number, number][],
  viewport: Viewport,
): void {
  drawMap(ctx, geometry, viewport);
  drawTrail(ctx, trail, viewport);
}
