import { describe, expect, it } from "vitest";
import type { MapGeometry } from "../src/types.js";
import { fitViewport, toPixel } from "../src/viewport.js";
import {
  GOAL_COLOR,
  WALL_COLOR,
  drawMap,
  drawTrail,
  renderCard,
} from "../src/render.js";
import { RecordingContext, grayLevel } from "./recording.js";

const GEOMETRY: MapGeometry = {
  version: 1,
  name: "training",
  bounds: [144, 96],
  start: [12, 12, 0],
  goal: [128, 80],
  waypoints: [[72, 48]],
  walls: [
    [0, 0, 144, 0],
    [144, 0, 144, 96],
    [144, 96, 0, 96],
    [0, 96, 0, 0],
    [48, 0, 48, 64],
  ],
};

const VIEWPORT = fitViewport(GEOMETRY.bounds, 252, 136);

const TRAIL: [number, number][] = [
  [12, 12],
  [30, 40],
  [60.5, 71.25],
  [96, 55],
  [127.125, 78.5],
];

function distance(a: { x: number; y: number }, b: [number, number]): number {
  return Math.hypot(a.x - b[0], a.y - b[1]);
}

describe("drawTrail", () => {
  it("pins the drawn endpoints to the transformed payload coordinates", () => {
    const ctx = new RecordingContext();
    drawTrail(ctx, TRAIL, VIEWPORT);
    const moves = ctx.moves();
    const lines = ctx.lines();
    const first = toPixel(VIEWPORT, TRAIL[0]!);
    const last = toPixel(VIEWPORT, TRAIL[TRAIL.length - 1]!);
    expect(distance(moves[0]!, first)).toBeLessThanOrEqual(1);
    expect(distance(lines[lines.length - 1]!, last)).toBeLessThanOrEqual(1);
  });

  it("visits every intermediate point of the polyline", () => {
    const ctx = new RecordingContext();
    drawTrail(ctx, TRAIL, VIEWPORT);
    const lines = ctx.lines();
    expect(lines).toHaveLength(TRAIL.length - 1);
    for (let i = 1; i < TRAIL.length; i += 1) {
      expect(distance(lines[i - 1]!, toPixel(VIEWPORT, TRAIL[i]!))).toBeLessThanOrEqual(1);
    }
  });

  it("shades strokes light to dark along the trail", () => {
    const ctx = new RecordingContext();
    drawTrail(ctx, TRAIL, VIEWPORT);
    const levels = ctx.strokes().map((s) => grayLevel(s.style));
    expect(levels[0]).toBe(208);
    expect(levels[levels.length - 1]).toBe(32);
    for (let i = 1; i < levels.length; i += 1) {
      expect(levels[i]!).toBeLessThanOrEqual(levels[i - 1]!);
    }
  });

  it("draws a single-point trail as a dark dot at the point", () => {
    const ctx = new RecordingContext();
    drawTrail(ctx, [[60.5, 71.25]], VIEWPORT);
    const arcs = ctx.ops.filter((op) => op.kind === "arc");
    expect(arcs).toHaveLength(1);
    const arc = arcs[0] as { x: number; y: number };
    const pixel = toPixel(VIEWPORT, [60.5, 71.25]);
    expect(distance(arc, pixel)).toBeLessThanOrEqual(1);
    expect(ctx.lines()).toHaveLength(0);
    expect(ctx.ops.some((op) => op.kind === "fill")).toBe(true);
  });

  it("paints nothing for an empty trail", () => {
    const ctx = new RecordingContext();
    drawTrail(ctx, [], VIEWPORT);
    expect(ctx.ops).toHaveLength(0);
  });
});

describe("drawMap", () => {
  it("strokes every wall segment at its pixel endpoints", () => {
    const ctx = new RecordingContext();
    drawMap(ctx, GEOMETRY, VIEWPORT);
    const moves = ctx.moves();
    expect(moves.length).toBeGreaterThanOrEqual(GEOMETRY.walls.length);
    for (let i = 0; i < GEOMETRY.walls.length; i += 1) {
      const [x1, y1] = GEOMETRY.walls[i]!;
      expect(distance(moves[i]!, toPixel(VIEWPORT, [x1, y1]))).toBeLessThanOrEqual(1);
    }
    expect(ctx.strokes()[0]!.style).toBe(WALL_COLOR);
  });

  it("rings the goal at its transformed position and scaled radius", () => {
    const ctx = new RecordingContext();
    drawMap(ctx, GEOMETRY, VIEWPORT);
    const arcs = ctx.ops.filter((op) => op.kind === "arc") as {
      x: number;
      y: number;
      radius: number;
    }[];
    const goal = toPixel(VIEWPORT, GEOMETRY.goal);
    expect(distance(arcs[0]!, goal)).toBeLessThanOrEqual(1);
    expect(arcs[0]!.radius).toBeCloseTo(5 * VIEWPORT.scale, 9);
    const ringStroke = ctx.strokes()[1];
    expect(ringStroke!.style).toBe(GOAL_COLOR);
  });
});

describe("renderCard", () => {
  it("paints the walls before the trail", () => {
    const ctx = new RecordingContext();
    renderCard(ctx, GEOMETRY, TRAIL, VIEWPORT);
    const styles = ctx.strokes().map((s) => s.style);
    const wallAt = styles.indexOf(WALL_COLOR);
    const trailAt = styles.findIndex((s) => s.startsWith("rgb("));
    expect(wallAt).toBeGreaterThanOrEqual(0);
    expect(trailAt).toBeGreaterThan(wallAt);
  });

  it("keeps trail endpoint fidelity through the full card render", () => {
    const ctx = new RecordingContext();
    renderCard(ctx, GEOMETRY, TRAIL, VIEWPORT);
    const lines = ctx.lines();
    const last = toPixel(VIEWPORT, TRAIL[TRAIL.length - 1]!);
    expect(distance(lines[lines.length - 1]!, last)).toBeLessThanOrEqual(1);
  });
});
