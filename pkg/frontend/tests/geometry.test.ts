import { describe, expect, it } from "vitest";
import {
  closeRegion,
  downsampleStroke,
  elementBox,
  hitBox,
  MAX_STROKE_POINTS,
  normalizeDeg,
} from "../src/geometry.js";
import type { Point } from "../src/types.js";

function wiggle(n: number): Point[] {
  const points: Point[] = [];
  for (let i = 0; i < n; i++) {
    points.push({ x: i * 3, y: Math.sin(i / 5) * 40 });
  }
  return points;
}

describe("downsampleStroke", () => {
  it("passes short strokes through untouched", () => {
    const stroke = wiggle(30);
    expect(downsampleStroke(stroke)).toEqual(stroke);
  });

  it("caps a long stroke at the point budget", () => {
    const out = downsampleStroke(wiggle(200));
    expect(out.length).toBe(MAX_STROKE_POINTS);
  });

  it("preserves both endpoints exactly", () => {
    const stroke = wiggle(500);
    const out = downsampleStroke(stroke);
    expect(out[0]).toEqual(stroke[0]);
    expect(out[out.length - 1].x).toBeCloseTo(stroke[stroke.length - 1].x, 6);
    expect(out[out.length - 1].y).toBeCloseTo(stroke[stroke.length - 1].y, 6);
  });

  it("spaces samples uniformly along arc length", () => {
    const line: Point[] = [];
    for (let i = 0; i < 300; i++) {
      line.push({ x: i, y: 0 });
    }
    const out = downsampleStroke(line, 10);
    const gaps = [];
    for (let i = 1; i < out.length; i++) {
      gaps.push(out[i].x - out[i - 1].x);
    }
    for (const gap of gaps) {
      expect(gap).toBeCloseTo(299 / 9, 6);
    }
  });

  it("collapses a zero-length stroke to its endpoints", () => {
    const still = Array.from({ length: 90 }, () => ({ x: 5, y: 5 }));
    expect(downsampleStroke(still, 64)).toEqual([
      { x: 5, y: 5 },
      { x: 5, y: 5 },
    ]);
  });

  it("respects a custom budget", () => {
    expect(downsampleStroke(wiggle(100), 7).length).toBe(7);
  });
});

describe("closeRegion", () => {
  it("appends the first point to an open polygon", () => {
    const open = [
      { x: 0, y: 0 },
      { x: 10, y: 0 },
      { x: 5, y: 8 },
    ];
    const closed = closeRegion(open);
    expect(closed.length).toBe(4);
    expect(closed[3]).toEqual({ x: 0, y: 0 });
  });

  it("leaves an already-closed polygon alone", () => {
    const ring = [
      { x: 0, y: 0 },
      { x: 10, y: 0 },
      { x: 5, y: 8 },
      { x: 0, y: 0 },
    ];
    expect(closeRegion(ring)).toEqual(ring);
  });

  it("does not fabricate corners for degenerate input", () => {
    const pair = [
      { x: 0, y: 0 },
      { x: 1, y: 1 },
    ];
    expect(closeRegion(pair)).toEqual(pair);
  });
});

describe("hitBox", () => {
  it("accepts points inside an axis-aligned box", () => {
    const box = elementBox(100, 100, 80, 40, 0, 1);
    expect(hitBox({ x: 100, y: 100 }, box)).toBe(true);
    expect(hitBox({ x: 139, y: 119 }, box)).toBe(true);
    expect(hitBox({ x: 141, y: 100 }, box)).toBe(false);
  });

  it("tests in the rotated local frame", () => {
    // a tall thin box rotated 90 degrees becomes wide and short
    const box = elementBox(0, 0, 10, 100, 90, 1);
    expect(hitBox({ x: 40, y: 0 }, box)).toBe(true);
    expect(hitBox({ x: 0, y: 40 }, box)).toBe(false);
  });

  it("applies scale to the footprint", () => {
    const box = elementBox(0, 0, 10, 10, 0, 3);
    expect(hitBox({ x: 14, y: 14 }, box)).toBe(true);
    expect(hitBox({ x: 16, y: 0 }, box)).toBe(false);
  });
});

describe("normalizeDeg", () => {
  it("wraps into [0, 360)", () => {
    expect(normalizeDeg(-90)).toBe(270);
    expect(normalizeDeg(450)).toBe(90);
    expect(normalizeDeg(360)).toBe(0);
  });
});
