import type { Point } from "./types.js";

export const MAX_STROKE_POINTS = 64;

function dist(a: Point, b: Point): number {
  return Math.hypot(b.x - a.x, b.y - a.y);
}

/**
 * Resample a freehand stroke to at most `max` points, spaced uniformly
 * along the stroke's arc length. Short strokes pass through untouched;
 * endpoints are always preserved.
 */
export function downsampleStroke(points: Point[], max = MAX_STROKE_POINTS): Point[] {
  if (points.length <= max) {
    return points.slice();
  }
  const cumulative = [0];
  for (let i = 1; i < points.length; i++) {
    cumulative.push(cumulative[i - 1] + dist(points[i - 1], points[i]));
  }
  const total = cumulative[points.length - 1];
  if (total === 0) {
    return [points[0], points[points.length - 1]];
  }
  const out: Point[] = [];
  let segment = 0;
  for (let k = 0; k < max; k++) {
    const target = (total * k) / (max - 1);
    while (segment < points.length - 2 && cumulative[segment + 1] < target) {
      segment++;
    }
    const span = cumulative[segment + 1] - cumulative[segment];
    const t = span === 0 ? 0 : (target - cumulative[segment]) / span;
    out.push({
      x: points[segment].x + (points[segment + 1].x - points[segment].x) * t,
      y: points[segment].y + (points[segment + 1].y - points[segment].y) * t,
    });
  }
  return out;
}

/** Regions are polygons: an open stroke gains a copy of its first point. */
export function closeRegion(points: Point[]): Point[] {
  if (points.length < 3) {
    return points.slice();
  }
  const first = points[0];
  const last = points[points.length - 1];
  if (first.x === last.x && first.y === last.y) {
    return points.slice();
  }
  return [...points, { x: first.x, y: first.y }];
}

export function toPairs(points: Point[]): [number, number][] {
  return points.map((p) => [p.x, p.y]);
}

/** Element footprint on the stage; images get their natural box, the rest a badge. */
export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
  rotation: number;
}

export function elementBox(x: number, y: number, width: number, height: number, rotation: number, scale: number): Box {
  return { x, y, width: width * scale, height: height * scale, rotation };
}

/** Point-in-box test in the box's rotated local frame. */
export function hitBox(point: Point, box: Box): boolean {
  const rad = (-box.rotation * Math.PI) / 180;
  const dx = point.x - box.x;
  const dy = point.y - box.y;
  const localX = dx * Math.cos(rad) - dy * Math.sin(rad);
  const localY = dx * Math.sin(rad) + dy * Math.cos(rad);
  return Math.abs(localX) <= box.width / 2 && Math.abs(localY) <= box.height / 2;
}

export function angleDeg(center: Point, point: Point): number {
  return (Math.atan2(point.y - center.y, point.x - center.x) * 180) / Math.PI;
}

export function normalizeDeg(value: number): number {
  return ((value % 360) + 360) % 360;
}
