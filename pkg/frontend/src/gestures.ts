import { angleDeg, closeRegion, downsampleStroke, normalizeDeg, toPairs } from "./geometry.js";
import type { Point, ProxyKind, Tool, TransformInfo } from "./types.js";

// Engine mutations and render hints produced by pointer gestures. The
// stage executes them; nothing here touches the network, so the whole
// interaction grammar is testable as data in, data out.
export type Effect =
  | { kind: "select"; elementId: string }
  | { kind: "preview-transform"; elementId: string; transform: TransformInfo }
  | { kind: "patch-transform"; elementId: string; transform: TransformInfo }
  | { kind: "add-proxy"; proxyKind: ProxyKind; points: [number, number][] }
  | { kind: "stroke-progress"; points: Point[] };

export type Handle = "rotate" | "scale";

/** What the stage knows about the scene under a pointer position. */
export interface StageQuery {
  hitElement(point: Point): { id: string; transform: TransformInfo } | null;
  hitHandle(point: Point): { elementId: string; handle: Handle; transform: TransformInfo } | null;
}

type Gesture =
  | { type: "move"; elementId: string; start: Point; from: TransformInfo }
  | { type: "rotate"; elementId: string; center: Point; startAngle: number; from: TransformInfo }
  | { type: "scale"; elementId: string; center: Point; startDist: number; from: TransformInfo }
  | { type: "stroke"; tool: ProxyKind; points: Point[] };

const MIN_SCALE = 0.05;

function transformsEqual(a: TransformInfo, b: TransformInfo): boolean {
  return a.x === b.x && a.y === b.y && a.rotation === b.rotation && a.scale === b.scale;
}

export class GestureMachine {
  private gesture: Gesture | null = null;

  constructor(private query: StageQuery) {}

  get active(): boolean {
    return this.gesture !== null;
  }

  pointerDown(tool: Tool, point: Point): Effect[] {
    if (tool === "select") {
      const handleHit = this.query.hitHandle(point);
      if (handleHit) {
        const center = { x: handleHit.transform.x, y: handleHit.transform.y };
        this.gesture =
          handleHit.handle === "rotate"
            ? { type: "rotate", elementId: handleHit.elementId, center, startAngle: angleDeg(center, point), from: handleHit.transform }
            : {
                type: "scale",
                elementId: handleHit.elementId,
                center,
                startDist: Math.max(Math.hypot(point.x - center.x, point.y - center.y), 1),
                from: handleHit.transform,
              };
        return [];
      }
      const hit = this.query.hitElement(point);
      if (hit) {
        this.gesture = { type: "move", elementId: hit.id, start: point, from: hit.transform };
        return [{ kind: "select", elementId: hit.id }];
      }
      return [];
    }
    this.gesture = { type: "stroke", tool, points: [point] };
    return [];
  }

  pointerMove(point: Point): Effect[] {
    const gesture = this.gesture;
    if (!gesture) {
      return [];
    }
    if (gesture.type === "stroke") {
      gesture.points.push(point);
      return [{ kind: "stroke-progress", points: gesture.points }];
    }
    return [
      {
        kind: "preview-transform",
        elementId: gesture.elementId,
        transform: this.currentTransform(gesture, point),
      },
    ];
  }

  pointerUp(point: Point): Effect[] {
    const gesture = this.gesture;
    this.gesture = null;
    if (!gesture) {
      return [];
    }
    if (gesture.type === "stroke") {
      return this.finishStroke(gesture, point);
    }
    const finalTransform = this.currentTransform(gesture, point);
    if (transformsEqual(finalTransform, gesture.from)) {
      return []; // a no-op drag writes nothing
    }
    return [{ kind: "patch-transform", elementId: gesture.elementId, transform: finalTransform }];
  }

  cancel(): void {
    this.gesture = null;
  }

  private currentTransform(gesture: Exclude<Gesture, { type: "stroke" }>, point: Point): TransformInfo {
    const from = gesture.from;
    if (gesture.type === "move") {
      return { ...from, x: from.x + (point.x - gesture.start.x), y: from.y + (point.y - gesture.start.y) };
    }
    if (gesture.type === "rotate") {
      const delta = angleDeg(gesture.center, point) - gesture.startAngle;
      return { ...from, rotation: normalizeDeg(from.rotation + delta) };
    }
    const distNow = Math.max(Math.hypot(point.x - gesture.center.x, point.y - gesture.center.y), 1);
    const scaled = (from.scale * distNow) / gesture.startDist;
    return { ...from, scale: Math.max(Math.round(scaled * 100) / 100, MIN_SCALE) };
  }

  private finishStroke(gesture: Extract<Gesture, { type: "stroke" }>, point: Point): Effect[] {
    const raw = [...gesture.points, point];
    if (gesture.tool === "point") {
      return [{ kind: "add-proxy", proxyKind: "point", points: [[point.x, point.y]] }];
    }
    if (gesture.tool === "line") {
      const start = raw[0];
      if (start.x === point.x && start.y === point.y) {
        return []; // a click is not a line
      }
      return [
        {
          kind: "add-proxy",
          proxyKind: "line",
          points: [
            [start.x, start.y],
            [point.x, point.y],
          ],
        },
      ];
    }
    const sampled = downsampleStroke(raw);
    if (gesture.tool === "curve") {
      if (sampled.length < 3) {
        return [];
      }
      return [{ kind: "add-proxy", proxyKind: "curve", points: toPairs(sampled) }];
    }
    const closed = closeRegion(sampled);
    if (closed.length < 4) {
      return []; // region needs three distinct corners plus closure
    }
    return [{ kind: "add-proxy", proxyKind: "region", points: toPairs(closed) }];
  }
}
