import { describe, expect, it } from "vitest";
import { GestureMachine, type Effect, type StageQuery } from "../src/gestures.js";
import type { Point, TransformInfo } from "../src/types.js";

const HOME: TransformInfo = { x: 100, y: 100, rotation: 0, scale: 1 };

// 80x80 footprint around (100,100); handles only when asked for
function query(options: { handle?: "rotate" | "scale" } = {}): StageQuery {
  return {
    hitElement: (p: Point) =>
      Math.abs(p.x - 100) <= 40 && Math.abs(p.y - 100) <= 40 ? { id: "e1", transform: { ...HOME } } : null,
    hitHandle: () =>
      options.handle ? { elementId: "e1", handle: options.handle, transform: { ...HOME } } : null,
  };
}

function collect(machine: GestureMachine, moves: Point[], up: Point): Effect[][] {
  const perPhase: Effect[][] = [];
  for (const p of moves) {
    perPhase.push(machine.pointerMove(p));
  }
  perPhase.push(machine.pointerUp(up));
  return perPhase;
}

function flat(phases: Effect[][]): Effect[] {
  return phases.flat();
}

describe("element dragging", () => {
  it("selects on press and patches exactly once, at gesture end", () => {
    const machine = new GestureMachine(query());
    const down = machine.pointerDown("select", { x: 100, y: 100 });
    expect(down).toEqual([{ kind: "select", elementId: "e1" }]);

    const moves: Point[] = [];
    for (let i = 1; i <= 20; i++) {
      moves.push({ x: 100 + i, y: 100 + i });
    }
    const phases = collect(machine, moves, { x: 150, y: 130 });
    const all = flat(phases);
    const patches = all.filter((e) => e.kind === "patch-transform");
    expect(patches).toEqual([
      { kind: "patch-transform", elementId: "e1", transform: { x: 150, y: 130, rotation: 0, scale: 1 } },
    ]);
    // the patch is the gesture's last act, never an intermediate one
    expect(phases[phases.length - 1]).toEqual(patches);
    for (const phase of phases.slice(0, -1)) {
      expect(phase.every((e) => e.kind === "preview-transform")).toBe(true);
    }
  });

  it("a drag that returns home writes nothing", () => {
    const machine = new GestureMachine(query());
    machine.pointerDown("select", { x: 100, y: 100 });
    machine.pointerMove({ x: 140, y: 90 });
    const up = machine.pointerUp({ x: 100, y: 100 });
    expect(up).toEqual([]);
  });

  it("pressing empty canvas starts no gesture", () => {
    const machine = new GestureMachine(query());
    expect(machine.pointerDown("select", { x: 500, y: 500 })).toEqual([]);
    expect(machine.active).toBe(false);
    expect(machine.pointerUp({ x: 500, y: 500 })).toEqual([]);
  });

  it("cancel abandons the gesture without a patch", () => {
    const machine = new GestureMachine(query());
    machine.pointerDown("select", { x: 100, y: 100 });
    machine.pointerMove({ x: 160, y: 160 });
    machine.cancel();
    expect(machine.pointerUp({ x: 160, y: 160 })).toEqual([]);
  });
});

describe("handles", () => {
  it("rotate handle turns the element by the swept angle", () => {
    const machine = new GestureMachine(query({ handle: "rotate" }));
    machine.pointerDown("select", { x: 160, y: 100 }); // due east of center
    const up = machine.pointerUp({ x: 100, y: 160 }); // due south: +90 degrees
    expect(up.length).toBe(1);
    const patch = up[0];
    if (patch.kind !== "patch-transform") {
      throw new Error("expected a transform patch");
    }
    expect(patch.transform.rotation).toBeCloseTo(90, 5);
    expect(patch.transform.x).toBe(100);
    expect(patch.transform.scale).toBe(1);
  });

  it("scale handle grows with pointer distance", () => {
    const machine = new GestureMachine(query({ handle: "scale" }));
    machine.pointerDown("select", { x: 150, y: 100 }); // 50 from center
    const up = machine.pointerUp({ x: 200, y: 100 }); // 100 from center
    const patch = up[0];
    if (patch.kind !== "patch-transform") {
      throw new Error("expected a transform patch");
    }
    expect(patch.transform.scale).toBeCloseTo(2, 5);
    expect(patch.transform.rotation).toBe(0);
  });

  it("scale never collapses to zero", () => {
    const machine = new GestureMachine(query({ handle: "scale" }));
    machine.pointerDown("select", { x: 150, y: 100 });
    const up = machine.pointerUp({ x: 100, y: 100 }); // dragged onto the center
    const patch = up[0];
    if (patch.kind !== "patch-transform") {
      throw new Error("expected a transform patch");
    }
    expect(patch.transform.scale).toBeGreaterThanOrEqual(0.05);
  });
});

describe("proxy drawing", () => {
  it("point tool posts a single coordinate on click", () => {
    const machine = new GestureMachine(query());
    machine.pointerDown("point", { x: 30, y: 40 });
    const up = machine.pointerUp({ x: 30, y: 40 });
    expect(up).toEqual([{ kind: "add-proxy", proxyKind: "point", points: [[30, 40]] }]);
  });

  it("line tool posts its two endpoints", () => {
    const machine = new GestureMachine(query());
    machine.pointerDown("line", { x: 0, y: 0 });
    machine.pointerMove({ x: 50, y: 10 });
    const up = machine.pointerUp({ x: 120, y: 80 });
    expect(up).toEqual([
      {
        kind: "add-proxy",
        proxyKind: "line",
        points: [
          [0, 0],
          [120, 80],
        ],
      },
    ]);
  });

  it("a stationary click is not a line", () => {
    const machine = new GestureMachine(query());
    machine.pointerDown("line", { x: 5, y: 5 });
    expect(machine.pointerUp({ x: 5, y: 5 })).toEqual([]);
  });

  it("a long freehand curve is downsampled to at most 64 points", () => {
    const machine = new GestureMachine(query());
    machine.pointerDown("curve", { x: 0, y: 0 });
    const all: Effect[] = [];
    for (let i = 1; i <= 300; i++) {
      all.push(...machine.pointerMove({ x: i, y: Math.sin(i / 10) * 30 }));
    }
    expect(all.some((e) => e.kind === "add-proxy")).toBe(false); // nothing posted mid-stroke
    const up = machine.pointerUp({ x: 301, y: 0 });
    expect(up.length).toBe(1);
    const proxy = up[0];
    if (proxy.kind !== "add-proxy") {
      throw new Error("expected a proxy");
    }
    expect(proxy.proxyKind).toBe("curve");
    expect(proxy.points.length).toBeLessThanOrEqual(64);
    expect(proxy.points[0]).toEqual([0, 0]);
    expect(proxy.points[proxy.points.length - 1][0]).toBeCloseTo(301, 5);
  });

  it("a tap with the curve tool posts nothing", () => {
    const machine = new GestureMachine(query());
    machine.pointerDown("curve", { x: 9, y: 9 });
    expect(machine.pointerUp({ x: 9, y: 9 })).toEqual([]);
  });

  it("region strokes close themselves", () => {
    const machine = new GestureMachine(query());
    machine.pointerDown("region", { x: 0, y: 0 });
    machine.pointerMove({ x: 100, y: 0 });
    machine.pointerMove({ x: 100, y: 100 });
    const up = machine.pointerUp({ x: 0, y: 100 });
    const proxy = up[0];
    if (proxy.kind !== "add-proxy") {
      throw new Error("expected a proxy");
    }
    expect(proxy.proxyKind).toBe("region");
    expect(proxy.points[0]).toEqual(proxy.points[proxy.points.length - 1]);
    expect(proxy.points.length).toBeGreaterThanOrEqual(4);
  });
});
