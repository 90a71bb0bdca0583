import type { EngineApi } from "./api.js";
import { elementBox, hitBox, type Box } from "./geometry.js";
import { GestureMachine, type Effect, type Handle, type StageQuery } from "./gestures.js";
import type { Store } from "./state.js";
import type { ElementInfo, Point, ProxyInfo, TransformInfo } from "./types.js";

const BASE_SIZE = 80; // fallback footprint for elements without a loaded asset
const HANDLE_RADIUS = 9;
const ROTATE_OFFSET = 26;

const KIND_COLORS: Record<string, string> = {
  "uploaded-image": "#4d7cc3",
  "drawn-sketch": "#3f9960",
  "llm-generated": "#a3599c",
  group: "#8a7340",
};

interface HandleSpot {
  handle: Handle;
  x: number;
  y: number;
}

/**
 * Owns the scene canvas: draws elements and proxy markers, feeds pointer
 * input through the gesture machine, and turns the resulting effects into
 * engine calls. All geometry decisions live in the machine; this class is
 * the thin DOM and drawing shell around it.
 */
export class StageController {
  private machine: GestureMachine;
  private previews = new Map<string, TransformInfo>();
  private stroke: Point[] | null = null;
  private images = new Map<string, HTMLImageElement>();

  constructor(
    private canvas: HTMLCanvasElement,
    private api: EngineApi,
    private store: Store,
    private refresh: () => Promise<void>,
  ) {
    const query: StageQuery = {
      hitElement: (point) => this.hitElement(point),
      hitHandle: (point) => this.hitHandle(point),
    };
    this.machine = new GestureMachine(query);
    canvas.addEventListener("pointerdown", (event) => {
      canvas.setPointerCapture(event.pointerId);
      this.apply(this.machine.pointerDown(this.store.state.activeTool, this.toScene(event)));
    });
    canvas.addEventListener("pointermove", (event) => {
      if (this.machine.active) {
        this.apply(this.machine.pointerMove(this.toScene(event)));
      }
    });
    canvas.addEventListener("pointerup", (event) => {
      this.stroke = null;
      this.apply(this.machine.pointerUp(this.toScene(event)));
    });
    canvas.addEventListener("pointercancel", () => {
      this.machine.cancel();
      this.previews.clear();
      this.stroke = null;
      this.render();
    });
  }

  render(): void {
    const project = this.store.state.project;
    const ctx = this.canvas.getContext("2d");
    if (!ctx || !project) {
      return;
    }
    const [width, height] = project.canvas;
    if (this.canvas.width !== width || this.canvas.height !== height) {
      this.canvas.width = width;
      this.canvas.height = height;
    }
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#10131a";
    ctx.fillRect(0, 0, width, height);

    for (const element of this.store.elements()) {
      this.drawElement(ctx, element);
    }
    for (const proxy of this.store.proxies()) {
      this.drawProxy(ctx, proxy);
    }
    if (this.stroke && this.stroke.length > 1) {
      ctx.strokeStyle = "#e8c355";
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      ctx.moveTo(this.stroke[0].x, this.stroke[0].y);
      for (const p of this.stroke.slice(1)) {
        ctx.lineTo(p.x, p.y);
      }
      ctx.stroke();
    }
  }

  private transformOf(element: ElementInfo): TransformInfo {
    return this.previews.get(element.id) ?? element.transform;
  }

  private boxOf(element: ElementInfo): Box {
    const t = this.transformOf(element);
    const image = element.asset ? this.images.get(element.id) : undefined;
    const w = image?.naturalWidth || BASE_SIZE;
    const h = image?.naturalHeight || BASE_SIZE;
    return elementBox(t.x, t.y, w, h, t.rotation, t.scale);
  }

  private drawElement(ctx: CanvasRenderingContext2D, element: ElementInfo): void {
    const t = this.transformOf(element);
    const box = this.boxOf(element);
    const selected = this.store.state.selectedModule === element.id;
    ctx.save();
    ctx.translate(t.x, t.y);
    ctx.rotate((t.rotation * Math.PI) / 180);

    const image = element.asset ? this.loadImage(element) : null;
    if (image && image.complete && image.naturalWidth > 0) {
      ctx.drawImage(image, -box.width / 2, -box.height / 2, box.width, box.height);
    } else {
      ctx.fillStyle = KIND_COLORS[element.kind] ?? "#666";
      ctx.globalAlpha = 0.75;
      ctx.fillRect(-box.width / 2, -box.height / 2, box.width, box.height);
      ctx.globalAlpha = 1;
    }
    ctx.strokeStyle = selected ? "#ffd75e" : "rgba(255,255,255,0.35)";
    ctx.lineWidth = selected ? 2 : 1;
    ctx.strokeRect(-box.width / 2, -box.height / 2, box.width, box.height);
    ctx.fillStyle = "#f2f2f2";
    ctx.font = "12px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(element.name, 0, -box.height / 2 - 6);
    ctx.restore();

    if (selected) {
      for (const spot of this.handleSpots(element)) {
        ctx.beginPath();
        ctx.arc(spot.x, spot.y, HANDLE_RADIUS - 3, 0, Math.PI * 2);
        ctx.fillStyle = spot.handle === "rotate" ? "#7fd1ff" : "#ffd75e";
        ctx.fill();
      }
    }
  }

  private drawProxy(ctx: CanvasRenderingContext2D, proxy: ProxyInfo): void {
    const pts = proxy.geometry;
    if (!pts.length) {
      return;
    }
    ctx.strokeStyle = "#e8c355";
    ctx.fillStyle = "#e8c355";
    ctx.lineWidth = 1.5;
    if (proxy.kind === "point") {
      const [x, y] = pts[0];
      ctx.beginPath();
      ctx.moveTo(x - 6, y);
      ctx.lineTo(x + 6, y);
      ctx.moveTo(x, y - 6);
      ctx.lineTo(x, y + 6);
      ctx.stroke();
    } else {
      ctx.beginPath();
      ctx.moveTo(pts[0][0], pts[0][1]);
      for (const [x, y] of pts.slice(1)) {
        ctx.lineTo(x, y);
      }
      if (proxy.kind === "region") {
        ctx.closePath();
      }
      ctx.stroke();
    }
    ctx.font = "11px sans-serif";
    ctx.textAlign = "left";
    ctx.fillText(proxy.label, pts[0][0] + 8, pts[0][1] - 8);
  }

  private handleSpots(element: ElementInfo): HandleSpot[] {
    const t = this.transformOf(element);
    const box = this.boxOf(element);
    const rad = (t.rotation * Math.PI) / 180;
    const rot = (dx: number, dy: number) => ({
      x: t.x + dx * Math.cos(rad) - dy * Math.sin(rad),
      y: t.y + dx * Math.sin(rad) + dy * Math.cos(rad),
    });
    const top = rot(0, -box.height / 2 - ROTATE_OFFSET);
    const corner = rot(box.width / 2, box.height / 2);
    return [
      { handle: "rotate", x: top.x, y: top.y },
      { handle: "scale", x: corner.x, y: corner.y },
    ];
  }

  private hitElement(point: Point): { id: string; transform: TransformInfo } | null {
    const elements = this.store.elements();
    for (let i = elements.length - 1; i >= 0; i--) {
      const element = elements[i];
      if (hitBox(point, this.boxOf(element))) {
        return { id: element.id, transform: { ...this.transformOf(element) } };
      }
    }
    return null;
  }

  private hitHandle(point: Point): { elementId: string; handle: Handle; transform: TransformInfo } | null {
    const selected = this.store.selectedElement();
    if (!selected) {
      return null;
    }
    for (const spot of this.handleSpots(selected)) {
      if (Math.hypot(point.x - spot.x, point.y - spot.y) <= HANDLE_RADIUS) {
        return { elementId: selected.id, handle: spot.handle, transform: { ...this.transformOf(selected) } };
      }
    }
    return null;
  }

  private loadImage(element: ElementInfo): HTMLImageElement | null {
    if (!element.asset) {
      return null;
    }
    let image = this.images.get(element.id);
    if (!image) {
      image = new Image();
      image.onload = () => this.render();
      image.src = this.api.assetUrl(element.asset.path);
      this.images.set(element.id, image);
    }
    return image;
  }

  private toScene(event: PointerEvent): Point {
    const rect = this.canvas.getBoundingClientRect();
    const sx = this.canvas.width / rect.width;
    const sy = this.canvas.height / rect.height;
    return { x: (event.clientX - rect.left) * sx, y: (event.clientY - rect.top) * sy };
  }

  private apply(effects: Effect[]): void {
    for (const effect of effects) {
      switch (effect.kind) {
        case "select":
          this.store.selectModule(effect.elementId);
          break;
        case "preview-transform":
          this.previews.set(effect.elementId, effect.transform);
          break;
        case "stroke-progress":
          this.stroke = effect.points.slice();
          break;
        case "patch-transform":
          this.previews.delete(effect.elementId);
          void this.api
            .patchTransform(effect.elementId, effect.transform)
            .then(() => this.refresh())
            .catch((err: Error) => this.store.setError(err.message));
          break;
        case "add-proxy":
          this.stroke = null;
          void this.api
            .addProxy(effect.proxyKind, effect.points)
            .then(() => this.refresh())
            .catch((err: Error) => this.store.setError(err.message));
          break;
      }
    }
    this.render();
  }
}
