import type { ElementInfo, ProjectInfo, ProxyInfo, ProxyKind, SessionRecord, SliderRow, TransformInfo } from "./types.js";

/** Engine error envelope, rethrown with its stable machine code. */
export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let code = "http-error";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(code, message, response.status);
}

/** Thin typed client; every engine mutation goes through here. */
export class EngineApi {
  constructor(readonly base: string) {}

  private url(path: string): string {
    return this.base + path;
  }

  async project(): Promise<ProjectInfo> {
    return unwrap(await fetch(this.url("/project")));
  }

  async createElement(name: string, kind: string, asset?: File): Promise<ElementInfo> {
    const form = new FormData();
    form.append("name", name);
    form.append("kind", kind);
    if (asset) {
      form.append("asset", asset, asset.name);
    }
    return unwrap(await fetch(this.url("/elements"), { method: "POST", body: form }));
  }

  async deleteElement(id: string): Promise<void> {
    await unwrap(await fetch(this.url(`/elements/${id}`), { method: "DELETE" }));
  }

  async patchTransform(id: string, transform: TransformInfo): Promise<ElementInfo> {
    return unwrap(
      await fetch(this.url(`/elements/${id}/transform`), {
        method: "PATCH",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(transform),
      }),
    );
  }

  async addProxy(kind: ProxyKind, geometry: [number, number][]): Promise<ProxyInfo> {
    return unwrap(
      await fetch(this.url("/proxies"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ kind, geometry }),
      }),
    );
  }

  async deleteProxy(label: string): Promise<void> {
    await unwrap(await fetch(this.url(`/proxies/${label}`), { method: "DELETE" }));
  }

  /** Fire-and-forget generation; completion arrives on the event stream. */
  async prompt(module: string, text: string): Promise<void> {
    await unwrap(
      await fetch(this.url(`/modules/${encodeURIComponent(module)}/prompt`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ text }),
      }),
    );
  }

  async session(module: string): Promise<SessionRecord[]> {
    const body = await unwrap<{ records: SessionRecord[] }>(
      await fetch(this.url(`/modules/${encodeURIComponent(module)}/session`)),
    );
    return body.records;
  }

  async sliders(elementId: string): Promise<SliderRow[]> {
    const body = await unwrap<{ sliders: SliderRow[] }>(await fetch(this.url(`/sliders/${elementId}`)));
    return body.sliders;
  }

  async patchSlider(elementId: string, name: string, value: number): Promise<SliderRow[]> {
    const body = await unwrap<{ sliders: SliderRow[] }>(
      await fetch(this.url("/sliders"), {
        method: "PATCH",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ element: elementId, name, value }),
      }),
    );
    return body.sliders;
  }

  previewUrl(revision: number): string {
    return this.url(`/preview/index.html?rev=${revision}`);
  }

  bundleUrl(): string {
    return this.url("/bundle");
  }

  eventsUrl(): string {
    return this.url("/events");
  }

  assetUrl(path: string): string {
    return this.url(`/preview/${path}`);
  }
}
