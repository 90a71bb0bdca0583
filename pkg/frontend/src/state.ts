import type { ElementInfo, ProjectInfo, ProxyInfo, SliderRow, Tool } from "./types.js";

export const CENTRAL = "central";

/**
 * Client-side session state. None of it is authoritative: everything
 * except the selection, tool, and draft prompt text can be rebuilt from
 * the engine's GET endpoints at any time.
 */
export interface UiState {
  project: ProjectInfo | null;
  selectedModule: string; // element id, or "central"
  activeTool: Tool;
  promptDraft: string;
  sliderCache: Map<string, SliderRow[]>;
  previewRevision: number;
  generating: boolean;
  lastError: string | null;
}

export type Listener = (state: UiState) => void;

export class Store {
  private current: UiState = {
    project: null,
    selectedModule: CENTRAL,
    activeTool: "select",
    promptDraft: "",
    sliderCache: new Map(),
    previewRevision: 1,
    generating: false,
    lastError: null,
  };
  private listeners: Listener[] = [];

  get state(): UiState {
    return this.current;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private commit(patch: Partial<UiState>): void {
    this.current = { ...this.current, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  setProject(project: ProjectInfo): void {
    // a vanished selection falls back to the central module
    const live = project.elements.some((e) => e.id === this.current.selectedModule);
    const selectedModule = this.current.selectedModule === CENTRAL || live ? this.current.selectedModule : CENTRAL;
    this.commit({ project, selectedModule });
  }

  selectModule(module: string): void {
    if (module !== this.current.selectedModule) {
      this.commit({ selectedModule: module, promptDraft: "" });
    }
  }

  selectedElement(): ElementInfo | null {
    const project = this.current.project;
    if (!project || this.current.selectedModule === CENTRAL) {
      return null;
    }
    return project.elements.find((e) => e.id === this.current.selectedModule) ?? null;
  }

  setTool(tool: Tool): void {
    this.commit({ activeTool: tool });
  }

  setDraft(text: string): void {
    this.commit({ promptDraft: text });
  }

  setGenerating(on: boolean): void {
    this.commit({ generating: on });
  }

  setError(message: string | null): void {
    this.commit({ lastError: message });
  }

  setSliders(elementId: string, rows: SliderRow[]): void {
    const sliderCache = new Map(this.current.sliderCache);
    sliderCache.set(elementId, rows);
    this.commit({ sliderCache });
  }

  dropSliders(elementId: string): void {
    const sliderCache = new Map(this.current.sliderCache);
    sliderCache.delete(elementId);
    this.commit({ sliderCache });
  }

  /** Generation can rewrite any module's numbers, so forget them all. */
  clearSliders(): void {
    this.commit({ sliderCache: new Map() });
  }

  /** Monotone; every bump invalidates the preview iframe. */
  bumpPreview(): number {
    const previewRevision = this.current.previewRevision + 1;
    this.commit({ previewRevision });
    return previewRevision;
  }

  elements(): ElementInfo[] {
    return this.current.project?.elements ?? [];
  }

  proxies(): ProxyInfo[] {
    return this.current.project?.proxies ?? [];
  }
}
