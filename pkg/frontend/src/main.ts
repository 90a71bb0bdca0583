import { EngineApi } from "./api.js";
import { StageController } from "./canvas.js";
import { ElementPane, PreviewPane, PromptPane, SliderPane } from "./panels.js";
import { routeEvent } from "./router.js";
import { connectEvents } from "./sse.js";
import { Store } from "./state.js";

function apiBase(): string {
  // ?api=http://host:port lets the page be served separately from the engine
  const override = new URLSearchParams(window.location.search).get("api");
  return (override ?? window.location.origin).replace(/\/$/, "");
}

function must(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id} in index.html`);
  }
  return node;
}

function start(): void {
  const api = new EngineApi(apiBase());
  const store = new Store();

  const stage = new StageController(must("stage") as HTMLCanvasElement, api, store, refresh);
  const elementPane = new ElementPane(must("pane-elements"), api, store, refresh);
  const promptPane = new PromptPane(must("pane-prompt"), api, store);
  const sliderPane = new SliderPane(must("pane-sliders"), api, store);
  const previewPane = new PreviewPane(must("pane-preview"), api, store);
  const statusBox = must("status");
  const errorBox = must("error-bar");
  errorBox.addEventListener("click", () => store.setError(null));

  async function refresh(): Promise<void> {
    try {
      store.setProject(await api.project());
    } catch (err) {
      store.setError(err instanceof Error ? err.message : String(err));
    }
  }

  store.subscribe((state) => {
    elementPane.render(state);
    promptPane.render(state);
    sliderPane.render(state);
    previewPane.render(state);
    stage.render();
    const project = state.project;
    statusBox.textContent = project
      ? `${project.name} · ${project.framework ?? "no framework yet"} · tick ${project.tick}`
      : "connecting…";
    errorBox.textContent = state.lastError ?? "";
    errorBox.style.display = state.lastError ? "" : "none";
  });

  connectEvents(api.eventsUrl(), (event) =>
    routeEvent(event, { store, refresh, invalidateTranscript: () => promptPane.invalidate() }),
  );
  void refresh();
}

start();
