import { ApiError, type EngineApi } from "./api.js";
import { debounce, SLIDER_DEBOUNCE_MS, type Debounced } from "./debounce.js";
import { CENTRAL, type Store, type UiState } from "./state.js";
import type { ElementKind, SessionRecord, SliderRow, Tool } from "./types.js";

const KINDS: ElementKind[] = ["uploaded-image", "drawn-sketch", "llm-generated", "group"];
const TOOLS: Tool[] = ["select", "point", "line", "curve", "region"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.code}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}

/** Module list, add-element form, tool palette, and proxy roster. */
export class ElementPane {
  private modulesBox: HTMLElement;
  private proxiesBox: HTMLElement;
  private toolsBox: HTMLElement;
  private nameInput: HTMLInputElement;
  private kindSelect: HTMLSelectElement;
  private fileInput: HTMLInputElement;
  private addButton: HTMLButtonElement;

  constructor(
    root: HTMLElement,
    private api: EngineApi,
    private store: Store,
    private refresh: () => Promise<void>,
  ) {
    root.append(el("h2", "pane-title", "Scene"));
    this.modulesBox = el("div", "module-list");
    root.append(this.modulesBox);

    const form = el("div", "add-form");
    this.nameInput = el("input");
    this.nameInput.placeholder = "Element name";
    this.kindSelect = el("select");
    for (const kind of KINDS) {
      const option = el("option", undefined, kind);
      option.value = kind;
      this.kindSelect.append(option);
    }
    this.fileInput = el("input");
    this.fileInput.type = "file";
    this.fileInput.accept = "image/*";
    this.addButton = el("button", undefined, "Add element");
    this.addButton.addEventListener("click", () => void this.addElement());
    this.kindSelect.addEventListener("change", () => this.syncFileVisibility());
    form.append(this.nameInput, this.kindSelect, this.fileInput, this.addButton);
    root.append(form);

    root.append(el("h2", "pane-title", "Tools"));
    this.toolsBox = el("div", "tool-list");
    root.append(this.toolsBox);

    root.append(el("h2", "pane-title", "Proxies"));
    this.proxiesBox = el("div", "proxy-list");
    root.append(this.proxiesBox);

    const download = el("a", "bundle-link", "Download bundle");
    download.href = this.api.bundleUrl();
    root.append(download);
    this.syncFileVisibility();
  }

  private syncFileVisibility(): void {
    const kind = this.kindSelect.value as ElementKind;
    this.fileInput.style.display = kind === "llm-generated" ? "none" : "";
  }

  private async addElement(): Promise<void> {
    const name = this.nameInput.value.trim();
    if (!name) {
      this.store.setError("element name is required");
      return;
    }
    const kind = this.kindSelect.value as ElementKind;
    const file = this.fileInput.files?.[0];
    try {
      await this.api.createElement(name, kind, file);
      this.nameInput.value = "";
      this.fileInput.value = "";
      this.store.setError(null);
      await this.refresh();
    } catch (err) {
      this.store.setError(describeError(err));
    }
  }

  render(state: UiState): void {
    this.modulesBox.replaceChildren();
    const central = el("button", "module-btn", "Central scene");
    central.classList.toggle("active", state.selectedModule === CENTRAL);
    central.addEventListener("click", () => this.store.selectModule(CENTRAL));
    this.modulesBox.append(central);
    for (const element of this.store.elements()) {
      const row = el("div", "module-row");
      const btn = el("button", "module-btn", `${element.name} (${element.kind})`);
      btn.classList.toggle("active", state.selectedModule === element.id);
      btn.addEventListener("click", () => this.store.selectModule(element.id));
      const remove = el("button", "remove-btn", "×");
      remove.title = `Delete ${element.name}`;
      remove.addEventListener("click", () => {
        void this.api
          .deleteElement(element.id)
          .then(() => this.refresh())
          .catch((err) => this.store.setError(describeError(err)));
      });
      row.append(btn, remove);
      this.modulesBox.append(row);
    }

    this.toolsBox.replaceChildren();
    for (const tool of TOOLS) {
      const btn = el("button", "tool-btn", tool);
      btn.classList.toggle("active", state.activeTool === tool);
      btn.addEventListener("click", () => this.store.setTool(tool));
      this.toolsBox.append(btn);
    }

    this.proxiesBox.replaceChildren();
    for (const proxy of this.store.proxies()) {
      const row = el("div", "proxy-row");
      row.append(el("span", undefined, `${proxy.label} (${proxy.kind}, ${proxy.geometry.length} pts)`));
      const remove = el("button", "remove-btn", "×");
      remove.title = `Delete ${proxy.label}`;
      remove.addEventListener("click", () => {
        void this.api
          .deleteProxy(proxy.label)
          .then(() => this.refresh())
          .catch((err) => this.store.setError(describeError(err)));
      });
      row.append(remove);
      this.proxiesBox.append(row);
    }
  }
}

/** Conversation transcript plus the prompt box for the selected module. */
export class PromptPane {
  private transcript: HTMLElement;
  private textarea: HTMLTextAreaElement;
  private sendButton: HTMLButtonElement;
  private title: HTMLElement;
  private shownModule: string | null = null;
  private fetching = false;

  constructor(
    root: HTMLElement,
    private api: EngineApi,
    private store: Store,
  ) {
    this.title = el("h2", "pane-title", "Conversation");
    root.append(this.title);
    this.transcript = el("div", "transcript");
    root.append(this.transcript);
    const controls = el("div", "prompt-controls");
    this.textarea = el("textarea");
    this.textarea.placeholder = "Describe what this module should do…";
    this.textarea.addEventListener("input", () => this.store.setDraft(this.textarea.value));
    this.sendButton = el("button", "send-btn", "Generate");
    this.sendButton.addEventListener("click", () => this.send());
    controls.append(this.textarea, this.sendButton);
    root.append(controls);
  }

  /** Force the next render to refetch the transcript. */
  invalidate(): void {
    this.shownModule = null;
  }

  private send(): void {
    const state = this.store.state;
    const text = state.promptDraft.trim();
    if (!text || state.generating) {
      return;
    }
    this.store.setGenerating(true);
    this.store.setError(null);
    void this.api.prompt(state.selectedModule, text).catch((err) => {
      this.store.setGenerating(false);
      this.store.setError(describeError(err));
    });
    this.store.setDraft("");
  }

  render(state: UiState): void {
    const name =
      state.selectedModule === CENTRAL
        ? "Central scene"
        : (this.store.selectedElement()?.name ?? state.selectedModule);
    this.title.textContent = `Conversation · ${name}`;
    if (this.textarea.value !== state.promptDraft) {
      this.textarea.value = state.promptDraft;
    }
    this.sendButton.disabled = !state.promptDraft.trim() || state.generating;
    this.sendButton.textContent = state.generating ? "Generating…" : "Generate";

    if (this.shownModule !== state.selectedModule && !this.fetching) {
      this.fetching = true;
      const module = state.selectedModule;
      void this.api
        .session(module)
        .then((records) => {
          this.shownModule = module;
          this.renderTranscript(records);
        })
        .catch((err) => {
          this.shownModule = module;
          this.transcript.replaceChildren(el("div", "msg audit", describeError(err)));
        })
        .finally(() => {
          this.fetching = false;
          if (this.store.state.selectedModule !== module) {
            this.render(this.store.state); // selection moved while fetching
          }
        });
    }
  }

  private renderTranscript(records: SessionRecord[]): void {
    this.transcript.replaceChildren();
    for (const record of records) {
      if (record.role === "system") {
        const details = el("details", "msg system");
        details.append(el("summary", undefined, "system prompt"));
        const pre = el("pre");
        pre.textContent = record.content;
        details.append(pre);
        this.transcript.append(details);
        continue;
      }
      const cls = record.role ? `msg ${record.role}` : "msg audit";
      const box = el("div", cls);
      box.append(el("div", "msg-tag", record.role ?? `audit: ${record.audit ?? ""}`));
      const pre = el("pre");
      pre.textContent = record.content;
      box.append(pre);
      this.transcript.append(box);
    }
    this.transcript.scrollTop = this.transcript.scrollHeight;
  }
}

/** Numeric tuning controls for the selected element's literals. */
export class SliderPane {
  private body: HTMLElement;
  private shownKey = "";
  private senders = new Map<string, Debounced<[number]>>();
  private inputs = new Map<string, { range: HTMLInputElement; num: HTMLInputElement }>();

  constructor(
    root: HTMLElement,
    private api: EngineApi,
    private store: Store,
  ) {
    root.append(el("h2", "pane-title", "Parameters"));
    this.body = el("div", "slider-body");
    root.append(this.body);
  }

  render(state: UiState): void {
    const element = this.store.selectedElement();
    if (!element) {
      this.shownKey = "";
      this.body.replaceChildren(el("div", "hint", "Select an element to tune its numbers."));
      return;
    }
    const rows = state.sliderCache.get(element.id);
    if (!rows) {
      void this.api
        .sliders(element.id)
        .then((fetched) => this.store.setSliders(element.id, fetched))
        .catch((err) => this.store.setError(describeError(err)));
      return;
    }
    const key = `${element.id}:${rows.map((r) => r.name).join(",")}`;
    if (key !== this.shownKey) {
      this.rebuild(element.id, rows);
      this.shownKey = key;
      return;
    }
    for (const row of rows) {
      const pair = this.inputs.get(row.name);
      if (!pair) {
        continue;
      }
      if (document.activeElement !== pair.range && document.activeElement !== pair.num) {
        pair.range.value = String(row.value);
        pair.num.value = String(row.value);
      }
    }
  }

  private rebuild(elementId: string, rows: SliderRow[]): void {
    this.body.replaceChildren();
    this.inputs.clear();
    if (!rows.length) {
      this.body.append(el("div", "hint", "No tunable numbers yet. Generate some code first."));
      return;
    }
    for (const row of rows) {
      const wrap = el("div", "slider-row");
      const label = el("label", undefined, row.name);
      if (row.description) {
        label.title = row.description;
      }
      const range = el("input");
      range.type = "range";
      const num = el("input");
      num.type = "number";
      for (const input of [range, num]) {
        input.min = String(row.min);
        input.max = String(row.max);
        input.step = String(row.step);
        input.value = String(row.value);
      }
      const onInput = (source: HTMLInputElement) => () => {
        const parsed = Number(source.value);
        if (!Number.isFinite(parsed)) {
          return;
        }
        const clamped = Math.min(Math.max(parsed, row.min), row.max);
        range.value = String(clamped);
        num.value = String(clamped);
        this.sender(elementId, row.name)(clamped);
      };
      range.addEventListener("input", onInput(range));
      num.addEventListener("input", onInput(num));
      wrap.append(label, range, num);
      this.body.append(wrap);
      this.inputs.set(row.name, { range, num });
    }
  }

  private sender(elementId: string, name: string): (value: number) => void {
    const key = `${elementId}:${name}`;
    let sender = this.senders.get(key);
    if (!sender) {
      sender = debounce((value: number) => {
        void this.api
          .patchSlider(elementId, name, value)
          .then((rows) => {
            this.store.setSliders(elementId, rows);
            this.store.bumpPreview();
          })
          .catch((err) => this.store.setError(describeError(err)));
      }, SLIDER_DEBOUNCE_MS);
      this.senders.set(key, sender);
    }
    return (value: number) => sender!(value);
  }
}

/** Live preview of the built scene, reloaded whenever the code revision moves. */
export class PreviewPane {
  private iframe: HTMLIFrameElement;
  private shownRevision = -1;

  constructor(
    root: HTMLElement,
    private api: EngineApi,
    private store: Store,
  ) {
    const bar = el("div", "preview-bar");
    bar.append(el("h2", "pane-title", "Preview"));
    const reload = el("button", undefined, "Reload");
    reload.addEventListener("click", () => this.store.bumpPreview());
    bar.append(reload);
    root.append(bar);
    this.iframe = el("iframe", "preview-frame");
    this.iframe.title = "Scene preview";
    // generated code runs only in here, never in the editor's realm
    this.iframe.setAttribute("sandbox", "allow-scripts");
    root.append(this.iframe);
  }

  render(state: UiState): void {
    if (state.previewRevision !== this.shownRevision) {
      this.shownRevision = state.previewRevision;
      this.iframe.src = this.api.previewUrl(state.previewRevision);
    }
  }
}
