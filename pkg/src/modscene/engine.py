"""The orchestration engine.

One instance owns a project: the scene, one conversation module per
element plus the central module, the context repository, the code units,
and the event stream. Every public method is safe to call from any
thread; state mutations are serialized, tick-stamped, and autosaved.
"""

from __future__ import annotations

import mimetypes
import os
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .backend import DEFAULT_MODEL, DEFAULT_TEMPERATURE, ENV_MODEL, CompletionRequest
from .context import ClassSummary, ContextRepository
from .errors import EngineError
from .events import EventBus
from .integrator import (
    apply_element_deltas,
    central_template,
    instantiate_template,
    merge_element_code,
    parse_response,
    prune_stale_ledger,
    reconcile_summary,
    static_summary,
    sync_transform,
)
from .prompts import (
    DEFAULT_FRAMEWORK,
    P5JS_KEYWORDS,
    PHASER_KEYWORDS,
    build_central_prompt,
    build_element_prompt,
    central_system_message,
    classify_framework,
    element_system_message,
)
from .scene import AssetRef, SceneModel, Transform
from .sessions import CENTRAL, ModuleRegistry, ModuleSession
from .sliders import apply_slider as apply_slider_to_code
from .sliders import build_manifest
from .store import ProjectPayload, build_bundle, load_project, save_project, zip_bytes


@dataclass
class EngineConfig:
    history_cap: int = 40
    temperature: float = DEFAULT_TEMPERATURE
    model: str = field(default_factory=lambda: os.environ.get(ENV_MODEL, DEFAULT_MODEL))
    phaser_keywords: tuple = PHASER_KEYWORDS
    p5js_keywords: tuple = P5JS_KEYWORDS
    autosave: bool = True


@dataclass
class GenerationResult:
    module: str
    element_id: str | None
    code: str
    warnings: list[dict] = field(default_factory=list)
    diffs: list[dict] = field(default_factory=list)
    tick: int = 0


class Engine:
    def __init__(self, root: str | Path, backend, config: EngineConfig | None = None, name: str = "untitled"):
        self.root = Path(root)
        self.backend = backend
        self.config = config or EngineConfig()
        self.name = name
        self.framework: str | None = None
        self.tick = 0
        self.scene = SceneModel()
        self.registry = ModuleRegistry()
        self.context = ContextRepository()
        self.events = EventBus()
        self.code: dict[str, str] = {}
        self.slider_ranges: dict[str, dict[str, tuple[float, float]]] = {}
        self.ledger: dict[str, dict[str, dict[str, str]]] = {}
        self.pending_assets: dict[str, bytes] = {}
        self.lock = threading.RLock()
        self.registry.open_module(CENTRAL, central_system_message(), tick=0)
        self.code[CENTRAL] = central_template(self._framework_or_default(), [])

    # -- lifecycle -------------------------------------------------------

    @classmethod
    def create(cls, root: str | Path, name: str, backend, config: EngineConfig | None = None) -> "Engine":
        engine = cls(root, backend, config, name=name)
        engine.save()
        return engine

    @classmethod
    def load(cls, root: str | Path, backend, config: EngineConfig | None = None) -> "Engine":
        payload = load_project(root)
        engine = cls.__new__(cls)
        engine.root = Path(root)
        engine.backend = backend
        engine.config = config or EngineConfig()
        engine.name = payload.name
        engine.framework = payload.framework
        engine.tick = payload.tick
        engine.scene = SceneModel.from_dict(payload.scene) if payload.scene else SceneModel()
        engine.registry = ModuleRegistry()
        for module, records in payload.sessions.items():
            created = payload.module_meta.get(module, {}).get("created_at", 0)
            engine.registry.sessions[module] = ModuleSession(module=module, created_at=created, records=records)
        for module, records in payload.archived_sessions.items():
            engine.registry.archived[module] = ModuleSession(module=module, created_at=0, records=records)
        engine.context = ContextRepository.from_list(payload.context_entries)
        engine.events = EventBus()
        engine.code = dict(payload.code)
        engine.slider_ranges = {
            eid: {n: (float(pair[0]), float(pair[1])) for n, pair in ranges.items()}
            for eid, ranges in payload.sliders.items()
        }
        engine.ledger = payload.ledger
        engine.pending_assets = {}
        engine.lock = threading.RLock()
        if CENTRAL not in engine.registry.sessions:
            raise EngineError("corrupt-file", "project has no central session transcript")
        return engine

    def save(self) -> None:
        with self.lock:
            save_project(self.root, self._payload())
            self.pending_assets.clear()

    def _autosave(self) -> None:
        if self.config.autosave:
            save_project(self.root, self._payload())
            self.pending_assets.clear()

    def _payload(self) -> ProjectPayload:
        keep = [e.asset.path for e in self.scene.ordered_elements() if e.asset]
        return ProjectPayload(
            name=self.name,
            framework=self.framework,
            tick=self.tick,
            scene=self.scene.to_dict(),
            sliders={
                eid: {n: [lo, hi] for n, (lo, hi) in ranges.items()}
                for eid, ranges in self.slider_ranges.items()
                if ranges
            },
            ledger={eid: led for eid, led in self.ledger.items() if led.get("variables") or led.get("functions")},
            module_meta={m: {"created_at": s.created_at} for m, s in self.registry.sessions.items()},
            context_entries=self.context.to_list(),
            sessions={m: s.records for m, s in self.registry.sessions.items()},
            archived_sessions={m: s.records for m, s in self.registry.archived.items()},
            code=dict(self.code),
            pending_assets=dict(self.pending_assets),
            asset_keep=keep,
        )

    # -- helpers ---------------------------------------------------------

    def _framework_or_default(self) -> str:
        return self.framework or DEFAULT_FRAMEWORK

    def _warn(self, kind: str, message: str, sink: list | None = None) -> None:
        payload = {"kind": kind, "message": message}
        self.events.emit("warning", payload)
        if sink is not None:
            sink.append(payload)

    def _central_pristine(self) -> bool:
        return self.registry.get(CENTRAL).exchange_count == 0

    def _retemplate_central(self) -> None:
        names = [e.name for e in self.scene.ordered_elements()]
        self.code[CENTRAL] = central_template(self._framework_or_default(), names)

    def _refresh_summary(self, element) -> dict:
        existing = self.context.get(element.id) or ClassSummary(element="", class_name=element.name)
        merged = reconcile_summary(element.name, self.code[element.name], existing)
        return self.context.upsert_summary(element.id, element.name, merged).to_dict()

    def _resolve_module(self, module: str):
        """Accept 'central', an element name, or an element id."""
        if module == CENTRAL:
            return CENTRAL, None
        element = self.scene.find_by_name(module)
        if element is None and module in self.scene.elements:
            element = self.scene.elements[module]
        if element is None:
            raise EngineError("unknown-module", f"no module named {module!r}")
        return element.name, element

    # -- scene operations --------------------------------------------------

    def create_element(
        self,
        name: str,
        kind: str,
        asset_bytes: bytes | None = None,
        asset_filename: str | None = None,
        media_type: str | None = None,
    ):
        with self.lock:
            asset = None
            rel = None
            if asset_bytes is not None:
                filename = os.path.basename(asset_filename or "asset.bin")
                rel = f"assets/{name}-{filename}"
                if media_type is None:
                    media_type = mimetypes.guess_type(filename)[0] or "application/octet-stream"
                asset = AssetRef(path=rel, media_type=media_type)
            element = self.scene.create_element(name, kind, asset=asset)
            if rel is not None:
                self.pending_assets[rel] = asset_bytes
            template = instantiate_template(self._framework_or_default(), name)
            self.code[name] = template
            self.registry.open_module(
                name, element_system_message(name, self._framework_or_default(), template), tick=self.tick
            )
            self.ledger[element.id] = {"variables": {}, "functions": {}}
            self._refresh_summary(element)
            if self._central_pristine():
                self._retemplate_central()
            self.tick += 1
            self._autosave()
            self.events.emit("element-created", {"id": element.id, "name": name, "kind": kind})
            return element

    def delete_element(self, element_id: str):
        with self.lock:
            element = self.scene.delete_element(element_id)
            self.registry.archive(element.name)
            session = self.registry.archived.pop(element.name, None)
            if session is not None:
                self.registry.archived[f"{element.name}-t{self.tick}"] = session
            self.code.pop(element.name, None)
            self.context.remove(element_id)
            self.slider_ranges.pop(element_id, None)
            self.ledger.pop(element_id, None)
            if element.asset:
                self.pending_assets.pop(element.asset.path, None)
            if self._central_pristine():
                self._retemplate_central()
            self.tick += 1
            self._autosave()
            self.events.emit("element-deleted", {"id": element_id, "name": element.name})
            return element

    def set_transform(self, element_id: str, x: float, y: float, rotation: float, scale: float):
        with self.lock:
            element = self.scene.set_transform(element_id, Transform(x=x, y=y, rotation=rotation, scale=scale))
            new_code, changed = sync_transform(self.code[element.name], element.transform)
            self.code[element.name] = new_code
            self._refresh_summary(element)
            self.tick += 1
            self._autosave()
            self.events.emit(
                "transform-synced",
                {"id": element_id, "changed": changed, "transform": element.transform.to_dict()},
            )
            return element

    def add_proxy(self, kind: str, geometry: list[tuple[float, float]]):
        with self.lock:
            proxy = self.scene.add_proxy(kind, geometry)
            self.tick += 1
            self._autosave()
            self.events.emit("proxy-added", {"label": proxy.label, "kind": kind})
            return proxy

    def delete_proxy(self, label: str):
        with self.lock:
            proxy = self.scene.delete_proxy(label)
            self.tick += 1
            self._autosave()
            self.events.emit("proxy-deleted", {"label": label})
            return proxy

    # -- generation ---------------------------------------------------------

    def _select_framework(self, description: str) -> None:
        self.framework = classify_framework(
            description, self.config.phaser_keywords, self.config.p5js_keywords
        )
        self._retemplate_central()
        for element in self.scene.ordered_elements():
            session = self.registry.get(element.name)
            eid = element.id
            untouched = (
                session.exchange_count == 0
                and not self.ledger.get(eid, {}).get("variables")
                and not self.ledger.get(eid, {}).get("functions")
            )
            if not untouched:
                continue
            template = instantiate_template(self.framework, element.name)
            code, _ = sync_transform(template, element.transform)
            self.code[element.name] = code
            self.registry.reset_system_message(
                element.name, element_system_message(element.name, self.framework, code)
            )
            self._refresh_summary(element)
        self.events.emit("framework-selected", {"framework": self.framework})

    def generate(self, module: str, text: str) -> GenerationResult:
        """Run one prompt through its module: render, complete, merge.

        The central module also applies element-tagged insertions and
        refreshes the context; an element module only rewrites its own file.
        """
        with self.lock:
            module, element = self._resolve_module(module)
            session = self.registry.get(module)
            warnings: list[dict] = []
            if module == CENTRAL and self.framework is None:
                self._select_framework(text)
            if element is not None:
                envelope = build_element_prompt(
                    element.name, self.framework, text, self.code[element.name], self.scene.proxies
                )
            else:
                envelope = build_central_prompt(
                    self.framework,
                    text,
                    self.code[CENTRAL],
                    self.context.compile_context(),
                    self.scene.proxies,
                )
            rendered = envelope.render()
            session.append_audit("request", text)
            messages = self.registry.request_messages(module, rendered, self.config.history_cap)
            request = CompletionRequest(
                module=module,
                messages=[m.to_dict() for m in messages],
                model=self.config.model,
                temperature=self.config.temperature,
            )
            self.events.emit("generation-started", {"module": module})
            raw = self.backend.complete(request)
            parsed = parse_response(raw, expects_deltas=(module == CENTRAL))
            diffs: list[dict] = []

            if element is not None:
                merged = merge_element_code(
                    parsed.code, element.name, on_warning=lambda k, m: self._warn(k, m, warnings)
                )
                self.code[element.name] = merged
                dropped = prune_stale_ledger(merged, self.ledger.setdefault(element.id, {}))
                if dropped:
                    self._warn(
                        "insertions-dropped",
                        f"{element.name} regenerated without: {', '.join(sorted(dropped))}",
                        warnings,
                    )
                summary = reconcile_summary(element.name, merged, parsed.summary)
                diffs.append(self.context.upsert_summary(element.id, element.name, summary).to_dict())
            else:
                by_name = {e.name: e for e in self.scene.ordered_elements()}
                unknown = [n for n in parsed.deltas if n not in by_name]
                if unknown:
                    raise EngineError(
                        "unknown-element-in-delta",
                        f"insertion blocks target unknown elements: {sorted(unknown)}",
                    )
                self.code[CENTRAL] = parsed.code
                context_deltas = {}
                for target in self.scene.ordered_elements():
                    if target.name not in parsed.deltas:
                        continue
                    slots = parsed.deltas[target.name]
                    outcome = apply_element_deltas(
                        self.code[target.name],
                        slots.get("variables"),
                        slots.get("functions"),
                        self.ledger.setdefault(target.id, {}),
                        on_warning=lambda k, m: self._warn(k, m, warnings),
                    )
                    if outcome.changed:
                        self.code[target.name] = outcome.code
                        context_deltas[target.id] = (outcome.variables, outcome.functions)
                if context_deltas:
                    diffs.extend(r.to_dict() for r in self.context.apply_central_deltas(context_deltas))
                for message in self._central_reference_warnings():
                    self._warn("unresolved-reference", message, warnings)

            self.registry.append_exchange(module, rendered, raw)
            self.tick += 1
            self._autosave()
            self.events.emit("generation-complete", {"module": module, "tick": self.tick})
            return GenerationResult(
                module=module,
                element_id=element.id if element is not None else None,
                code=self.code[element.name] if element is not None else self.code[CENTRAL],
                warnings=warnings,
                diffs=diffs,
                tick=self.tick,
            )

    def _central_reference_warnings(self) -> list[str]:
        """Instance method calls in central code that no element summary
        explains. Advisory only: the merge still lands."""
        code = self.code[CENTRAL]
        problems = []
        for element in self.scene.ordered_elements():
            instance = element.name[0].lower() + element.name[1:]
            summary = self.context.get(element.id)
            known = summary.function_names() if summary else set()
            for m in re.finditer(rf"\b{re.escape(instance)}\.([A-Za-z_]\w*)\s*\(", code):
                if m.group(1) not in known:
                    problems.append(f"central calls {instance}.{m.group(1)}() which {element.name} does not declare")
        return problems

    # -- sliders -------------------------------------------------------------

    def slider_manifest(self, element_id: str) -> list[dict]:
        with self.lock:
            element = self.scene.get_element(element_id)
            ranges = self.slider_ranges.setdefault(element_id, {})
            before = dict(ranges)
            rows = build_manifest(self.code[element.name], ranges)
            if ranges != before:
                self._autosave()
            return rows

    def apply_slider(self, element_id: str, name: str, value: float) -> list[dict]:
        with self.lock:
            element = self.scene.get_element(element_id)
            ranges = self.slider_ranges.setdefault(element_id, {})
            self.code[element.name] = apply_slider_to_code(self.code[element.name], ranges, name, value)
            self._refresh_summary(element)
            self.tick += 1
            self._autosave()
            self.events.emit("slider-applied", {"id": element_id, "name": name, "value": value})
            return build_manifest(self.code[element.name], ranges)

    # -- export ----------------------------------------------------------------

    def _asset_bytes(self, rel: str) -> bytes:
        if rel in self.pending_assets:
            return self.pending_assets[rel]
        path = self.root / rel
        if not path.is_file():
            raise EngineError("missing-asset", f"asset {rel} is not in the project")
        return path.read_bytes()

    def export_files(self) -> dict[str, bytes]:
        with self.lock:
            if self.framework is None:
                raise EngineError("framework-unselected", "cannot export before a framework is selected")
            units = [(e.name, self.code[e.name]) for e in self.scene.ordered_elements()]
            units.append((CENTRAL, self.code[CENTRAL]))
            assets = {}
            for element in self.scene.ordered_elements():
                if element.asset:
                    assets[element.asset.path] = self._asset_bytes(element.asset.path)
            return build_bundle(self.framework, self.name, units, assets)

    def export_zip(self) -> bytes:
        return zip_bytes(self.export_files())

    # -- inspection --------------------------------------------------------------

    def compile_context(self) -> str:
        with self.lock:
            return self.context.compile_context()

    def session_records(self, module: str) -> list[dict]:
        with self.lock:
            if module != CENTRAL:
                module, _ = self._resolve_module(module)
            return list(self.registry.get(module).records)

    def coherence_report(self) -> list[str]:
        """Mismatch list between each element's code regions and its summary;
        empty means every summary tells the truth."""
        with self.lock:
            problems = []
            for element in self.scene.ordered_elements():
                code = self.code.get(element.name)
                if code is None:
                    problems.append(f"{element.name}: no code unit")
                    continue
                summary = self.context.get(element.id)
                if summary is None:
                    problems.append(f"{element.name}: no summary")
                    continue
                static = static_summary(element.name, code)
                code_vars = {v.name: v.initial_value for v in static.variables}
                ctx_vars = {v.name: v.initial_value for v in summary.variables}
                if code_vars != ctx_vars:
                    problems.append(f"{element.name}: variable mismatch {code_vars} vs {ctx_vars}")
                code_fns = {f.name for f in static.functions}
                ctx_fns = summary.function_names()
                if code_fns != ctx_fns:
                    problems.append(f"{element.name}: function mismatch {sorted(code_fns)} vs {sorted(ctx_fns)}")
            return problems

    def project_info(self) -> dict:
        with self.lock:
            return {
                "name": self.name,
                "framework": self.framework,
                "tick": self.tick,
                "canvas": list(self.scene.canvas),
                "elements": [e.to_dict() for e in self.scene.ordered_elements()],
                "proxies": [p.to_dict() for p in self.scene.ordered_proxies()],
                "modules": sorted(self.registry.sessions),
            }
