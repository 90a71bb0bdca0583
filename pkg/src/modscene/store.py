"""Project persistence and export.

A project is one directory: project.json (scene, framework, counters),
context.json (per-element summaries), sessions/*.jsonl (module
transcripts), code/*.js (one file per element plus central.js), assets/.
Saves build a sibling temp tree and swap it in, so a crash never leaves a
half-written project. All JSON is written with sorted keys and stable
layout; saving a freshly loaded project reproduces the tree byte for byte.
"""

from __future__ import annotations

import hashlib
import importlib.resources
import io
import json
import shutil
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EngineError

FORMAT_VERSION = "1"

PROJECT_FILE = "project.json"
CONTEXT_FILE = "context.json"
SESSIONS_DIR = "sessions"
ARCHIVE_DIR = "sessions/archive"
CODE_DIR = "code"
ASSETS_DIR = "assets"

VENDOR_FILE = {"phaser": "phaser.min.js", "p5js": "p5.min.js"}


@dataclass
class ProjectPayload:
    """Everything the engine persists, in plain dict/str form."""

    name: str = "untitled"
    framework: str | None = None
    tick: int = 0
    scene: dict = field(default_factory=dict)
    sliders: dict = field(default_factory=dict)  # element id -> {var: [min, max]}
    ledger: dict = field(default_factory=dict)  # element id -> {"variables": {...}, "functions": {...}}
    module_meta: dict = field(default_factory=dict)  # module -> {"created_at": tick}
    context_entries: list = field(default_factory=list)
    sessions: dict = field(default_factory=dict)  # module -> [records]
    archived_sessions: dict = field(default_factory=dict)
    code: dict = field(default_factory=dict)  # "central" or element name -> text
    pending_assets: dict = field(default_factory=dict)  # rel path -> bytes, not yet on disk
    asset_keep: list | None = None  # rel paths to carry forward; None keeps everything


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _jsonl_text(records: list[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in records)


def save_project(root: str | Path, payload: ProjectPayload) -> None:
    root = Path(root)
    tmp = root.with_name(root.name + ".saving")
    old = root.with_name(root.name + ".stale")
    try:
        if tmp.exists():
            shutil.rmtree(tmp)
        tmp.mkdir(parents=True)

        project = {
            "format_version": FORMAT_VERSION,
            "name": payload.name,
            "framework": payload.framework,
            "tick": payload.tick,
            "scene": payload.scene,
            "sliders": payload.sliders,
            "ledger": payload.ledger,
            "module_meta": payload.module_meta,
        }
        (tmp / PROJECT_FILE).write_text(_json_text(project), encoding="utf-8")
        context = {"format_version": FORMAT_VERSION, "entries": payload.context_entries}
        (tmp / CONTEXT_FILE).write_text(_json_text(context), encoding="utf-8")

        (tmp / SESSIONS_DIR).mkdir()
        for module, records in payload.sessions.items():
            (tmp / SESSIONS_DIR / f"{module}.jsonl").write_text(_jsonl_text(records), encoding="utf-8")
        if payload.archived_sessions:
            (tmp / ARCHIVE_DIR).mkdir(parents=True)
            for module, records in payload.archived_sessions.items():
                (tmp / ARCHIVE_DIR / f"{module}.jsonl").write_text(_jsonl_text(records), encoding="utf-8")

        (tmp / CODE_DIR).mkdir()
        for unit, text in payload.code.items():
            filename = "central.js" if unit == "central" else f"{unit}.js"
            (tmp / CODE_DIR / filename).write_text(text, encoding="utf-8")

        (tmp / ASSETS_DIR).mkdir()
        existing = root / ASSETS_DIR
        if existing.is_dir():
            for item in sorted(existing.iterdir()):
                rel = f"{ASSETS_DIR}/{item.name}"
                if item.is_file() and (payload.asset_keep is None or rel in payload.asset_keep):
                    shutil.copy2(item, tmp / ASSETS_DIR / item.name)
        for rel, data in payload.pending_assets.items():
            target = tmp / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(data)

        if root.exists():
            if old.exists():
                shutil.rmtree(old)
            root.rename(old)
            tmp.rename(root)
            shutil.rmtree(old)
        else:
            tmp.rename(root)
    except OSError as exc:
        raise EngineError("io-failure", f"saving project to {root} failed: {exc}") from exc


def load_project(root: str | Path) -> ProjectPayload:
    root = Path(root)
    project_path = root / PROJECT_FILE
    if not project_path.is_file():
        raise EngineError("corrupt-file", f"{project_path} does not exist; not a project directory")
    try:
        project = json.loads(project_path.read_text(encoding="utf-8"))
        version = project.get("format_version")
        if version != FORMAT_VERSION:
            raise EngineError(
                "version-mismatch",
                f"project format {version!r} is not supported (expected {FORMAT_VERSION!r})",
            )
        context_path = root / CONTEXT_FILE
        if not context_path.is_file():
            raise EngineError("corrupt-file", f"{context_path} is missing; the project tree is incomplete")
        entries = json.loads(context_path.read_text(encoding="utf-8")).get("entries", [])

        sessions: dict[str, list[dict]] = {}
        sessions_dir = root / SESSIONS_DIR
        if sessions_dir.is_dir():
            for path in sorted(sessions_dir.glob("*.jsonl")):
                sessions[path.stem] = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]
        archived: dict[str, list[dict]] = {}
        archive_dir = root / ARCHIVE_DIR
        if archive_dir.is_dir():
            for path in sorted(archive_dir.glob("*.jsonl")):
                archived[path.stem] = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]

        code: dict[str, str] = {}
        code_dir = root / CODE_DIR
        if code_dir.is_dir():
            for path in sorted(code_dir.glob("*.js")):
                unit = "central" if path.name == "central.js" else path.stem
                code[unit] = path.read_text(encoding="utf-8")

        return ProjectPayload(
            name=project.get("name", "untitled"),
            framework=project.get("framework"),
            tick=int(project.get("tick", 0)),
            scene=project.get("scene", {}),
            sliders=project.get("sliders", {}),
            ledger=project.get("ledger", {}),
            module_meta=project.get("module_meta", {}),
            context_entries=entries,
            sessions=sessions,
            archived_sessions=archived,
            code=code,
        )
    except EngineError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise EngineError("corrupt-file", f"project data under {root} is unreadable: {exc}") from exc
    except OSError as exc:
        raise EngineError("io-failure", f"reading project from {root} failed: {exc}") from exc


def tree_hash(root: str | Path) -> str:
    """Content hash of a directory tree: relative paths plus file bytes."""
    root = Path(root)
    digest = hashlib.sha256()
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        rel = path.relative_to(root).as_posix()
        digest.update(rel.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(path.read_bytes())
        digest.update(b"\x00")
    return digest.hexdigest()


# -- export -------------------------------------------------------------------


def vendor_script(framework: str) -> bytes:
    name = VENDOR_FILE[framework]
    ref = importlib.resources.files("modscene") / "vendor" / name
    return ref.read_bytes()


def build_bundle(
    framework: str,
    title: str,
    code_units: list[tuple[str, str]],
    assets: dict[str, bytes],
) -> dict[str, bytes]:
    """File map of a runnable page: index.html, vendored framework, code, assets.

    ``code_units`` is ordered (elements first, central last) so classes are
    defined before the central file references them.
    """
    if framework not in VENDOR_FILE:
        raise EngineError("framework-unselected", "cannot export before a framework is selected")
    files: dict[str, bytes] = {}
    vendor_name = VENDOR_FILE[framework]
    files[f"vendor/{vendor_name}"] = vendor_script(framework)
    scripts = [f"vendor/{vendor_name}"]
    for unit, text in code_units:
        filename = "central.js" if unit == "central" else f"{unit}.js"
        rel = f"code/{filename}"
        files[rel] = text.encode("utf-8")
        scripts.append(rel)
    for rel, data in assets.items():
        files[rel] = data
    tags = "\n".join(f'<script src="{src}"></script>' for src in scripts)
    html = (
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
        f"<title>{title}</title>\n"
        "<style>html, body { margin: 0; background: #111; }</style>\n"
        "</head>\n<body>\n"
        f"{tags}\n"
        "</body>\n</html>\n"
    )
    files["index.html"] = html.encode("utf-8")
    return files


def zip_bytes(files: dict[str, bytes]) -> bytes:
    """Deterministic zip: fixed timestamps and permissions, sorted entries."""
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as zf:
        for rel in sorted(files):
            info = zipfile.ZipInfo(rel, date_time=(1980, 1, 1, 0, 0, 0))
            info.external_attr = 0o644 << 16
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, files[rel])
    return buffer.getvalue()


def write_bundle_dir(dest: str | Path, files: dict[str, bytes]) -> None:
    dest = Path(dest)
    try:
        for rel, data in files.items():
            target = dest / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(data)
    except OSError as exc:
        raise EngineError("io-failure", f"writing bundle to {dest} failed: {exc}") from exc
