"""Command line entry points.

Exit codes: 0 success, 1 scenario assertion failures, 2 any engine or
usage error. Scene-editing commands operate on a project directory; the
mock backend (--fixtures) makes prompt and replay fully offline.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
import tempfile
from pathlib import Path

from .backend import MockBackend, live_backend_from_env
from .engine import Engine
from .errors import EngineError
from .scenario import run_scenario


class NullBackend:
    """Placeholder for commands that never generate."""

    def complete(self, request):
        raise EngineError("backend-unreachable", "no backend configured; pass --fixtures or --backend live")


def _build_backend(args) -> object:
    if getattr(args, "backend", "mock") == "live":
        return live_backend_from_env()
    fixtures = getattr(args, "fixtures", None)
    if fixtures:
        return MockBackend(fixtures)
    return NullBackend()


def _load_engine(args) -> Engine:
    return Engine.load(args.dir, _build_backend(args))


def _parse_point(text: str) -> tuple[float, float]:
    try:
        x, y = text.split(",")
        return float(x), float(y)
    except ValueError:
        raise EngineError("usage-error", f"expected x,y but got {text!r}") from None


def _cmd_init(args) -> int:
    if (Path(args.dir) / "project.json").exists():
        raise EngineError("usage-error", f"{args.dir} already holds a project")
    Engine.create(args.dir, args.name, NullBackend())
    print(f"initialized project {args.name!r} in {args.dir}")
    return 0


def _cmd_add_element(args) -> int:
    engine = _load_engine(args)
    asset_bytes = None
    filename = None
    if args.asset:
        asset_bytes = Path(args.asset).read_bytes()
        filename = Path(args.asset).name
    element = engine.create_element(args.name, args.kind, asset_bytes=asset_bytes, asset_filename=filename)
    print(f"created {element.id} {element.name} ({element.kind})")
    return 0


def _cmd_delete_element(args) -> int:
    engine = _load_engine(args)
    element = engine.delete_element(args.id)
    print(f"deleted {args.id} {element.name}")
    return 0


def _cmd_add_proxy(args) -> int:
    engine = _load_engine(args)
    proxy = engine.add_proxy(args.kind, [_parse_point(p) for p in args.points])
    print(f"created proxy {proxy.label} ({proxy.kind})")
    return 0


def _cmd_delete_proxy(args) -> int:
    engine = _load_engine(args)
    engine.delete_proxy(args.label)
    print(f"deleted proxy {args.label}")
    return 0


def _cmd_prompt(args) -> int:
    engine = _load_engine(args)
    result = engine.generate(args.module, args.text)
    for warning in result.warnings:
        print(f"warning: {warning['kind']}: {warning['message']}", file=sys.stderr)
    print(f"generated {result.module} at tick {result.tick}")
    return 0


def _cmd_set_slider(args) -> int:
    engine = _load_engine(args)
    element = engine.scene.find_by_name(args.element) or engine.scene.get_element(args.element)
    rows = engine.apply_slider(element.id, args.name, args.value)
    row = next(r for r in rows if r["name"] == args.name)
    print(f"{args.name} = {row['value']} in [{row['min']}, {row['max']}]")
    return 0


def _cmd_set_transform(args) -> int:
    engine = _load_engine(args)
    element = engine.scene.find_by_name(args.element) or engine.scene.get_element(args.element)
    element = engine.set_transform(element.id, args.x, args.y, args.rotation, args.scale)
    print(f"{element.name} transform {json.dumps(element.transform.to_dict(), sort_keys=True)}")
    return 0


def _cmd_export(args) -> int:
    engine = _load_engine(args)
    data = engine.export_zip()
    out = Path(args.out or f"{engine.name}.zip")
    out.write_bytes(data)
    print(f"wrote {out} ({len(data)} bytes)")
    return 0


def _cmd_replay(args) -> int:
    project_dir = args.dir or tempfile.mkdtemp(prefix="scene-replay-")
    report = run_scenario(args.scenario, project_dir, _build_backend(args))
    for line in report.lines:
        print(line)
    print(f"{report.name}: {'ok' if report.ok else f'{report.failures} failure(s)'}")
    return 0 if report.ok else 1


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    probe = socket.socket()
    try:
        probe.bind((args.host, args.port))
    except OSError:
        raise EngineError("port-in-use", f"{args.host}:{args.port} is already bound") from None
    finally:
        probe.close()

    engine = _load_engine(args)
    uvicorn.run(create_app(engine), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modscene", description="modular scene generation engine")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, backend=False):
        p.add_argument("--dir", default=".", help="project directory")
        if backend:
            p.add_argument("--backend", choices=["mock", "live"], default="mock")
            p.add_argument("--fixtures", help="fixtures directory for the mock backend")

    p = sub.add_parser("init", help="create a new project directory")
    p.add_argument("--dir", default=".")
    p.add_argument("--name", default="untitled")
    p.set_defaults(func=_cmd_init)

    p = sub.add_parser("add-element", help="add a scene element")
    p.add_argument("name")
    p.add_argument("kind", choices=["uploaded-image", "drawn-sketch", "llm-generated", "group"])
    p.add_argument("--asset", help="image file for uploaded-image / drawn-sketch elements")
    common(p)
    p.set_defaults(func=_cmd_add_element)

    p = sub.add_parser("delete-element", help="remove an element")
    p.add_argument("id")
    common(p)
    p.set_defaults(func=_cmd_delete_element)

    p = sub.add_parser("add-proxy", help="add a graphical proxy")
    p.add_argument("kind", choices=["point", "line", "curve", "region"])
    p.add_argument("points", nargs="+", help="x,y pairs")
    common(p)
    p.set_defaults(func=_cmd_add_proxy)

    p = sub.add_parser("delete-proxy", help="remove a graphical proxy")
    p.add_argument("label")
    common(p)
    p.set_defaults(func=_cmd_delete_proxy)

    p = sub.add_parser("prompt", help="send one generation request to a module")
    p.add_argument("module", help='"central", an element name, or an element id')
    p.add_argument("text")
    p.add_argument("--wait", action="store_true", help="kept for parity with the HTTP API; the CLI always waits")
    common(p, backend=True)
    p.set_defaults(func=_cmd_prompt)

    p = sub.add_parser("set-slider", help="write one slider value into the code")
    p.add_argument("element")
    p.add_argument("name")
    p.add_argument("value", type=float)
    common(p)
    p.set_defaults(func=_cmd_set_slider)

    p = sub.add_parser("set-transform", help="move/rotate/scale an element")
    p.add_argument("element")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--rotation", type=float, default=0.0)
    p.add_argument("--scale", type=float, default=1.0)
    common(p)
    p.set_defaults(func=_cmd_set_transform)

    p = sub.add_parser("export", help="write the runnable bundle zip")
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("replay", help="run a scenario file against a fresh project")
    p.add_argument("scenario")
    p.add_argument("--dir", default=None, help="project directory (default: a fresh temp dir)")
    p.add_argument("--backend", choices=["mock", "live"], default="mock")
    p.add_argument("--fixtures", help="fixtures directory for the mock backend")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8350)
    common(p, backend=True)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
