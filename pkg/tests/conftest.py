import json
from pathlib import Path

import pytest

from modscene.engine import Engine, EngineConfig

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


class ScriptBackend:
    """Backend fed by the test: one queued reply per module per call."""

    def __init__(self):
        self.replies: dict[str, list[str]] = {}
        self.requests = []

    def queue(self, module: str, reply: str) -> None:
        self.replies.setdefault(module, []).append(reply)

    def complete(self, request):
        self.requests.append(request)
        queued = self.replies.get(request.module)
        if not queued:
            raise AssertionError(f"no scripted reply for module {request.module!r}")
        return queued.pop(0)


def element_reply(name: str, variables: list[tuple[str, str, str]], functions: list[tuple[str, str, str]]) -> str:
    """Contract-conforming element reply.

    variables: (name, literal, description); the four transform lines are
    always included. functions: (name, args, description), body is a stub.
    """
    var_lines = [
        "        this.x = 0;",
        "        this.y = 0;",
        "        this.rotationDeg = 0;",
        "        this.scale = 1;",
    ]
    var_entries = [
        {"name": "x", "initial_value": "0", "description": ""},
        {"name": "y", "initial_value": "0", "description": ""},
        {"name": "rotationDeg", "initial_value": "0", "description": ""},
        {"name": "scale", "initial_value": "1", "description": ""},
    ]
    for vname, literal, desc in variables:
        var_lines.append(f"        this.{vname} = {literal}; // {desc}")
        var_entries.append({"name": vname, "initial_value": literal, "description": desc})
    fn_lines = []
    fn_entries = []
    for fname, args, desc in functions:
        fn_lines += [f"    // {desc}", f"    {fname}({args}) {{", "        this.x += 0;", "    }"]
        fn_entries.append(
            {
                "name": fname,
                "args": [{"name": a.strip(), "hint": ""} for a in args.split(",") if a.strip()],
                "return": "none",
                "description": desc,
            }
        )
    code = "\n".join(
        [f"class {name} {{", "    constructor() {", "        //variable start"]
        + var_lines
        + ["        //variable end", "    }", "    //function start"]
        + fn_lines
        + ["    //function end", "}"]
    )
    summary = json.dumps({"class_name": name, "variables": var_entries, "functions": fn_entries})
    return f"```code\n{code}\n```\n\n```summary\n{summary}\n```\n"


def central_reply(element_names: list[str], deltas: dict[str, dict[str, str]] | None = None, extra_draw: str = "") -> str:
    decls = "\n".join(f"let {n[0].lower() + n[1:]};" for n in element_names)
    news = "\n".join(f"    {n[0].lower() + n[1:]} = new {n}();" for n in element_names)
    code = (
        f"{decls}\n\nfunction setup() {{\n    createCanvas(800, 600);\n{news}\n}}\n\n"
        f"function draw() {{\n    background(0);\n{extra_draw}}}"
    )
    parts = [f"```code\n{code}\n```", '```summary\n{"class_name": "central", "variables": [], "functions": []}\n```']
    for target, slots in (deltas or {}).items():
        for section, text in slots.items():
            parts.append(f"```insert:{target}:{section}\n{text}\n```")
    return "\n\n".join(parts) + "\n"


@pytest.fixture
def backend():
    return ScriptBackend()


@pytest.fixture
def engine(tmp_path, backend):
    return Engine.create(tmp_path / "proj", "testproj", backend, EngineConfig(autosave=False))
