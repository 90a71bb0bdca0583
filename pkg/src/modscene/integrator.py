"""Code integration: class templates, marker-delimited regions, response
parsing, merging, and static extraction of variables and functions.

Element files carry four marker lines splitting the class into a variable
region and a function region; only those regions are written by merges.
The central file has no markers. All parsing here is line-oriented and
deliberately shallow: brace counting, no real JS parse.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .context import ClassSummary, FunctionInfo, VariableInfo
from .errors import EngineError
from .scene import CANVAS_HEIGHT, CANVAS_WIDTH, Transform

VARIABLE_START = "//variable start"
VARIABLE_END = "//variable end"
FUNCTION_START = "//function start"
FUNCTION_END = "//function end"
MARKERS = (VARIABLE_START, VARIABLE_END, FUNCTION_START, FUNCTION_END)

# transform-owned variable lines; rewritten by sync, excluded from sliders
TRANSFORM_ANCHORS = ("x", "y", "rotationDeg", "scale")

_CLASS_RE = re.compile(r"^\s*class\s+([A-Za-z_][A-Za-z0-9_]*)")
_VARIABLE_RE = re.compile(r"^\s*this\.([A-Za-z_]\w*)\s*=\s*(.+?);(?:\s*//\s*(.*))?\s*$")
_NUMBER_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)")
_SIGNATURE_RE = re.compile(r"^\s*(?:async\s+)?([A-Za-z_]\w*)\s*\(([^)]*)\)\s*\{")
_COMMENT_RE = re.compile(r"^\s*//\s?(.*)$")
_RETURN_RE = re.compile(r"^\s*return\s+[^;]+;")
_FENCE_OPEN_RE = re.compile(r"^```([^`\s][^`]*?)\s*$")
_DELTA_TAG_RE = re.compile(r"^insert:([A-Za-z_][A-Za-z0-9_]*):(variables|functions)$")


def format_number(value: float) -> str:
    """Literal text for a numeric value: integer form when integral."""
    value = float(value)
    if value.is_integer():
        return str(int(value))
    return repr(value)


def is_numeric_literal(text: str) -> bool:
    return _NUMBER_RE.fullmatch(text.strip()) is not None


# -- regions ----------------------------------------------------------------


@dataclass
class Regions:
    """Marker line indices within a splitlines() view of a code unit."""

    lines: list[str]
    var_start: int
    var_end: int
    fn_start: int
    fn_end: int

    def variable_lines(self) -> list[str]:
        return self.lines[self.var_start + 1 : self.var_end]

    def function_lines(self) -> list[str]:
        return self.lines[self.fn_start + 1 : self.fn_end]


def locate_regions(code: str) -> Regions:
    """Find the four markers; each must occur exactly once, in order."""
    lines = code.splitlines()
    where: dict[str, list[int]] = {m: [] for m in MARKERS}
    for i, line in enumerate(lines):
        stripped = line.strip()
        if stripped in where:
            where[stripped].append(i)
    problems = []
    for marker in MARKERS:
        n = len(where[marker])
        if n != 1:
            problems.append(f"{marker!r} occurs {n} times, expected 1")
    if problems:
        raise EngineError("missing-markers", "; ".join(problems))
    vs, ve = where[VARIABLE_START][0], where[VARIABLE_END][0]
    fs, fe = where[FUNCTION_START][0], where[FUNCTION_END][0]
    if not vs < ve < fs < fe:
        raise EngineError(
            "missing-markers",
            "marker order must be variable start, variable end, function start, function end",
        )
    return Regions(lines, vs, ve, fs, fe)


def _indent_of(line: str) -> str:
    return line[: len(line) - len(line.lstrip())]


# -- templates ---------------------------------------------------------------


def instantiate_template(framework: str, name: str) -> str:
    """Fresh class file for a new element, markers and transform lines included."""
    ctor_args = "scene" if framework == "phaser" else ""
    lines = [f"class {name} {{", f"    constructor({ctor_args}) {{"]
    if framework == "phaser":
        lines.append("        this.scene = scene;")
    lines += [
        f"        {VARIABLE_START}",
        "        this.x = 0;",
        "        this.y = 0;",
        "        this.rotationDeg = 0;",
        "        this.scale = 1;",
        f"        {VARIABLE_END}",
        "    }",
        f"    {FUNCTION_START}",
        f"    {FUNCTION_END}",
        "}",
    ]
    return "\n".join(lines) + "\n"


def _instance_name(element_name: str) -> str:
    return element_name[0].lower() + element_name[1:]


def central_template(framework: str, element_names: list[str]) -> str:
    """Pristine central file: canvas setup plus one instantiation per element.

    Regenerated whenever the element set changes while the central module
    has produced no code of its own yet.
    """
    decls = [f"let {_instance_name(n)};" for n in element_names]
    if framework == "phaser":
        lines = [
            "const config = {",
            "    type: Phaser.AUTO,",
            f"    width: {CANVAS_WIDTH},",
            f"    height: {CANVAS_HEIGHT},",
            "    scene: { preload: preload, create: create, update: update }",
            "};",
            "",
            "const game = new Phaser.Game(config);",
        ]
        if decls:
            lines += [""] + decls
        lines += [
            "",
            "function preload() {",
            "}",
            "",
            "function create() {",
        ]
        lines += [f"    {_instance_name(n)} = new {n}(this);" for n in element_names]
        lines += [
            "}",
            "",
            "function update() {",
            "}",
        ]
    else:
        lines = list(decls)
        if decls:
            lines.append("")
        lines += [
            "function setup() {",
            f"    createCanvas({CANVAS_WIDTH}, {CANVAS_HEIGHT});",
        ]
        lines += [f"    {_instance_name(n)} = new {n}();" for n in element_names]
        lines += [
            "}",
            "",
            "function draw() {",
            "    background(240);",
            "}",
        ]
    return "\n".join(lines) + "\n"


# -- response parsing ---------------------------------------------------------


@dataclass
class ParsedResponse:
    code: str
    summary: ClassSummary
    # element name -> {"variables": text, "functions": text}
    deltas: dict[str, dict[str, str]] = field(default_factory=dict)


def _fenced_blocks(raw: str) -> list[tuple[str, str]]:
    blocks: list[tuple[str, str]] = []
    tag: str | None = None
    buf: list[str] = []
    for line in raw.splitlines():
        if tag is None:
            m = _FENCE_OPEN_RE.match(line.strip())
            if m:
                tag = m.group(1).strip()
                buf = []
        elif line.strip() == "```":
            blocks.append((tag, "\n".join(buf)))
            tag = None
        else:
            buf.append(line)
    return blocks


def _summary_args(raw_args) -> list[tuple[str, str]]:
    args: list[tuple[str, str]] = []
    for a in raw_args or []:
        if isinstance(a, dict):
            args.append((str(a.get("name", "")), str(a.get("hint", ""))))
        else:
            text = str(a)
            name, _, hint = text.partition(":")
            args.append((name.strip(), hint.strip()))
    return args


def summary_from_payload(payload: dict) -> ClassSummary:
    if not isinstance(payload, dict) or "class_name" not in payload:
        raise EngineError("malformed-summary-json", "summary JSON must be an object with class_name")
    variables = []
    for v in payload.get("variables", []) or []:
        if not isinstance(v, dict) or "name" not in v:
            raise EngineError("malformed-summary-json", "each variable needs at least a name")
        variables.append(
            VariableInfo(
                name=str(v["name"]),
                initial_value=str(v.get("initial_value", "")),
                description=str(v.get("description", "")),
            )
        )
    functions = []
    for f in payload.get("functions", []) or []:
        if not isinstance(f, dict) or "name" not in f:
            raise EngineError("malformed-summary-json", "each function needs at least a name")
        functions.append(
            FunctionInfo(
                name=str(f["name"]),
                args=_summary_args(f.get("args")),
                return_value=str(f.get("return", "none")),
                description=str(f.get("description", "")),
            )
        )
    return ClassSummary(element="", class_name=str(payload["class_name"]), variables=variables, functions=functions)


def parse_response(raw: str, expects_deltas: bool) -> ParsedResponse:
    """Split a model reply into code, summary, and element-tagged insertions.

    Repeated delta tags concatenate; a delta block in an element reply is
    rejected since elements may only write their own file.
    """
    blocks = _fenced_blocks(raw)
    code_blocks = [text for tag, text in blocks if tag == "code"]
    summary_blocks = [text for tag, text in blocks if tag == "summary"]
    if len(code_blocks) != 1:
        raise EngineError("missing-code-block", f"expected exactly one code block, got {len(code_blocks)}")
    if len(summary_blocks) != 1:
        raise EngineError("missing-summary-block", f"expected exactly one summary block, got {len(summary_blocks)}")
    try:
        payload = json.loads(summary_blocks[0])
    except ValueError as exc:
        raise EngineError("malformed-summary-json", f"summary block is not valid JSON: {exc}") from exc
    summary = summary_from_payload(payload)

    deltas: dict[str, dict[str, str]] = {}
    for tag, text in blocks:
        m = _DELTA_TAG_RE.match(tag)
        if not m:
            continue
        if not expects_deltas:
            raise EngineError("unexpected-delta", f"element replies may not carry {tag!r} blocks")
        name, section = m.group(1), m.group(2)
        slot = deltas.setdefault(name, {})
        slot[section] = (slot[section] + "\n" + text) if section in slot else text

    code = code_blocks[0]
    if code and not code.endswith("\n"):
        code += "\n"
    return ParsedResponse(code=code, summary=summary, deltas=deltas)


# -- marker repair ------------------------------------------------------------


def _class_open_index(lines: list[str]) -> int | None:
    for i, line in enumerate(lines):
        if _CLASS_RE.match(line):
            return i
    return None


def _class_close_index(lines: list[str], open_index: int) -> int | None:
    depth = 0
    for i in range(open_index, len(lines)):
        depth += lines[i].count("{") - lines[i].count("}")
        if depth <= 0 and i > open_index:
            return i
    return None


def repair_markers(code: str) -> str:
    """Best effort reconstruction of a broken marker set.

    Any pair that is not exactly one start and one end is dropped and
    re-inserted empty: the variable pair right after the constructor (or
    class) opening line, the function pair right before the class closing
    brace. Region content under a dropped pair stays in the file but is
    no longer part of any region.
    """
    lines = code.splitlines()
    counts = {m: sum(1 for ln in lines if ln.strip() == m) for m in MARKERS}
    var_ok = counts[VARIABLE_START] == 1 and counts[VARIABLE_END] == 1
    fn_ok = counts[FUNCTION_START] == 1 and counts[FUNCTION_END] == 1
    if var_ok and fn_ok:
        # counts fine but order broken: rebuild both pairs
        var_ok = fn_ok = False
    drop = set()
    if not var_ok:
        drop |= {VARIABLE_START, VARIABLE_END}
    if not fn_ok:
        drop |= {FUNCTION_START, FUNCTION_END}
    lines = [ln for ln in lines if ln.strip() not in drop]

    class_open = _class_open_index(lines)
    if class_open is None:
        raise EngineError("missing-markers", "cannot repair markers: no class declaration found")
    class_close = _class_close_index(lines, class_open)
    if class_close is None:
        raise EngineError("missing-markers", "cannot repair markers: unbalanced class braces")
    body_indent = _indent_of(lines[class_open]) + "    "

    if not fn_ok:
        lines[class_close:class_close] = [body_indent + FUNCTION_START, body_indent + FUNCTION_END]
    if not var_ok:
        anchor = class_open
        indent = body_indent
        for i in range(class_open + 1, len(lines)):
            if re.match(r"^\s*constructor\s*\(", lines[i]):
                anchor = i
                indent = _indent_of(lines[i]) + "    "
                break
        lines[anchor + 1 : anchor + 1] = [indent + VARIABLE_START, indent + VARIABLE_END]
    return "\n".join(lines) + "\n"


# -- static extraction --------------------------------------------------------


def extract_variables(code: str) -> list[VariableInfo]:
    """Variables declared in the variable region, one `this.<name> = <value>;`
    per line; a trailing // comment or the standalone // line just above
    becomes the description."""
    regions = locate_regions(code)
    out: list[VariableInfo] = []
    pending = ""
    for line in regions.variable_lines():
        cm = _COMMENT_RE.match(line)
        if cm:
            pending = cm.group(1).strip()
            continue
        m = _VARIABLE_RE.match(line)
        if m:
            name, value, comment = m.group(1), m.group(2).strip(), m.group(3)
            out.append(VariableInfo(name=name, initial_value=value, description=(comment or pending).strip()))
        pending = ""
    return out


@dataclass
class FunctionBlock:
    name: str
    args: list[str]
    comment_start: int  # first leading // line, == start when none
    start: int  # signature line index
    end: int  # closing brace line index, inclusive
    description: str
    returns_value: bool


def _function_blocks(lines: list[str], base: int = 0) -> list[FunctionBlock]:
    """Scan a line window for `name(args) { ... }` units with leading comments."""
    blocks: list[FunctionBlock] = []
    comments: list[tuple[int, str]] = []
    i = 0
    while i < len(lines):
        line = lines[i]
        cm = _COMMENT_RE.match(line)
        if cm:
            comments.append((i, cm.group(1).strip()))
            i += 1
            continue
        m = _SIGNATURE_RE.match(line)
        if m:
            depth = 0
            end = None
            for j in range(i, len(lines)):
                depth += lines[j].count("{") - lines[j].count("}")
                if depth <= 0:
                    end = j
                    break
            if end is None:
                break  # unbalanced tail; ignore the fragment
            body = lines[i : end + 1]
            returns_value = any(_RETURN_RE.match(b) for b in body)
            args = [a.strip() for a in m.group(2).split(",") if a.strip()]
            arg_names = [a.split("=")[0].strip() for a in args]
            comment_start = comments[0][0] if comments else i
            description = comments[0][1] if comments else ""
            blocks.append(
                FunctionBlock(
                    name=m.group(1),
                    args=arg_names,
                    comment_start=base + comment_start,
                    start=base + i,
                    end=base + end,
                    description=description,
                    returns_value=returns_value,
                )
            )
            comments = []
            i = end + 1
            continue
        if line.strip():
            comments = []
        i += 1
    return blocks


def extract_functions(code: str) -> list[FunctionInfo]:
    regions = locate_regions(code)
    out = []
    for b in _function_blocks(regions.function_lines(), base=regions.fn_start + 1):
        out.append(
            FunctionInfo(
                name=b.name,
                args=[(a, "") for a in b.args],
                return_value="value" if b.returns_value else "none",
                description=b.description,
            )
        )
    return out


def static_summary(element_name: str, code: str) -> ClassSummary:
    return ClassSummary(
        element="",
        class_name=element_name,
        variables=extract_variables(code),
        functions=extract_functions(code),
    )


def reconcile_summary(element_name: str, code: str, reported: ClassSummary) -> ClassSummary:
    """The code regions are the authority for names and values; the model's
    summary only contributes descriptions, arg hints, and return labels for
    entries that actually exist in the code."""
    merged = static_summary(element_name, code)
    for v in merged.variables:
        r = reported.get_variable(v.name)
        if r and r.description:
            v.description = r.description
    for f in merged.functions:
        r = reported.get_function(f.name)
        if r is None:
            continue
        hints = dict(r.args)
        f.args = [(n, hints.get(n, h)) for n, h in f.args]
        if r.return_value:
            f.return_value = r.return_value
        if r.description:
            f.description = r.description
    return merged


# -- merging ------------------------------------------------------------------


def merge_element_code(response_code: str, element_name: str, on_warning=None) -> str:
    """Accept a full replacement file for one element after validating the
    class name and marker integrity; a broken marker set is repaired once
    (with a warning) before rejection."""
    m = _CLASS_RE.search(response_code)
    if m is None:
        raise EngineError("class-name-mismatch", f"reply for {element_name!r} declares no class")
    if m.group(1) != element_name:
        raise EngineError(
            "class-name-mismatch",
            f"reply for {element_name!r} declares class {m.group(1)!r}",
        )
    code = response_code
    try:
        locate_regions(code)
    except EngineError:
        code = repair_markers(code)
        locate_regions(code)
        if on_warning:
            on_warning("marker-repair", f"markers for {element_name} were malformed and rebuilt")
    if not code.endswith("\n"):
        code += "\n"
    return code


@dataclass
class DeltaOutcome:
    """Result of applying central insertions to one element file."""

    code: str
    variables: list[VariableInfo] = field(default_factory=list)
    functions: list[FunctionInfo] = field(default_factory=list)
    changed: bool = False


def _parse_variable_delta(text: str, on_warning) -> list[tuple[str, str, str]]:
    """delta block -> [(name, line_text_stripped, description)]"""
    out: list[tuple[str, str, str]] = []
    pending = ""
    for line in text.splitlines():
        if not line.strip():
            pending = ""
            continue
        cm = _COMMENT_RE.match(line)
        if cm:
            pending = cm.group(1).strip()
            continue
        m = _VARIABLE_RE.match(line)
        if m is None:
            if on_warning:
                on_warning("delta-skip", f"unparseable variable line skipped: {line.strip()!r}")
            pending = ""
            continue
        name, comment = m.group(1), m.group(3)
        out.append((name, line.strip(), (comment or pending).strip()))
        pending = ""
    return out


def _reindent(unit_lines: list[str], indent: str) -> list[str]:
    nonempty = [ln for ln in unit_lines if ln.strip()]
    if not nonempty:
        return []
    base = min(len(_indent_of(ln)) for ln in nonempty)
    return [indent + ln[base:] if ln.strip() else "" for ln in unit_lines]


def apply_element_deltas(
    code: str,
    variables_text: str | None,
    functions_text: str | None,
    ledger: dict[str, dict[str, str]],
    on_warning=None,
) -> DeltaOutcome:
    """Insert central-requested variables and functions into an element file.

    A name the central inserted before is replaced in place; a name the
    element already owns is left alone (warning). New variables land at the
    end of the variable region, new functions at the end of the function
    region. The ledger records inserted text per name so a later pass can
    tell its own insertions from the element's own code.
    """
    outcome = DeltaOutcome(code=code)
    var_ledger = ledger.setdefault("variables", {})
    fn_ledger = ledger.setdefault("functions", {})

    for name, line_text, description in _parse_variable_delta(variables_text or "", on_warning):
        regions = locate_regions(outcome.code)
        indent = _indent_of(regions.lines[regions.var_start])
        existing = None
        for i in range(regions.var_start + 1, regions.var_end):
            m = _VARIABLE_RE.match(regions.lines[i])
            if m and m.group(1) == name:
                existing = i
                break
        lines = regions.lines
        if existing is not None and name not in var_ledger:
            if on_warning:
                on_warning("delta-conflict", f"variable {name!r} already owned by the element; insertion skipped")
            continue
        if existing is not None:
            lines[existing] = indent + line_text
        else:
            lines[regions.var_end:regions.var_end] = [indent + line_text]
        var_ledger[name] = line_text
        outcome.code = "\n".join(lines) + "\n"
        outcome.changed = True
        m = _VARIABLE_RE.match(indent + line_text)
        outcome.variables.append(
            VariableInfo(name=name, initial_value=m.group(2).strip(), description=description)
        )

    for unit in _split_function_units(functions_text or ""):
        blocks = _function_blocks(unit)
        if not blocks:
            if on_warning:
                on_warning("delta-skip", "unparseable function unit skipped")
            continue
        block = blocks[0]
        regions = locate_regions(outcome.code)
        indent = _indent_of(regions.lines[regions.fn_start])
        existing = None
        for b in _function_blocks(regions.function_lines(), base=regions.fn_start + 1):
            if b.name == block.name:
                existing = b
                break
        lines = regions.lines
        unit_lines = _reindent(unit, indent)
        if existing is not None and block.name not in fn_ledger:
            if on_warning:
                on_warning(
                    "delta-conflict",
                    f"function {block.name!r} already owned by the element; insertion skipped",
                )
            continue
        if existing is not None:
            lines[existing.comment_start : existing.end + 1] = unit_lines
        else:
            lines[regions.fn_end:regions.fn_end] = unit_lines
        fn_ledger[block.name] = "\n".join(unit)
        outcome.code = "\n".join(lines) + "\n"
        outcome.changed = True
        outcome.functions.append(
            FunctionInfo(
                name=block.name,
                args=[(a, "") for a in block.args],
                return_value="value" if block.returns_value else "none",
                description=block.description,
            )
        )
    return outcome


def _split_function_units(text: str) -> list[list[str]]:
    """Split a functions delta block into units of leading comments plus one
    brace-balanced definition."""
    lines = text.splitlines()
    units: list[list[str]] = []
    current: list[str] = []
    depth = 0
    in_fn = False
    for line in lines:
        if not in_fn:
            if not line.strip():
                if current and all(_COMMENT_RE.match(ln) for ln in current):
                    current = []  # orphan comments before a blank line
                continue
            current.append(line)
            if _SIGNATURE_RE.match(line):
                in_fn = True
                depth = line.count("{") - line.count("}")
                if depth <= 0:
                    units.append(current)
                    current = []
                    in_fn = False
        else:
            current.append(line)
            depth += line.count("{") - line.count("}")
            if depth <= 0:
                units.append(current)
                current = []
                in_fn = False
    if current and any(_SIGNATURE_RE.match(ln) for ln in current):
        units.append(current)
    return units


def prune_stale_ledger(code: str, ledger: dict[str, dict[str, str]]) -> list[str]:
    """After an element regenerates its own file, forget inserted names the
    new file no longer contains. Returns the dropped names."""
    dropped = []
    names_in_code = {v.name for v in extract_variables(code)}
    for name in list(ledger.get("variables", {})):
        if name not in names_in_code:
            del ledger["variables"][name]
            dropped.append(name)
    fn_names = {f.name for f in extract_functions(code)}
    for name in list(ledger.get("functions", {})):
        if name not in fn_names:
            del ledger["functions"][name]
            dropped.append(name)
    return dropped


def rewrite_variable(code: str, name: str, new_literal: str) -> str:
    """Replace the literal of one variable-region line, keeping indentation
    and any trailing comment. Exactly one line of the file changes."""
    regions = locate_regions(code)
    lines = regions.lines
    for i in range(regions.var_start + 1, regions.var_end):
        m = _VARIABLE_RE.match(lines[i])
        if m and m.group(1) == name:
            comment = m.group(3)
            suffix = f" // {comment}" if comment else ""
            lines[i] = f"{_indent_of(lines[i])}this.{name} = {new_literal};{suffix}"
            return "\n".join(lines) + "\n"
    raise EngineError("unknown-variable", f"no variable {name!r} in the variable region")


# -- transform sync -----------------------------------------------------------


def sync_transform(code: str, transform: Transform) -> tuple[str, list[str]]:
    """Rewrite the right-hand side of the four transform lines in the
    variable region; at most those four lines change."""
    values = {
        "x": transform.x,
        "y": transform.y,
        "rotationDeg": transform.rotation,
        "scale": transform.scale,
    }
    regions = locate_regions(code)
    lines = regions.lines
    changed: list[str] = []
    for i in range(regions.var_start + 1, regions.var_end):
        m = _VARIABLE_RE.match(lines[i])
        if not m or m.group(1) not in values:
            continue
        name, comment = m.group(1), m.group(3)
        new_value = format_number(values[name])
        if m.group(2).strip() == new_value:
            continue
        suffix = f" // {comment}" if comment else ""
        lines[i] = f"{_indent_of(lines[i])}this.{name} = {new_value};{suffix}"
        changed.append(name)
    return "\n".join(lines) + "\n", changed
