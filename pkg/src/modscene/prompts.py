"""Prompt assembly: framework selection, proxy expansion, and the
four-part generation prompts.

Prompts are built from immutable snapshots (element name, current code
body, live proxy set, compiled context) and render to a single request
message with a fixed section order: Task, Requirement, Reference Code
Template, Context (central only), Output Format.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EngineError
from .scene import GraphicalProxy

PHASER = "phaser"
P5JS = "p5js"
FRAMEWORKS = (PHASER, P5JS)
DEFAULT_FRAMEWORK = P5JS

FRAMEWORK_LABEL = {PHASER: "Phaser", P5JS: "p5.js"}

# Keyword tables for framework selection; overridable via EngineConfig.
# A tie (hits on both sides) resolves to phaser; no hit falls back to p5js.
PHASER_KEYWORDS = ("game", "platformer", "player", "level", "enemy", "score")
P5JS_KEYWORDS = ("creative coding", "animation", "illustration", "particles", "demo")

_LABEL_TOKEN = re.compile(r"\b([PLCR]\d+)\b")


@dataclass
class PromptEnvelope:
    task: str
    requirement: str
    reference_template: str
    output_format: str
    context: str | None = None  # present iff the module is central

    def render(self) -> str:
        """Serialize to the single request message, fixed section order."""
        parts = [
            "Task:\n" + self.task,
            "Requirement:\n" + self.requirement,
            "Reference Code Template:\n" + self.reference_template,
        ]
        if self.context is not None:
            parts.append("Context:\n" + self.context)
        parts.append("Output Format:\n" + self.output_format)
        return "\n\n".join(parts)


def _hits(description: str, keywords: tuple[str, ...]) -> int:
    text = description.lower()
    count = 0
    for kw in keywords:
        if " " in kw:
            if kw in text:
                count += 1
        elif re.search(rf"\b{re.escape(kw)}\b", text):
            count += 1
    return count


def classify_framework(
    description: str,
    phaser_keywords: tuple[str, ...] = PHASER_KEYWORDS,
    p5js_keywords: tuple[str, ...] = P5JS_KEYWORDS,
) -> str:
    """Map a project description to a framework id.

    Game-intent keywords pick phaser, creative-coding keywords pick p5js;
    ties go to phaser and no match falls back to the p5js default.
    """
    if _hits(description, phaser_keywords):
        return PHASER
    if _hits(description, p5js_keywords):
        return P5JS
    return DEFAULT_FRAMEWORK


def expand_proxies(text: str, proxies: dict[str, GraphicalProxy]) -> str:
    """Append a geometry data block for every proxy label referenced in text.

    The user's original characters are never altered; one line per
    referenced proxy is appended after the text, in first-mention order:
    ``LABEL kind: (x1,y1) (x2,y2) ...`` with integer-rounded coordinates.
    A referenced label with no live proxy is an error; live proxies that
    are not referenced are not included.
    """
    seen: list[str] = []
    for match in _LABEL_TOKEN.finditer(text):
        label = match.group(1)
        if label not in seen:
            seen.append(label)
    if not seen:
        return text
    lines = []
    for label in seen:
        proxy = proxies.get(label)
        if proxy is None:
            raise EngineError("unknown-proxy-label", f"prompt references {label!r} but no such proxy is live")
        coords = " ".join(f"({int(round(x))},{int(round(y))})" for x, y in proxy.geometry)
        lines.append(f"{label} {proxy.kind}: {coords}")
    return text + "\n\n" + "\n".join(lines)


# -- prompt text ------------------------------------------------------------

_ELEMENT_RULES = (
    "Keep every behavior of this element inside its own class; "
    "do not define or modify code for any other element."
)

_CENTRAL_RULES = (
    "The central code may only instantiate the element classes and call their functions. "
    "Any new variable or function an element needs must be emitted as an element-tagged "
    "insertion block, never defined inline in the central code."
)

_CONTRACT_COMMON = """Reply with fenced blocks only, in the order given, and no prose outside them.

First, exactly one block tagged `code` holding the complete updated file.

Second, exactly one block tagged `summary` holding one JSON object of this shape:
{"class_name": "...",
 "variables": [{"name": "...", "initial_value": "...", "description": "..."}],
 "functions": [{"name": "...", "args": [{"name": "...", "hint": "..."}],
                "return": "...", "description": "..."}]}"""

_CONTRACT_ELEMENT = _CONTRACT_COMMON + """

The code block must keep these four marker lines exactly, each alone on its own line:
//variable start
//variable end
//function start
//function end
Keep the transform lines (this.x, this.y, this.rotationDeg, this.scale) inside the
variable region. Declare every tunable numeric property as `this.<name> = <number>;`
on its own line inside the variable region, and define every method inside the
function region. The summary must list every variable in the variable region and
every function in the function region."""

_CONTRACT_CENTRAL = _CONTRACT_COMMON + """

Use "central" as the class_name and leave variables and functions empty.

After the summary block, emit one insertion block per element that needs new code:
a block tagged `insert:<ElementName>:variables` holding `this.<name> = <number>;`
lines (a trailing // comment describes the variable), and a block tagged
`insert:<ElementName>:functions` holding complete method definitions (a leading
// comment line describes the function). Emit no insertion blocks when no element
needs new code. The central code itself must only instantiate element classes and
call their functions."""


def element_system_message(element_name: str, framework: str, template_body: str) -> str:
    label = FRAMEWORK_LABEL[framework]
    return (
        f'You are the dedicated code module for the scene element "{element_name}".\n'
        f"You maintain one {label} class named {element_name} and refine it across turns; "
        f'pronouns like "it" in the user\'s requests refer to this element.\n'
        f"{_ELEMENT_RULES}\n\n"
        f"Current class template:\n{template_body}"
    )


def central_system_message() -> str:
    return (
        "You are the central module of a 2D interactive scene: you instantiate the "
        "element classes, wire user input, and script interactions among elements.\n"
        "The first project description you receive fixes the target framework for the "
        "whole project.\n" + _CENTRAL_RULES
    )


def build_element_prompt(
    element_name: str,
    framework: str | None,
    effect: str,
    reference_template: str,
    proxies: dict[str, GraphicalProxy],
) -> PromptEnvelope:
    if framework is None:
        raise EngineError("framework-unselected", "select a framework (first central description) before element prompts")
    label = FRAMEWORK_LABEL[framework]
    expanded = expand_proxies(effect, proxies)
    return PromptEnvelope(
        task=f'Update the class "{element_name}" for this {label} scene so the element behaves as requested.',
        requirement=f"{expanded}\n\n{_ELEMENT_RULES}",
        reference_template=reference_template,
        output_format=_CONTRACT_ELEMENT,
    )


def build_central_prompt(
    framework: str | None,
    effect: str,
    reference_template: str,
    context_text: str,
    proxies: dict[str, GraphicalProxy],
) -> PromptEnvelope:
    if framework is None:
        raise EngineError("framework-unselected", "no framework selected for this project yet")
    label = FRAMEWORK_LABEL[framework]
    expanded = expand_proxies(effect, proxies)
    return PromptEnvelope(
        task=(
            f"Update the central coordination code of this {label} scene: instantiate the "
            "element classes and script the requested behavior and interactions."
        ),
        requirement=f"{expanded}\n\n{_CENTRAL_RULES}",
        reference_template=reference_template,
        output_format=_CONTRACT_CENTRAL,
        context=context_text,
    )
