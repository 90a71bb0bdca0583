"""Parameter sliders over the numeric variables of an element.

Every numeric literal in the variable region except the transform lines
(x, y, rotationDeg, scale) is adjustable. Ranges anchor to the value the
variable had when it first appeared: positive v spans [0, 2v], negative v
spans [2v, 0], zero spans [-1, 1], step is a hundredth of the span.
Adjusting within the range never moves the range; a merge that pushes the
value outside its range re-anchors it.
"""

from __future__ import annotations

from .errors import EngineError
from .integrator import (
    TRANSFORM_ANCHORS,
    extract_variables,
    format_number,
    is_numeric_literal,
    rewrite_variable,
)


def anchor_range(value: float) -> tuple[float, float]:
    if value > 0:
        return 0.0, 2.0 * value
    if value < 0:
        return 2.0 * value, 0.0
    return -1.0, 1.0


def build_manifest(code: str, ranges: dict[str, tuple[float, float]]) -> list[dict]:
    """Slider rows for one element's current code.

    ``ranges`` is this element's persistent range store and is kept in
    sync: new names are anchored, names gone from the code are dropped,
    values that escaped their range are re-anchored.
    """
    rows = []
    live: set[str] = set()
    for var in extract_variables(code):
        if var.name in TRANSFORM_ANCHORS or not is_numeric_literal(var.initial_value):
            continue
        value = float(var.initial_value)
        live.add(var.name)
        held = ranges.get(var.name)
        if held is None or not held[0] <= value <= held[1]:
            ranges[var.name] = anchor_range(value)
        lo, hi = ranges[var.name]
        rows.append(
            {
                "name": var.name,
                "value": value,
                "min": lo,
                "max": hi,
                "step": (hi - lo) / 100.0,
                "description": var.description,
            }
        )
    for stale in [n for n in ranges if n not in live]:
        del ranges[stale]
    return rows


def apply_slider(code: str, ranges: dict[str, tuple[float, float]], name: str, value: float) -> str:
    """Write one slider value back into the code; exactly one line changes."""
    if name in TRANSFORM_ANCHORS:
        raise EngineError("unknown-variable", f"{name!r} is transform-owned, not a slider")
    current = {v.name: v for v in extract_variables(code)}
    var = current.get(name)
    if var is None or not is_numeric_literal(var.initial_value):
        raise EngineError("unknown-variable", f"no numeric variable {name!r} to adjust")
    held = ranges.get(name)
    if held is None:
        held = anchor_range(float(var.initial_value))
        ranges[name] = held
    lo, hi = held
    if not lo <= value <= hi:
        raise EngineError("out-of-range", f"{name}={value} outside [{lo}, {hi}]")
    return rewrite_variable(code, name, format_number(value))
