import pytest
from hypothesis import given
from hypothesis import strategies as st

from modscene.errors import EngineError
from modscene.integrator import apply_element_deltas, instantiate_template
from modscene.sliders import anchor_range, apply_slider, build_manifest

FISH = instantiate_template("p5js", "Fish")


def seeded(*lines):
    """Template plus the given variable lines merged into the variable region."""
    return apply_element_deltas(FISH, "\n".join(lines), None, {}).code


@given(st.floats(min_value=0.001, max_value=1e6, allow_nan=False))
def test_positive_values_anchor_to_zero_to_double(value):
    low, high = anchor_range(value)
    assert low == 0.0
    assert high == pytest.approx(2 * value)


@given(st.floats(min_value=-1e6, max_value=-0.001, allow_nan=False))
def test_negative_values_anchor_to_double_to_zero(value):
    low, high = anchor_range(value)
    assert low == pytest.approx(2 * value)
    assert high == 0.0


def test_zero_anchors_to_unit_interval():
    assert anchor_range(0) == (-1.0, 1.0)
    assert anchor_range(0.0) == (-1.0, 1.0)


def test_manifest_lists_numerics_and_skips_transform_anchors():
    code = seeded("this.speed = 200; // cruising pace", 'this.label = "hi";', "this.bias = -4;")
    rows = build_manifest(code, {})
    names = [row["name"] for row in rows]
    assert names == ["speed", "bias"]  # region order, no x/y/rotationDeg/scale, no strings


def test_manifest_row_shape_follows_the_hundredth_step_rule():
    ranges = {}
    rows = build_manifest(seeded("this.speed = 200;"), ranges)
    (row,) = rows
    assert row["min"] == 0 and row["max"] == 400
    assert row["step"] == pytest.approx((row["max"] - row["min"]) / 100)
    assert row["value"] == 200
    assert ranges["speed"] == (0.0, 400.0)


def test_manifest_keeps_anchored_range_while_value_stays_inside():
    ranges = {"speed": (0.0, 400.0)}
    rows = build_manifest(seeded("this.speed = 250;"), ranges)
    assert rows[0]["min"] == 0 and rows[0]["max"] == 400
    assert rows[0]["value"] == 250


def test_manifest_reanchors_when_value_escapes():
    ranges = {"speed": (0.0, 400.0)}
    rows = build_manifest(seeded("this.speed = 900;"), ranges)
    assert (rows[0]["min"], rows[0]["max"]) == (0.0, 1800.0)
    assert ranges["speed"] == (0.0, 1800.0)


def test_manifest_drops_ranges_for_vanished_variables():
    ranges = {"ghost": (0.0, 2.0)}
    build_manifest(seeded("this.speed = 1;"), ranges)
    assert "ghost" not in ranges and "speed" in ranges


def test_manifest_carries_descriptions_from_comments():
    rows = build_manifest(seeded("this.speed = 200; // cruising pace"), {})
    assert rows[0]["description"] == "cruising pace"


def test_apply_rewrites_exactly_one_line():
    code = seeded("this.speed = 200;", "this.bias = -4;")
    ranges = {}
    build_manifest(code, ranges)
    updated = apply_slider(code, ranges, "speed", 250)
    changed = [
        (a, b) for a, b in zip(code.splitlines(), updated.splitlines()) if a != b
    ]
    assert changed == [("        this.speed = 200;", "        this.speed = 250;")]
    assert len(code.splitlines()) == len(updated.splitlines())


def test_apply_keeps_the_anchored_range_stable():
    code = seeded("this.speed = 200;")
    ranges = {}
    build_manifest(code, ranges)
    updated = apply_slider(code, ranges, "speed", 250)
    rows = build_manifest(updated, ranges)
    assert (rows[0]["min"], rows[0]["max"]) == (0.0, 400.0)
    assert rows[0]["value"] == 250


def test_apply_rejects_values_outside_the_range():
    code = seeded("this.speed = 200;")
    ranges = {}
    build_manifest(code, ranges)
    with pytest.raises(EngineError) as err:
        apply_slider(code, ranges, "speed", 401)
    assert err.value.code == "out-of-range"


@pytest.mark.parametrize("name", ["x", "y", "rotationDeg", "scale", "missing"])
def test_apply_rejects_anchors_and_unknowns(name):
    code = seeded("this.speed = 200;")
    ranges = {}
    build_manifest(code, ranges)
    with pytest.raises(EngineError) as err:
        apply_slider(code, ranges, name, 0.5)
    assert err.value.code == "unknown-variable"


def test_apply_preserves_trailing_comments():
    code = seeded("this.speed = 200; // cruising pace")
    ranges = {}
    build_manifest(code, ranges)
    updated = apply_slider(code, ranges, "speed", 100)
    assert "this.speed = 100; // cruising pace" in updated
