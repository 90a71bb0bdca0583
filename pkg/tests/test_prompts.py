import pytest

from modscene.errors import EngineError
from modscene.prompts import (
    PromptEnvelope,
    build_central_prompt,
    build_element_prompt,
    central_system_message,
    classify_framework,
    element_system_message,
    expand_proxies,
)
from modscene.scene import GraphicalProxy


def proxy(kind, label, geometry):
    return GraphicalProxy(kind=kind, label=label, geometry=geometry)


def test_classifier_on_the_canonical_descriptions():
    assert classify_framework("I want to make a platform game") == "phaser"
    assert classify_framework("make a creative coding project") == "p5js"


def test_classifier_defaults_and_tie_break():
    assert classify_framework("") == "p5js"
    assert classify_framework("something abstract") == "p5js"
    # both vocabularies hit: game intent wins the tie
    assert classify_framework("a game with particles") == "phaser"


def test_classifier_respects_word_boundaries():
    assert classify_framework("update the scoreboard styling") == "p5js"  # no bare "score"
    assert classify_framework("track the score") == "phaser"
    assert classify_framework("an Animation of rain") == "p5js"  # case-insensitive


def test_expand_proxies_appends_data_block_without_touching_text():
    proxies = {
        "P1": proxy("point", "P1", [(100.4, 200.6)]),
        "L1": proxy("line", "L1", [(0, 0), (10, 10)]),
    }
    text = "move from P1 along L1, then back to P1"
    expanded = expand_proxies(text, proxies)
    assert expanded.startswith(text + "\n\n")
    tail = expanded[len(text) + 2 :]
    # first-mention order, one line each, coordinates rounded to integers
    assert tail.splitlines() == ["P1 point: (100,201)", "L1 line: (0,0) (10,10)"]


def test_expand_proxies_ignores_text_without_labels():
    assert expand_proxies("just swim around", {}) == "just swim around"


def test_expand_proxies_rejects_unknown_label():
    with pytest.raises(EngineError) as err:
        expand_proxies("go to P7", {})
    assert err.value.code == "unknown-proxy-label"


def test_envelope_renders_sections_in_fixed_order():
    envelope = PromptEnvelope(
        task="T", requirement="R", reference_template="REF", output_format="OF", context="CTX"
    )
    rendered = envelope.render()
    positions = [rendered.index(h) for h in ("Task:", "Requirement:", "Reference Code Template:", "Context:", "Output Format:")]
    assert positions == sorted(positions)
    no_context = PromptEnvelope(task="T", requirement="R", reference_template="REF", output_format="OF")
    assert "Context:" not in no_context.render()


def test_element_prompt_carries_expansion_and_template():
    proxies = {"P1": proxy("point", "P1", [(100, 200)])}
    envelope = build_element_prompt("Fish", "p5js", "swim to P1", "class Fish {}", proxies)
    assert "P1 point: (100,200)" in envelope.requirement
    assert envelope.reference_template == "class Fish {}"
    assert envelope.context is None
    assert "Fish" in envelope.task and "p5.js" in envelope.task


def test_central_prompt_includes_context_and_delta_contract():
    envelope = build_central_prompt("phaser", "wire the fish", "// central", "Scene context:\nclass Fish", {})
    assert envelope.context.startswith("Scene context:")
    assert "insert:<ElementName>:variables" in envelope.output_format
    assert "instantiate" in envelope.output_format


def test_prompts_require_a_selected_framework():
    with pytest.raises(EngineError) as err:
        build_element_prompt("Fish", None, "swim", "class Fish {}", {})
    assert err.value.code == "framework-unselected"
    with pytest.raises(EngineError):
        build_central_prompt(None, "x", "", "", {})


def test_system_messages_state_the_rules():
    msg = element_system_message("Fish", "p5js", "class Fish { TEMPLATE }")
    assert "class Fish { TEMPLATE }" in msg
    assert "Fish" in msg and "do not define or modify code for any other element" in msg
    central = central_system_message()
    assert "instantiate" in central and "call" in central


def test_element_output_format_pins_the_marker_lines():
    envelope = build_element_prompt("Fish", "p5js", "swim", "class Fish {}", {})
    for marker in ("//variable start", "//variable end", "//function start", "//function end"):
        assert marker in envelope.output_format
