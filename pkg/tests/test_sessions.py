import pytest

from modscene.errors import EngineError
from modscene.sessions import ModuleRegistry


def test_open_get_and_duplicate():
    reg = ModuleRegistry()
    reg.open_module("Fish", "you are the fish module", tick=3)
    assert reg.get("Fish").created_at == 3
    with pytest.raises(EngineError) as err:
        reg.open_module("Fish", "again", tick=4)
    assert err.value.code == "duplicate-session"
    with pytest.raises(EngineError) as err:
        reg.get("Crab")
    assert err.value.code == "unknown-module"


def test_audit_records_are_not_conversation_messages():
    reg = ModuleRegistry()
    session = reg.open_module("Fish", "system text", tick=0)
    session.append_audit("request", "raw user words")
    reg.append_exchange("Fish", "rendered prompt", "model reply")
    roles = [m.role for m in session.messages]
    assert roles == ["system", "user", "assistant"]
    assert session.exchange_count == 2
    assert any(r.get("audit") == "request" for r in session.records)


def test_request_messages_caps_history_keeping_system_and_recency():
    reg = ModuleRegistry()
    session = reg.open_module("Fish", "system text", tick=0)
    for i in range(30):
        reg.append_exchange("Fish", f"u{i}", f"a{i}")
    # 1 system + 60 exchange messages + 1 new prompt, cap 40
    window = reg.request_messages("Fish", "new prompt", cap=40)
    assert len(window) == 40
    assert window[0].role == "system"
    # everything after the system message is the newest tail, oldest dropped first
    full = [m.content for m in session.messages[1:]] + ["new prompt"]
    assert [m.content for m in window[1:]] == full[-39:]
    assert session.exchange_count == 60  # the stored transcript is never truncated


def test_request_messages_without_cap_pressure():
    reg = ModuleRegistry()
    reg.open_module("Fish", "system text", tick=0)
    reg.append_exchange("Fish", "u0", "a0")
    window = reg.request_messages("Fish", "next", cap=40)
    assert [m.content for m in window] == ["system text", "u0", "a0", "next"]


def test_reset_system_message_only_before_first_exchange():
    reg = ModuleRegistry()
    session = reg.open_module("Fish", "old system", tick=0)
    reg.reset_system_message("Fish", "new system")
    assert session.messages[0].content == "new system"
    reg.append_exchange("Fish", "u", "a")
    reg.reset_system_message("Fish", "too late")
    assert session.messages[0].content == "new system"


def test_archive_removes_from_live_set():
    reg = ModuleRegistry()
    reg.open_module("Fish", "s", tick=0)
    reg.archive("Fish")
    assert reg.live_count() == 0
    assert "Fish" in reg.archived
    with pytest.raises(EngineError):
        reg.get("Fish")


def test_route_prompt_passes_text_through():
    reg = ModuleRegistry()
    reg.open_module("Fish", "s", tick=0)
    assert reg.route_prompt("Fish", "make it swim") == "Fish"
    with pytest.raises(EngineError):
        reg.route_prompt("Crab", "nope")
