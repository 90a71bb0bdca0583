"""Module registry: one conversation session per element module plus central.

A module id is either an element id or the literal "central".  Each session
is an ordered record list: message records ({"role", "content"}) begin with
the installed system message and then alternate user/assistant; prompt-audit
records (no "role" key) may be interleaved for traceability and are ignored
when replaying the transcript.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EngineError

CENTRAL = "central"


@dataclass
class Message:
    role: str  # system | user | assistant
    content: str

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content}


@dataclass
class ModuleSession:
    module: str
    created_at: int  # logical engine tick, not wall clock
    records: list[dict] = field(default_factory=list)

    @property
    def messages(self) -> list[Message]:
        return [Message(r["role"], r["content"]) for r in self.records if "role" in r]

    def append_message(self, role: str, content: str) -> None:
        self.records.append({"role": role, "content": content})

    def append_audit(self, kind: str, content: str) -> None:
        self.records.append({"audit": kind, "content": content})

    @property
    def exchange_count(self) -> int:
        """Number of non-system messages (user+assistant)."""
        return sum(1 for r in self.records if r.get("role") in ("user", "assistant"))


class ModuleRegistry:
    def __init__(self):
        self.sessions: dict[str, ModuleSession] = {}
        self.archived: dict[str, ModuleSession] = {}

    def open_module(self, module: str, system_message: str, tick: int) -> ModuleSession:
        if module in self.sessions:
            raise EngineError("duplicate-session", f"module {module!r} already has a session")
        session = ModuleSession(module=module, created_at=tick)
        session.append_message("system", system_message)
        self.sessions[module] = session
        return session

    def get(self, module: str) -> ModuleSession:
        try:
            return self.sessions[module]
        except KeyError:
            raise EngineError("unknown-module", f"no session for module {module!r}") from None

    def route_prompt(self, selection: str, text: str) -> str:
        """Return the module that will receive this generation request.

        Element-module text is passed through untouched; the dedicated
        session supplies the referents for any pronouns in it.
        """
        self.get(selection)
        return selection

    def append_exchange(self, module: str, user: str, assistant: str) -> ModuleSession:
        session = self.get(module)
        session.append_message("user", user)
        session.append_message("assistant", assistant)
        return session

    def reset_system_message(self, module: str, system_message: str) -> None:
        """Replace the system message of a session that has no exchanges yet."""
        session = self.get(module)
        if session.exchange_count:
            return
        for record in session.records:
            if record.get("role") == "system":
                record["content"] = system_message
                return

    def archive(self, module: str) -> None:
        session = self.sessions.pop(module, None)
        if session is not None:
            self.archived[module] = session

    def live_count(self) -> int:
        return len(self.sessions)

    def request_messages(self, module: str, rendered_prompt: str, cap: int) -> list[Message]:
        """History window for a generation request.

        Full session history plus the new prompt, truncated oldest-first to
        ``cap`` messages with the system message always retained.
        """
        session = self.get(module)
        messages = session.messages + [Message("user", rendered_prompt)]
        if cap and len(messages) > cap:
            messages = [messages[0]] + messages[-(cap - 1):]
        return messages
