"""Engine event stream.

All committed mutations emit JSON-serializable event records
``{"seq": n, "type": t, "payload": {...}}`` in commit order.  Subscribers
(SSE connections, tests) each get their own queue; delivery within a live
subscription is at-least-once and there is no replay for late joiners.
"""

from __future__ import annotations

import json
import queue
import threading


class Subscription:
    """One subscriber's view of the stream."""

    def __init__(self, bus: "EventBus"):
        self._bus = bus
        self.queue: "queue.Queue[dict | None]" = queue.Queue()
        self.closed = False

    def get(self, timeout: float | None = None) -> dict | None:
        """Next event, or None on timeout / after close."""
        try:
            return self.queue.get(timeout=timeout)
        except queue.Empty:
            return None

    def close(self) -> None:
        self.closed = True
        self._bus._drop(self)
        self.queue.put(None)


class EventBus:
    def __init__(self):
        self._lock = threading.Lock()
        self._subs: list[Subscription] = []
        self._seq = 0
        self.history: list[dict] = []

    def emit(self, type_: str, payload: dict) -> dict:
        """Record an event and fan it out to live subscribers."""
        with self._lock:
            self._seq += 1
            event = {"seq": self._seq, "type": type_, "payload": payload}
            self.history.append(event)
            subs = list(self._subs)
        for sub in subs:
            if not sub.closed:
                sub.queue.put(event)
        return event

    def subscribe(self) -> Subscription:
        sub = Subscription(self)
        with self._lock:
            self._subs.append(sub)
        return sub

    def _drop(self, sub: Subscription) -> None:
        with self._lock:
            if sub in self._subs:
                self._subs.remove(sub)


def event_json(event: dict) -> str:
    return json.dumps(event, ensure_ascii=False, sort_keys=True)
