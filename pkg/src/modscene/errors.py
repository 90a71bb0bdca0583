"""Engine error model.

Every failure the engine can report carries a stable machine code (the
same code string the HTTP layer returns in ApiError bodies and the CLI
prints), a human message, and optional structured detail.
"""

from __future__ import annotations

from typing import Any


class EngineError(Exception):
    """Base error for all engine operations.

    Args:
        code: stable machine code, e.g. "duplicate-name".
        message: human-readable description.
        detail: optional structured payload for clients.
    """

    def __init__(self, code: str, message: str, detail: Any = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.detail = detail

    def to_dict(self) -> dict:
        body = {"code": self.code, "message": self.message}
        if self.detail is not None:
            body["detail"] = self.detail
        return body


# HTTP status for each machine code.  Codes not listed map to 500.
HTTP_STATUS = {
    "duplicate-name": 409,
    "invalid-identifier": 400,
    "missing-asset": 400,
    "unknown-element": 404,
    "invalid-transform": 400,
    "bad-geometry-cardinality": 400,
    "unknown-label": 404,
    "duplicate-session": 409,
    "unknown-module": 404,
    "name-mismatch": 400,
    "unknown-proxy-label": 400,
    "framework-unselected": 409,
    "already-selected": 409,
    "invalid-code-unit": 400,
    "class-name-mismatch": 400,
    "missing-markers": 400,
    "unknown-element-in-delta": 400,
    "transform-anchor-missing": 400,
    "unknown-variable": 404,
    "out-of-range": 400,
    "missing-code-block": 502,
    "missing-summary-block": 502,
    "malformed-summary-json": 502,
    "unexpected-delta": 502,
    "backend-unreachable": 502,
    "fixture-exhausted": 502,
    "auth-failure": 502,
    "io-failure": 500,
    "version-mismatch": 400,
    "corrupt-file": 400,
    "port-in-use": 500,
    "usage-error": 400,
}


def http_status(code: str) -> int:
    return HTTP_STATUS.get(code, 500)
