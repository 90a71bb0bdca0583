import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from modscene.backend import (
    DEFAULT_MODEL,
    ENV_KEY,
    ENV_MODEL,
    ENV_URL,
    CompletionRequest,
    LiveBackend,
    MockBackend,
    live_backend_from_env,
)
from modscene.errors import EngineError


def test_mock_backend_replays_per_module_sequences(tmp_path):
    (tmp_path / "central-0.txt").write_text("first central")
    (tmp_path / "central-1.txt").write_text("second central")
    (tmp_path / "Fish-0.txt").write_text("fish reply")
    backend = MockBackend(tmp_path)
    assert backend.complete(CompletionRequest("central")) == "first central"
    assert backend.complete(CompletionRequest("Fish")) == "fish reply"
    assert backend.complete(CompletionRequest("central")) == "second central"


def test_mock_backend_reports_exhaustion(tmp_path):
    (tmp_path / "Fish-0.txt").write_text("only one")
    backend = MockBackend(tmp_path)
    backend.complete(CompletionRequest("Fish"))
    with pytest.raises(EngineError) as err:
        backend.complete(CompletionRequest("Fish"))
    assert err.value.code == "fixture-exhausted"
    assert "Fish-1.txt" in err.value.message


class StubHandler(BaseHTTPRequestHandler):
    """Scriptable chat endpoint: pops one (status, body) per request."""

    script = []
    seen = []

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length)) if length else {}
        type(self).seen.append({"body": body, "auth": self.headers.get("Authorization")})
        status, reply = type(self).script.pop(0)
        data = json.dumps(reply).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    StubHandler.script = []
    StubHandler.seen = []
    server = HTTPServer(("127.0.0.1", 0), StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/v1/chat/completions"
    server.shutdown()
    server.server_close()


def chat_reply(text):
    return {"choices": [{"message": {"role": "assistant", "content": text}}]}


def test_live_backend_round_trip(stub_server):
    StubHandler.script = [(200, chat_reply("hello there"))]
    backend = LiveBackend(stub_server, model="test-model", api_key="sk-secret")
    request = CompletionRequest("central", [{"role": "user", "content": "hi"}], model="test-model")
    assert backend.complete(request) == "hello there"
    sent = StubHandler.seen[0]
    assert sent["auth"] == "Bearer sk-secret"
    assert sent["body"]["model"] == "test-model"
    assert sent["body"]["messages"] == [{"role": "user", "content": "hi"}]


def test_live_backend_retries_5xx_then_succeeds(stub_server):
    StubHandler.script = [(500, {"error": "busy"}), (200, chat_reply("recovered"))]
    backend = LiveBackend(stub_server, retries=2, backoff=0.01)
    assert backend.complete(CompletionRequest("central")) == "recovered"
    assert len(StubHandler.seen) == 2


def test_live_backend_gives_up_after_retry_budget(stub_server):
    StubHandler.script = [(503, {}), (503, {}), (503, {})]
    backend = LiveBackend(stub_server, retries=2, backoff=0.01)
    with pytest.raises(EngineError) as err:
        backend.complete(CompletionRequest("central"))
    assert err.value.code == "backend-unreachable"
    assert len(StubHandler.seen) == 3  # initial try + 2 retries


def test_live_backend_auth_failure_never_retries(stub_server):
    StubHandler.script = [(401, {"error": "bad key"})]
    backend = LiveBackend(stub_server, retries=3, backoff=0.01)
    with pytest.raises(EngineError) as err:
        backend.complete(CompletionRequest("central"))
    assert err.value.code == "auth-failure"
    assert len(StubHandler.seen) == 1


def test_live_backend_rejects_malformed_reply(stub_server):
    StubHandler.script = [(200, {"choices": []})]
    backend = LiveBackend(stub_server, retries=0)
    with pytest.raises(EngineError) as err:
        backend.complete(CompletionRequest("central"))
    assert err.value.code == "backend-unreachable"


def test_live_backend_connection_refused_is_unreachable():
    backend = LiveBackend("http://127.0.0.1:9", retries=1, backoff=0.01, timeout=0.5)
    with pytest.raises(EngineError) as err:
        backend.complete(CompletionRequest("central"))
    assert err.value.code == "backend-unreachable"


def test_env_factory_requires_the_url(monkeypatch):
    monkeypatch.delenv(ENV_URL, raising=False)
    with pytest.raises(EngineError) as err:
        live_backend_from_env()
    assert err.value.code == "backend-unreachable"


def test_env_factory_reads_the_triplet(monkeypatch):
    monkeypatch.setenv(ENV_URL, "http://example.invalid/v1")
    monkeypatch.setenv(ENV_MODEL, "custom-model")
    monkeypatch.setenv(ENV_KEY, "sk-test")
    backend = live_backend_from_env(retries=1)
    assert backend.url == "http://example.invalid/v1"
    assert backend.model == "custom-model"
    assert backend.api_key == "sk-test"
    assert backend.retries == 1
    monkeypatch.delenv(ENV_MODEL)
    assert live_backend_from_env().model == DEFAULT_MODEL
