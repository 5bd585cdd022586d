"""One live server per test session, seeded over HTTP like a real deployment."""

import socket
import threading
import time

import httpx
import pytest
import uvicorn

from openml_lite.server import create_app, ensure_admin
from openml_lite.store import Registry


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="session")
def live_server(tmp_path_factory):
    root = tmp_path_factory.mktemp("sdk-store")
    registry = Registry(root)
    key = ensure_admin(registry)
    port = _free_port()
    config = uvicorn.Config(
        create_app(registry), host="127.0.0.1", port=port, log_level="warning"
    )
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()

    url = f"http://127.0.0.1:{port}"
    deadline = time.time() + 10
    while time.time() < deadline:
        try:
            httpx.get(f"{url}/api/v1/tasktypes", timeout=1.0)
            break
        except httpx.TransportError:
            time.sleep(0.05)
    else:
        raise RuntimeError("server did not come up")

    yield {"url": url, "key": key, "registry": registry}
    server.should_exit = True
    thread.join(timeout=5)
