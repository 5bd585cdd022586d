"""Shared fixtures: real HTTP servers for client-facing tests."""

import socket
import threading
import time

import httpx
import pytest
import uvicorn

from openml_lite.server import create_app, ensure_admin
from openml_lite.store import Registry


def _free_port() -> int:
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    return port


@pytest.fixture(scope="session")
def server_factory(tmp_path_factory):
    """Start uvicorn instances on private registries; all stop at session end."""
    running = []

    def start(name: str = "server-store") -> dict:
        root = tmp_path_factory.mktemp(name)
        registry = Registry(root)
        admin_key = ensure_admin(registry)
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
                httpx.get(url + "/api/v1/tasktypes", timeout=1.0)
                break
            except httpx.HTTPError:
                time.sleep(0.02)
        else:
            raise RuntimeError("server did not come up")
        running.append((server, thread))
        return {"url": url, "key": admin_key, "registry": registry, "root": root}

    yield start
    for server, thread in running:
        server.should_exit = True
        thread.join(timeout=5)


@pytest.fixture(scope="session")
def live_server(server_factory):
    """One shared instance for tests that only need some server."""
    return server_factory("shared-store")
