#!/usr/bin/env python3
"""Drive a live session over HTTP, the way the chat UI does.

Starts `querycore serve` as a subprocess on a local port, opens a session
on the built-in s2 demo catalog, answers the first query with yes and
accepts the item the server proposes next. Plain stdlib HTTP on purpose:
the wire format is four small JSON bodies.
"""

from __future__ import annotations

import json
import subprocess
import sys
import time
import urllib.error
import urllib.request

PORT = 8377
BASE = f"http://127.0.0.1:{PORT}/v1"


def call(method: str, path: str, payload: dict | None = None) -> dict:
    data = json.dumps(payload).encode() if payload is not None else None
    req = urllib.request.Request(
        BASE + path, data=data, method=method,
        headers={"content-type": "application/json"},
    )
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read())


def wait_for_server(deadline: float = 10.0) -> None:
    t0 = time.time()
    while time.time() - t0 < deadline:
        try:
            call("GET", "/healthz")
            return
        except (urllib.error.URLError, ConnectionError):
            time.sleep(0.1)
    raise SystemExit("server did not come up")


def describe(query: dict) -> str:
    kind = query["kind"]
    if kind == "item":
        return f"how about item {query['item']}?"
    if kind == "attribute":
        return f"which {query['attr']} do you want?"
    if kind == "value":
        return f"{query['attr']} = {query['value']}?"
    return f"{query['attr']} >= {query['threshold']}?"


def main() -> None:
    server = subprocess.Popen(
        [sys.executable, "-m", "querycore.cli", "serve", "--port", str(PORT), "--no-ui"],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        wait_for_server()

        session = call("POST", "/sessions", {
            "catalog_id": "s2", "policy": "core", "mode": "value", "k_max": 5,
        })
        sid = session["session_id"]
        print("server asks:", describe(session["first_query"]))

        step = call("POST", f"/sessions/{sid}/answers", {"kind": "yes"})
        print("you answer:  yes")
        print("server asks:", describe(step["pending_query"]))

        step = call("POST", f"/sessions/{sid}/answers", {"kind": "yes"})
        print("you answer:  yes")
        outcome = step["outcome"]
        print(f"outcome:     {outcome['status']}, item {outcome['success_item']} "
              f"at turn {outcome['success_turn']}")
    finally:
        server.terminate()
        server.wait(timeout=10)


if __name__ == "__main__":
    main()
