"""Starts `ens serve`, probes an unknown session and stops it with SIGINT."""

import json
import os
import signal
import socket
import subprocess
import sys
import tempfile
import time
import urllib.error
import urllib.request


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def request(url, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(url, data=data, headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=5) as res:
            return res.status, json.loads(res.read() or b"{}")
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read() or b"{}")


def main():
    binary, sample = sys.argv[1], sys.argv[2]
    port = free_port()
    with tempfile.TemporaryDirectory() as work:
        proc = subprocess.Popen(
            [binary, "serve", "--labeled", os.path.join(sample, "dialogues.jsonl"),
             "--scenarios", os.path.join(sample, "scenarios.jsonl"),
             "--sessions-dir", os.path.join(work, "sessions"), "--addr", f"127.0.0.1:{port}"],
            cwd=work)
        base = f"http://127.0.0.1:{port}"
        try:
            for _ in range(200):
                try:
                    status, _ = request(base + "/sessions/unknown")
                    break
                except (urllib.error.URLError, ConnectionError):
                    time.sleep(0.05)
            else:
                raise SystemExit("service did not come up")
            assert status == 404, status
            status, body = request(base + "/sessions", {"scenario_id": "scn-sample-001", "policy_id": "mock"})
            assert status == 200, (status, body)
            sid = body["session_id"]
            status, body = request(f"{base}/sessions/{sid}/turns", {"utterance": "I want a better salary."})
            assert status == 200, (status, body)
            assert all(body["rationale"][k] for k in ("EM", "ET", "IA", "PS", "MT", "SS", "SR", "RG"))
        finally:
            proc.send_signal(signal.SIGINT)
            code = proc.wait(timeout=10)
        assert code == 0, f"exit code {code}"
        log = os.path.join(work, "sessions", "sessions", f"{sid}.jsonl")
        events = [json.loads(line) for line in open(log)]
        assert [e["type"] for e in events] == ["created", "turn"], events
    print("serve probe ok")


if __name__ == "__main__":
    main()
