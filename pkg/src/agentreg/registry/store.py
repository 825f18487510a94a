"""Append-only event log with periodic snapshots.

Each line of the log file is one JSON event ``{"seq", "type", "payload"}``.
A write is flushed and fsynced before it is acknowledged. Snapshots hold the
derived state at some ``seq`` so a restart replays only the tail.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path


class EventStore:
    def __init__(self, path: str | Path | None = None, snapshot_every: int = 0):
        self.path = Path(path) if path else None
        self.snapshot_every = snapshot_every
        self.events: list[dict] = []
        self._lock = threading.Lock()
        if self.path and self.path.exists():
            with self.path.open() as fh:
                self.events = [json.loads(line) for line in fh if line.strip()]

    @property
    def snapshot_path(self) -> Path | None:
        return self.path.with_suffix(self.path.suffix + ".snapshot") if self.path else None

    def append(self, kind: str, payload: dict) -> dict:
        with self._lock:
            event = {"seq": len(self.events) + 1, "type": kind, "payload": payload}
            if self.path:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a") as fh:
                    fh.write(json.dumps(event, sort_keys=True) + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            self.events.append(event)
            return event

    def due_for_snapshot(self) -> bool:
        return bool(self.path and self.snapshot_every and len(self.events) % self.snapshot_every == 0)

    def write_snapshot(self, seq: int, state: dict, digest: str) -> None:
        if not self.snapshot_path:
            return
        tmp = self.snapshot_path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"seq": seq, "digest": digest, "state": state}, sort_keys=True))
        os.replace(tmp, self.snapshot_path)

    def read_snapshot(self) -> dict | None:
        if self.snapshot_path and self.snapshot_path.exists():
            return json.loads(self.snapshot_path.read_text())
        return None
