"""Flat content-addressed JSON store.

Keys are sha256 digests of the canonical JSON of (kind, inputs, version);
values are JSON documents.  Entries are never rewritten once present, and
writes go through a temporary file and an atomic rename.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from . import ALGORITHM_VERSION


def cache_key(kind: str, inputs, version: str = ALGORITHM_VERSION) -> str:
    blob = json.dumps({"kind": kind, "inputs": inputs, "version": version},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class CacheEntry:
    key: str
    kind: str
    version: str
    value: object
    created_at: float


class Cache:
    def __init__(self, root):
        self.root = Path(root)

    def _path(self, key):
        return self.root / key[:2] / f"{key}.json"

    def get(self, kind, inputs):
        key = cache_key(kind, inputs)
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (FileNotFoundError, json.JSONDecodeError):
            return None
        if data.get("key") != key or data.get("version") != ALGORITHM_VERSION:
            return None
        return CacheEntry(key, data["kind"], data["version"], data["value"], data["created_at"])

    def put(self, kind, inputs, value) -> CacheEntry:
        key = cache_key(kind, inputs)
        path = self._path(key)
        existing = self.get(kind, inputs)
        if existing is not None:
            return existing
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = CacheEntry(key, kind, ALGORITHM_VERSION, value, time.time())
        doc = {"key": key, "kind": kind, "version": entry.version,
               "inputs": inputs, "value": value, "created_at": entry.created_at}
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return entry

    def memo(self, kind, inputs, compute):
        """Return the cached value for (kind, inputs), computing and storing it on a miss."""
        hit = self.get(kind, inputs)
        if hit is not None:
            return hit.value
        value = compute()
        self.put(kind, inputs, value)
        return value


class NullCache:
    def get(self, kind, inputs):
        return None

    def put(self, kind, inputs, value):
        return None

    def memo(self, kind, inputs, compute):
        return compute()
