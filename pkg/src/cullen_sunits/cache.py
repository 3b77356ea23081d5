"""Content-addressed JSON cache for expensive results.

Keys hash the command name, its canonical parameters and a code version tag,
so editing any module invalidates every entry.
"""

from __future__ import annotations

import hashlib
import json
import os
from functools import lru_cache
from pathlib import Path

DEFAULT_DIR = Path.home() / ".cache" / "cullen_sunits"


@lru_cache(maxsize=None)
def code_version() -> str:
    here = Path(__file__).parent
    h = hashlib.sha256()
    for path in sorted(here.glob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:16]


def resolve_dir(cli_value: str | None = None) -> Path:
    """CACHE_DIR in the environment wins over --cache-dir, which wins over the default."""
    env = os.environ.get("CACHE_DIR")
    return Path(env or cli_value or DEFAULT_DIR)


class Cache:
    def __init__(self, directory, enabled: bool = True):
        self.directory = Path(directory)
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def key(self, command: str, params: dict) -> str:
        blob = json.dumps({"cmd": command, "params": params, "code": code_version()},
                          sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def path(self, command: str, params: dict) -> Path:
        return self.directory / f"{command}-{self.key(command, params)[:32]}.json"

    def get(self, command: str, params: dict):
        if not self.enabled:
            return None
        path = self.path(command, params)
        try:
            with open(path) as fh:
                value = json.load(fh)
        except (OSError, ValueError):
            self.misses += 1
            return None
        self.hits += 1
        return value

    def put(self, command: str, params: dict, value) -> None:
        if not self.enabled:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path(command, params)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w") as fh:
            json.dump(value, fh, sort_keys=True)
        os.replace(tmp, path)

    def invalidate(self, command: str, params: dict) -> None:
        try:
            self.path(command, params).unlink()
        except FileNotFoundError:
            pass

    def cached(self, command: str, params: dict, compute):
        """Return the cached JSON value or compute, store and return it."""
        value = self.get(command, params)
        if value is None:
            value = compute()
            self.put(command, params, value)
        return value
