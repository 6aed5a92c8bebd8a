"""Process-wide cap on internal worker threads.

Resolution order: explicit set_thread_cap() (the CLI's --threads flag), the
URNLAB_THREADS environment variable, else 1.  Consumers must produce results
independent of the cap; it only bounds parallelism.
"""
from __future__ import annotations

import os

_override: int | None = None


def set_thread_cap(n: int | None) -> None:
    global _override
    if n is not None and n < 1:
        raise ValueError("thread cap must be >= 1")
    _override = n


def thread_cap() -> int:
    if _override is not None:
        return _override
    env = os.environ.get("URNLAB_THREADS", "").strip()
    if env:
        try:
            value = int(env)
        except ValueError:
            return 1
        if value >= 1:
            return value
    return 1
