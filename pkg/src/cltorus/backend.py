"""Backend selection: compiled event loop when available, pure Python otherwise.

The compiled core (`cltorus._core`, Cython) and the interpreted fallback
(`cltorus._pyloop`) implement the same draw protocol and produce bit-identical
trajectories.  Selection order: the ``backend=`` argument, then the
CLTORUS_BACKEND environment variable ("c" | "python" | "auto"), then whatever
is importable.
"""

from __future__ import annotations

import os

from . import _pyloop

try:
    from . import _core
except ImportError:  # pure-Python install
    _core = None

_ENV_VAR = "CLTORUS_BACKEND"


def available_backends() -> tuple[str, ...]:
    return ("c", "python") if _core is not None else ("python",)


def resolve_backend(name: str | None = None) -> str:
    """Resolve a backend request to "c" or "python"."""
    if name is None:
        name = os.environ.get(_ENV_VAR, "auto").strip().lower() or "auto"
    name = name.lower()
    if name == "auto":
        return "c" if _core is not None else "python"
    if name == "c":
        if _core is None:
            raise RuntimeError("compiled backend requested but cltorus._core is not built")
        return "c"
    if name == "python":
        return "python"
    raise ValueError(f"unknown backend {name!r} (expected 'c', 'python' or 'auto')")


def event_loop(name: str | None = None):
    """The run_event_loop callable for the resolved backend."""
    resolved = resolve_backend(name)
    if resolved == "c":
        return _core.run_event_loop
    return _pyloop.run_event_loop
