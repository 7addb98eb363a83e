"""Pick the compiled kernels when they import, else the numpy fallback."""

from __future__ import annotations

from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - exercised only without a build
    _ckernels = None

_active: ModuleType = _ckernels if _ckernels is not None else _pykernels


def available() -> list[str]:
    names = ["python"]
    if _ckernels is not None:
        names.insert(0, "compiled")
    return names


def name() -> str:
    return "compiled" if _active is _ckernels else "python"


def use(which: str) -> None:
    """Switch the active kernel set (``"compiled"`` or ``"python"``)."""
    global _active
    if which == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built")
        _active = _ckernels
    elif which == "python":
        _active = _pykernels
    else:
        raise ValueError(f"unknown backend {which!r}")


def kernels() -> ModuleType:
    return _active


def pair_gaps(bases, pi, pj):
    if bases.shape[2] > 2:
        return _pykernels.pair_gaps(bases, pi, pj)
    return _active.pair_gaps(bases, pi, pj)
