"""Kernel selection: compiled ``_core`` when importable, else ``_fallback``.

Set ``ORRW_BACKEND=python`` to force the fallback.
"""

import os

from . import _fallback

kernels = _fallback
if os.environ.get("ORRW_BACKEND", "").lower() != "python":
    try:
        from . import _core as kernels  # noqa: F811
    except ImportError:
        kernels = _fallback

BACKEND = kernels.NAME


def available():
    """Names of every backend that can be imported here."""
    names = [_fallback.NAME]
    try:
        from . import _core
    except ImportError:
        return names
    return [_core.NAME] + names


def get(name=None):
    if name is None:
        return kernels
    if name == _fallback.NAME:
        return _fallback
    if name == "cython":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
