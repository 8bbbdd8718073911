"""Kernel selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise
the pure-Python ``_pykernels`` module. Set ``FPG_PURE_PYTHON=1`` to force
the fallback.
"""

import os

from . import _pykernels

if os.environ.get("FPG_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

IMPLEMENTATION = _impl.IMPLEMENTATION
free_reduce = _impl.free_reduce
trace = _impl.trace
coset_enumerate = _impl.coset_enumerate
sub_multiple = _impl.sub_multiple
combine = _impl.combine
code_to_col = _pykernels.code_to_col


def available():
    """Names of importable kernel implementations."""
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return names
    return names + ["cython"]


def get(name):
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel implementation {name!r}")
