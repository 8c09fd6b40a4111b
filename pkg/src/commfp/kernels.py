"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback in :mod:`commfp._pykernels` runs. Both give identical results, so
the choice only affects speed. :func:`use_backend` switches explicitly
(benchmarks and the equivalence tests use it).
"""
from __future__ import annotations

import contextlib

import numpy as np

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_active = "compiled" if _compiled is not None else "python"


def compiled_available() -> bool:
    return _compiled is not None


def backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in ("compiled", "python"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "compiled" and _compiled is None:
        raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
    _active = name


@contextlib.contextmanager
def use_backend(name: str):
    prev = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def hnf(gens, N: int) -> list:
    """HNF rows of the span of ``gens`` (``None`` for pivot-free columns).

    The compiled path runs in checked int64 and drops to exact Python
    integers on overflow.
    """
    if _active == "compiled" and len(gens):
        arr = np.asarray(gens)
        if arr.dtype != object and np.abs(arr).max() < (1 << 62):
            try:
                basis, present = _compiled.hnf_int64(arr.astype(np.int64))
            except OverflowError:
                pass
            else:
                return [
                    [int(x) for x in basis[j]] if present[j] else None for j in range(N)
                ]
    return _pykernels.hnf_insert(gens, N)


def sis_paths(deltas, p_true, p_sorted, cum_true, cum_sorted, uniforms, absorbing, zero_index):
    impl = _compiled if _active == "compiled" else _pykernels
    return impl.sis_paths(
        deltas, p_true, p_sorted, cum_true, cum_sorted, uniforms, bool(absorbing), int(zero_index)
    )
