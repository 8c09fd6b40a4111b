"""Pure-Python / numpy implementations of the hot kernels.

These are the reference versions. The compiled module ``_kernels`` must
produce identical results (bit-for-bit for the floating-point kernel).
"""
from __future__ import annotations

import numpy as np


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) > 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _reduce_row(row: list[int], basis: list, start: int, N: int) -> None:
    for k in range(start, N):
        piv = basis[k]
        if piv is None or row[k] == 0:
            continue
        q = row[k] // piv[k]
        if q:
            for c in range(k, N):
                row[c] -= q * piv[c]


def hnf_insert(gens, N: int) -> list:
    """Row-style Hermite normal form of the integer span of ``gens``.

    Returns a list of ``N`` rows; ``rows[j]`` is ``None`` when no generator
    has a pivot in column ``j`` (the span is rank deficient).
    """
    basis: list = [None] * N
    for g in gens:
        v = [int(x) for x in g]
        j = 0
        while j < N:
            if v[j] == 0:
                j += 1
                continue
            row = basis[j]
            if row is None:
                if v[j] < 0:
                    v = [-x for x in v]
                _reduce_row(v, basis, j + 1, N)
                basis[j] = v
                break
            a, b = row[j], v[j]
            if b % a == 0:
                q = b // a
                for c in range(j, N):
                    v[c] -= q * row[c]
            else:
                g_, x, y = xgcd(a, b)
                ag, bg = a // g_, b // g_
                new_row = [0] * N
                for c in range(j, N):
                    r_c, v_c = row[c], v[c]
                    new_row[c] = x * r_c + y * v_c
                    v[c] = ag * v_c - bg * r_c
                _reduce_row(new_row, basis, j + 1, N)
                basis[j] = new_row
            j += 1
    finalize_hnf(basis, N)
    return basis


def finalize_hnf(basis: list, N: int) -> None:
    """Reduce entries above each pivot into ``[0, pivot)``."""
    for j in range(N):
        piv = basis[j]
        if piv is None:
            continue
        d = piv[j]
        for i in range(j):
            row = basis[i]
            if row is None:
                continue
            q = row[j] // d
            if q:
                for c in range(j, N):
                    row[c] -= q * piv[c]


def sis_paths(
    deltas: np.ndarray,
    p_true: np.ndarray,
    p_sorted: np.ndarray,
    cum_true: np.ndarray,
    cum_sorted: np.ndarray,
    uniforms: np.ndarray,
    absorbing: bool,
    zero_index: int,
) -> np.ndarray:
    """Weighted return indicators ``w * 1[W_t = 0]`` for a block of paths.

    ``uniforms`` has one row per path and one column per step. At each
    step after the first, increments are ranked by ``(d . W, index)`` and
    the i-th ranked increment gets proposal mass ``p_sorted[i]``.
    """
    m, t = uniforms.shape
    L, N = deltas.shape
    last = L - 1
    idx = np.minimum(np.searchsorted(cum_true, uniforms[:, 0], side="right"), last)
    W = deltas[idx].copy()
    w = np.ones(m, dtype=np.float64)
    lidx = np.arange(L, dtype=np.int64)
    for s in range(1, t):
        at_zero = ~W.any(axis=1)
        if absorbing:
            active = ~at_zero
            w[at_zero] = w[at_zero] * p_true[zero_index]
        else:
            active = np.ones(m, dtype=bool)
        if not active.any():
            continue
        Wa = W[active]
        keys = (Wa @ deltas.T) * L + lidx[None, :]
        rank = np.minimum(np.searchsorted(cum_sorted, uniforms[active, s], side="right"), last)
        order = np.argsort(keys, axis=1)
        chosen = order[np.arange(Wa.shape[0]), rank]
        w[active] = w[active] * (p_true[chosen] / p_sorted[rank])
        W[active] = Wa + deltas[chosen]
    hit = ~W.any(axis=1)
    out = np.where(hit, w, 0.0)
    return out
