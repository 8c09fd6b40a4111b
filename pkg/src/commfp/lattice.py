"""Integer lattices of the fidelity random walk and their volumes."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .arch import RANK_GUARD, CircuitArchitecture, gf2_rowspace, validate
from .errors import RankDeficient, SizeViolation
from .spectrum import DifferenceDistribution


@dataclass(frozen=True)
class IntegerLattice:
    """Full-rank sublattice of Z^N given by its row-style Hermite normal form."""

    N: int
    hnf: tuple[tuple[int, ...], ...]
    volume: int

    def contains(self, vec: Sequence[int]) -> bool:
        v = [int(x) for x in vec]
        for j in range(self.N):
            if v[j] == 0:
                continue
            row = self.hnf[j]
            q, rem = divmod(v[j], row[j])
            if rem:
                return False
            for c in range(j, self.N):
                v[c] -= q * row[c]
        return True


def lattice_from_generators(rows) -> IntegerLattice:
    """Lattice spanned over the integers by ``rows`` (must have full rank)."""
    rows = list(rows) if not isinstance(rows, np.ndarray) else rows
    if len(rows) == 0:
        raise RankDeficient("no generators")
    N = len(rows[0])
    basis = kernels.hnf(rows, N)
    missing = [j for j in range(N) if basis[j] is None]
    if missing:
        raise RankDeficient(
            f"generators span a space of dimension {N - len(missing)} < {N}"
            " (linearly dependent Hamiltonians)"
        )
    hnf = tuple(tuple(int(x) for x in row) for row in basis)
    volume = math.prod(hnf[j][j] for j in range(N))
    return IntegerLattice(N=N, hnf=hnf, volume=volume)


def walk_lattice(diff: DifferenceDistribution) -> IntegerLattice:
    """Lattice generated by the increment support of the walk."""
    return lattice_from_generators(diff.deltas)


def reduced_lattice_pauli(arch: CircuitArchitecture, *, rank_guard: int = RANK_GUARD) -> IntegerLattice:
    """Integer span of the GF(2) row space of A, viewed as 0/1 vectors.

    The walk lattice is exactly twice this lattice.
    """
    rs = gf2_rowspace(arch.A, rank_guard=rank_guard)
    return lattice_from_generators(rs.vectors.astype(np.int64))


def pauli_walk_lattice(arch: CircuitArchitecture, *, rank_guard: int = RANK_GUARD) -> IntegerLattice:
    half = reduced_lattice_pauli(arch, rank_guard=rank_guard)
    hnf = tuple(tuple(2 * x for x in row) for row in half.hnf)
    return IntegerLattice(N=half.N, hnf=hnf, volume=half.volume << half.N)


def lattice_volume_pauli(arch: CircuitArchitecture, *, rank_guard: int = RANK_GUARD) -> tuple[int, int]:
    """``(V_U, v_U)`` with ``V_U = 2**N * v_U``."""
    v = reduced_lattice_pauli(arch, rank_guard=rank_guard).volume
    return v << arch.N, v


@dataclass(frozen=True)
class VolumeBounds:
    v_min: int
    lower: int
    upper: float
    v_max: int
    upper_squared: int  # (N + 1) ** (N + 1), for exact comparisons

    def holds(self, V: int) -> bool:
        return self.lower <= V and V * V <= self.upper_squared

    def to_dict(self) -> dict:
        return {
            "V_min": self.v_min,
            "lower": self.lower,
            "upper": self.upper,
            "V_max": self.v_max,
        }


def volume_bounds(n: int, N: int) -> VolumeBounds:
    if not n <= N <= (1 << n) - 1:
        raise SizeViolation(f"need n <= N <= 2^n - 1, got n={n}, N={N}")
    return VolumeBounds(
        v_min=1 << n,
        lower=1 << N,
        upper=float(N + 1) ** ((N + 1) / 2),
        v_max=(1 << n) ** (1 << (n - 1)),
        upper_squared=(N + 1) ** (N + 1),
    )


# ---------------------------------------------------------------------------
# Cross-check through minors of the Sylvester Hadamard matrix (small n only).


def sylvester_hadamard(n: int) -> np.ndarray:
    H = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        H = np.block([[H, H], [H, -H]])
    return H


def integer_det(M) -> int:
    """Exact determinant via Bareiss fraction-free elimination."""
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if p is None:
                return 0
            A[k], A[p] = A[p], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


@dataclass(frozen=True)
class MinorCheck:
    minor_gcd: int  # gcd of all N x N minors of the row-space matrix
    min_minor: int  # smallest nonzero |minor|
    hadamard_rows: tuple[int, ...]  # row indices of H_{2^n} forming the minor
    hadamard_cols: tuple[int, ...]
    hadamard_minor: int  # |det| of that (N+1) x (N+1) submatrix
    subsets_examined: int


def hadamard_minor_check(arch: CircuitArchitecture, *, max_subsets: int = 2_000_000) -> MinorCheck:
    """Recover the volume from Hadamard minors by exhaustive row selection.

    Enumerates N-subsets of nonzero row-space vectors, records the gcd and
    the least nonzero |det|, and rebuilds the bordered Hadamard submatrix
    from a minimising subset.
    """
    validate(arch)
    rs = gf2_rowspace(arch.A)
    vecs = [v for v in rs.vectors.astype(np.int64) if v.any()]
    total = math.comb(len(vecs), arch.N)
    if total > max_subsets:
        raise SizeViolation(f"{total} row subsets exceed max_subsets={max_subsets}")
    g, best, best_rows = 0, None, None
    for combo in itertools.combinations(range(len(vecs)), arch.N):
        d = abs(integer_det([vecs[i] for i in combo]))
        if d == 0:
            continue
        g = math.gcd(g, d)
        if best is None or d < best:
            best, best_rows = d, combo
    if best is None:
        raise RankDeficient("row space does not have full integer rank")
    # locate the chosen row-space vectors as basis states x of K = 1 - 2 (U A mod 2)
    cols = (0,) + tuple(arch.columns)
    H = sylvester_hadamard(arch.n)
    K = H[:, list(arch.columns)]
    xs = [0]
    for i in best_rows:
        target = 1 - 2 * vecs[i]
        xs.append(int(np.flatnonzero((K == target).all(axis=1))[0]))
    sub = H[np.ix_(xs, list(cols))]
    return MinorCheck(
        minor_gcd=g,
        min_minor=best,
        hadamard_rows=tuple(xs),
        hadamard_cols=cols,
        hadamard_minor=abs(integer_det(sub)),
        subsets_examined=total,
    )
