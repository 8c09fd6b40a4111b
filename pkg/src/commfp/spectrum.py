"""Wave-vector spectra and the law of the fidelity increments.

A :class:`Spectrum` is the law of the random wave vector ``K`` whose
characteristic function is the circuit expectation. Exact spectra store
masses as integer weights over a shared power-of-two denominator
(``mass = weight / 2**denom_exp``); float spectra store plain float masses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arch import RANK_GUARD, CircuitArchitecture, gf2_rowspace
from .errors import (
    DependentHamiltonians,
    InputError,
    NotNormalized,
    ResourceLimitError,
    TooManyQubits,
)

NORMALIZATION_TOL = 1e-12
MAX_K_QUBITS = 14
MAX_DIFFERENCE_PAIRS = 10**7


def lex_order(rows: np.ndarray) -> np.ndarray:
    """Permutation sorting integer rows lexicographically."""
    if rows.shape[0] == 0:
        return np.arange(0)
    return np.lexsort(rows.T[::-1])


def _is_power_of_two(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def _group_rows(rows: np.ndarray, weights) -> tuple[np.ndarray, np.ndarray]:
    """Merge identical rows, summing weights; output rows sorted lexicographically."""
    uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    weights = np.asarray(weights)
    if weights.dtype == object:
        order = np.argsort(inverse, kind="stable")
        starts = np.flatnonzero(np.r_[True, np.diff(inverse[order]) != 0])
        summed = np.add.reduceat(weights[order], starts)
    else:
        summed = np.bincount(inverse, weights=weights, minlength=uniq.shape[0])
    uniq = uniq.astype(np.int64)
    order = lex_order(uniq)
    return uniq[order], summed[order]


@dataclass(frozen=True, eq=False)
class Spectrum:
    omega: np.ndarray  # (L, N) int64, rows sorted lexicographically
    weights: np.ndarray  # object ints (exact) or float64
    denom_exp: int | None  # exact mode iff not None
    mean: np.ndarray = field(repr=False)
    covariance: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.omega.shape[1]

    @property
    def size(self) -> int:
        return self.omega.shape[0]

    @property
    def exact(self) -> bool:
        return self.denom_exp is not None

    @property
    def masses(self) -> list:
        if self.exact:
            d = 1 << self.denom_exp
            return [Fraction(int(w), d) for w in self.weights]
        return [float(w) for w in self.weights]

    def float_masses(self) -> np.ndarray:
        if self.exact:
            return np.array([float(m) for m in self.masses])
        return np.asarray(self.weights, dtype=float)

    def max_abs_entry(self) -> int:
        return int(np.abs(self.omega).max()) if self.omega.size else 0

    def det_covariance(self):
        """det Var(K); a Fraction in exact mode."""
        if self.exact:
            return fraction_det(self.covariance)
        return float(np.linalg.det(np.asarray(self.covariance, dtype=float)))

    def same_as(self, other: "Spectrum") -> bool:
        """Exact structural equality (rows, masses, moments)."""
        return (
            self.exact == other.exact
            and np.array_equal(self.omega, other.omega)
            and self.masses == other.masses
            and np.array_equal(self.mean, other.mean)
            and np.array_equal(self.covariance, other.covariance)
        )


def fraction_det(M) -> Fraction:
    """Determinant by Gaussian elimination over the rationals."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for i in range(n):
        p = next((r for r in range(i, n) if A[r][i] != 0), None)
        if p is None:
            return Fraction(0)
        if p != i:
            A[i], A[p] = A[p], A[i]
            det = -det
        det *= A[i][i]
        for r in range(i + 1, n):
            f = A[r][i] / A[i][i]
            if f:
                for c in range(i, n):
                    A[r][c] -= f * A[i][c]
    return det


def integer_rank(rows) -> int:
    """Rank over the rationals of an integer matrix (fraction-free elimination)."""
    M = [[int(x) for x in row] for row in rows]
    if not M:
        return 0
    ncols = len(M[0])
    rank = 0
    for c in range(ncols):
        p = next((r for r in range(rank, len(M)) if M[r][c] != 0), None)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        piv = M[rank]
        for r in range(rank + 1, len(M)):
            a = M[r][c]
            if a:
                M[r] = [piv[c] * x - a * y for x, y in zip(M[r], piv)]
        rank += 1
        if rank == len(M):
            break
    return rank


def _moments(omega: np.ndarray, weights, denom_exp):
    N = omega.shape[1]
    if denom_exp is not None:
        d = 1 << denom_exp
        om = omega.astype(object)
        w = np.asarray(weights, dtype=object)
        mean = np.array([Fraction(int(s), d) for s in om.T @ w], dtype=object)
        second = (om.T * w) @ om
        cov = np.empty((N, N), dtype=object)
        for i in range(N):
            for j in range(N):
                cov[i, j] = Fraction(int(second[i, j]), d) - mean[i] * mean[j]
        return mean, cov
    w = np.asarray(weights, dtype=float)
    om = omega.astype(float)
    mean = om.T @ w
    cov = (om.T * w) @ om - np.outer(mean, mean)
    return mean, cov


def _reduce_dyadic(weights, denom_exp: int):
    """Cancel common factors of two between the weights and the denominator."""
    g = 0
    for w in weights:
        g = math.gcd(g, int(w))
    shift = min(denom_exp, (g & -g).bit_length() - 1) if g else 0
    if shift:
        weights = np.array([int(w) >> shift for w in weights], dtype=object)
    return weights, denom_exp - shift


def _make_spectrum(rows: np.ndarray, weights, denom_exp) -> Spectrum:
    omega, summed = _group_rows(rows, weights)
    keep = np.array([w > 0 for w in summed], dtype=bool)
    omega = omega[keep]
    summed = summed[keep]
    if denom_exp is not None:
        summed, denom_exp = _reduce_dyadic(summed, denom_exp)
    mean, cov = _moments(omega, summed, denom_exp)
    return Spectrum(omega=omega, weights=summed, denom_exp=denom_exp, mean=mean, covariance=cov)


def build_spectrum_pauli(arch: CircuitArchitecture, *, rank_guard: int = RANK_GUARD) -> Spectrum:
    """Uniform law on ``1 - 2 * row_GF2(A)`` for the all-plus base state."""
    rs = gf2_rowspace(arch.A, rank_guard=rank_guard)
    omega = 1 - 2 * rs.vectors.astype(np.int64)
    order = lex_order(omega)
    omega = omega[order]
    weights = np.ones(omega.shape[0], dtype=object)
    mean, cov = _moments(omega, weights, rs.r)
    if any(m != 0 for m in mean) or not np.array_equal(cov, np.eye(arch.N, dtype=int).astype(object)):
        raise AssertionError("Pauli spectrum moments deviate from (0, I)")
    return Spectrum(omega=omega, weights=weights, denom_exp=rs.r, mean=mean, covariance=cov)


def full_k_matrix(arch: CircuitArchitecture, *, max_qubits: int = MAX_K_QUBITS) -> np.ndarray:
    """Eigenvalue table: row x holds the N eigenvalues at basis state x."""
    if arch.n > max_qubits:
        raise TooManyQubits(f"n={arch.n} exceeds the {max_qubits}-qubit limit for the full K matrix")
    x = np.arange(1 << arch.n, dtype=np.uint64)
    cols = np.array(arch.columns, dtype=np.uint64)
    parity = np.bitwise_count(x[:, None] & cols[None, :]) & 1
    return (1 - 2 * parity.astype(np.int64)).astype(np.int64)


def _exact_amplitudes(amplitudes) -> tuple[list[int], int] | None:
    """Weights over a common power-of-two denominator, if the amplitudes sum to exactly 1."""
    try:
        fr = [Fraction(a) for a in amplitudes]
    except (TypeError, ValueError):
        return None
    if sum(fr) != 1 or not all(_is_power_of_two(f.denominator) for f in fr):
        return None
    e = max(f.denominator for f in fr).bit_length() - 1
    return [int(f * (1 << e)) for f in fr], e


def build_spectrum_general(diagonals: Sequence[Sequence[int]], amplitudes: Sequence[float]) -> Spectrum:
    """Spectrum of a diagonal commuting circuit with integer eigenvalues.

    ``diagonals[j][x]`` is the eigenvalue of the j-th Hamiltonian at basis
    state x; ``amplitudes[x]`` is ``|<psi0|x>|^2``. Amplitudes that are
    exact dyadic rationals summing to one yield an exact spectrum.
    """
    D = np.asarray(diagonals)
    if D.ndim != 2 or D.shape[0] == 0:
        raise InputError("diagonals must be a non-empty N x 2^n integer array")
    if not np.issubdtype(D.dtype, np.integer):
        if not np.all(np.asarray(D, dtype=float) == np.round(np.asarray(D, dtype=float))):
            raise InputError("Hamiltonian eigenvalues must be integers")
        D = np.round(np.asarray(D, dtype=float))
    D = D.astype(np.int64)
    dim = D.shape[1]
    if not _is_power_of_two(dim):
        raise InputError(f"diagonal length {dim} is not a power of two")
    amps = list(amplitudes)
    if len(amps) != dim:
        raise InputError(f"expected {dim} amplitudes, got {len(amps)}")
    famps = np.asarray([float(a) for a in amps])
    if (famps < 0).any():
        raise InputError("amplitudes must be non-negative")
    if abs(float(famps.sum()) - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"amplitudes sum to {famps.sum()!r}, not 1")
    K = D.T  # rows are wave vectors k_x
    distinct = np.unique(K, axis=0)
    if integer_rank(distinct) < D.shape[0]:
        raise DependentHamiltonians("the Hamiltonians are linearly dependent")
    exact = _exact_amplitudes(amps)
    if exact is not None:
        weights, e = exact
        return _make_spectrum(K, np.array(weights, dtype=object), e)
    return _make_spectrum(K, famps, None)


@dataclass(frozen=True, eq=False)
class DifferenceDistribution:
    """Law of ``D = K - K'`` for independent copies of ``K``."""

    deltas: np.ndarray  # (L, N) int64 sorted lexicographically
    weights: np.ndarray
    denom_exp: int | None

    @property
    def L(self) -> int:
        return self.deltas.shape[0]

    @property
    def N(self) -> int:
        return self.deltas.shape[1]

    @property
    def exact(self) -> bool:
        return self.denom_exp is not None

    @property
    def masses(self) -> list:
        if self.exact:
            d = 1 << self.denom_exp
            return [Fraction(int(w), d) for w in self.weights]
        return [float(w) for w in self.weights]

    def float_masses(self) -> np.ndarray:
        return np.array([float(m) for m in self.masses])

    def mass_of(self, d):
        d = np.asarray(d, dtype=np.int64)
        hit = np.flatnonzero((self.deltas == d).all(axis=1))
        if hit.size == 0:
            return Fraction(0) if self.exact else 0.0
        return self.masses[int(hit[0])]

    def zero_mass(self):
        return self.mass_of(np.zeros(self.N, dtype=np.int64))


def difference_distribution(spec: Spectrum, *, max_pairs: int = MAX_DIFFERENCE_PAIRS) -> DifferenceDistribution:
    L = spec.size
    if L * L > max_pairs:
        raise ResourceLimitError(f"{L}^2 wave-vector pairs exceed the cap {max_pairs}")
    diffs = (spec.omega[:, None, :] - spec.omega[None, :, :]).reshape(L * L, spec.N)
    if spec.exact:
        w = np.asarray(spec.weights, dtype=object)
        pw = np.outer(w, w).reshape(-1)
        deltas, summed = _group_rows(diffs, pw)
        return DifferenceDistribution(deltas, summed, 2 * spec.denom_exp)
    w = np.asarray(spec.weights, dtype=float)
    deltas, summed = _group_rows(diffs, np.outer(w, w).reshape(-1))
    return DifferenceDistribution(deltas, summed, None)
