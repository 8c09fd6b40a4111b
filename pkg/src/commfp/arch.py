"""Pauli-Z circuit architectures and GF(2) linear algebra on their encoding.

A circuit on ``n`` qubits with ``N`` rotations is stored as a tuple of
``N`` column words. Bit ``n - m`` of a word is set when qubit ``m``
(1-based) takes part in the rotation, so the integer value of a word reads
the column ``(a_1, ..., a_n)`` as a binary number with qubit 1 as the most
significant bit. Sorting words therefore sorts columns lexicographically.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DuplicateRotation,
    EmptyRotation,
    InputError,
    RankTooLarge,
    SizeViolation,
    TooManyCircuits,
)

RANK_GUARD = 24
CENSUS_CAP = 10**7


@dataclass(frozen=True, eq=False)
class CircuitArchitecture:
    """``n`` qubits and one column word per rotation, in rotation order.

    Rotation order is kept because nested circuits and the printed K matrix
    depend on it; equality and hashing only look at the column multiset.
    """

    n: int
    columns: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InputError(f"qubit count must be a positive integer, got {self.n!r}")
        cols = tuple(int(c) for c in self.columns)
        limit = 1 << self.n
        for c in cols:
            if c < 0 or c >= limit:
                raise InputError(f"column word {c} does not fit in {self.n} qubits")
        object.__setattr__(self, "columns", cols)

    @property
    def N(self) -> int:
        return len(self.columns)

    @property
    def A(self) -> np.ndarray:
        """Binary ``n x N`` encoding matrix."""
        out = np.zeros((self.n, self.N), dtype=np.uint8)
        for j, c in enumerate(self.columns):
            for m in range(self.n):
                out[m, j] = (c >> (self.n - 1 - m)) & 1
        return out

    def qubit_sets(self) -> list[list[int]]:
        return [_word_to_qubits(c, self.n) for c in self.columns]

    def canonical(self) -> "CircuitArchitecture":
        return CircuitArchitecture(self.n, tuple(sorted(self.columns)))

    def extend(self, extra_columns: Sequence[int]) -> "CircuitArchitecture":
        """Circuit sharing this circuit's rotations, followed by ``extra_columns``."""
        return CircuitArchitecture(self.n, self.columns + tuple(extra_columns))

    def to_dict(self) -> dict:
        return {"n": self.n, "rotations": self.canonical().qubit_sets()}

    def __eq__(self, other):
        if not isinstance(other, CircuitArchitecture):
            return NotImplemented
        return self.n == other.n and sorted(self.columns) == sorted(other.columns)

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.columns))))

    def __repr__(self):
        return f"CircuitArchitecture(n={self.n}, rotations={self.qubit_sets()})"

    @classmethod
    def from_rotations(cls, n: int, rotations: Sequence[Sequence[int]], *, check: bool = True):
        """Build from 1-based qubit index lists, keeping the given order."""
        words = []
        for rot in rotations:
            qubits = [int(q) for q in rot]
            if len(set(qubits)) != len(qubits):
                raise InputError(f"rotation {list(rot)} repeats a qubit")
            word = 0
            for q in qubits:
                if q < 1 or q > n:
                    raise InputError(f"qubit index {q} outside 1..{n}")
                word |= 1 << (n - q)
            words.append(word)
        arch = cls(n, tuple(words))
        if check:
            validate(arch)
        return arch

    @classmethod
    def from_matrix(cls, A, *, check: bool = True):
        A = np.asarray(A, dtype=np.int64)
        if A.ndim != 2 or not np.isin(A, (0, 1)).all():
            raise InputError("A must be a binary matrix")
        n = A.shape[0]
        words = tuple(
            sum(int(A[m, j]) << (n - 1 - m) for m in range(n)) for j in range(A.shape[1])
        )
        arch = cls(n, words)
        if check:
            validate(arch)
        return arch


def _word_to_qubits(word: int, n: int) -> list[int]:
    return [m for m in range(1, n + 1) if (word >> (n - m)) & 1]


def validate(arch: CircuitArchitecture) -> None:
    """Raise if the architecture breaks any structural assumption."""
    for j, c in enumerate(arch.columns):
        if c == 0:
            raise EmptyRotation(f"rotation {j + 1} acts on no qubit")
    seen = {}
    for j, c in enumerate(arch.columns):
        if c in seen:
            raise DuplicateRotation(
                f"rotations {seen[c] + 1} and {j + 1} both act on qubits {_word_to_qubits(c, arch.n)}"
            )
        seen[c] = j
    upper = (1 << arch.n) - 1
    if not arch.n <= arch.N <= upper:
        raise SizeViolation(f"need n <= N <= 2^n - 1, got n={arch.n}, N={arch.N}")


def parse_circuit(data: dict) -> CircuitArchitecture:
    try:
        n = data["n"]
        rotations = data["rotations"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"circuit description is missing field {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise InputError("'n' must be an integer")
    for rot in rotations:
        if len(rot) == 0:
            raise EmptyRotation("rotation with an empty qubit list")
    return CircuitArchitecture.from_rotations(n, rotations)


def load_circuit(path) -> CircuitArchitecture:
    with open(path) as fh:
        return parse_circuit(json.load(fh))


# ---------------------------------------------------------------------------
# GF(2) linear algebra. Rows of A are handled as N-bit integers, bit
# N - 1 - j holding column j.


def _rows_as_ints(A) -> tuple[list[int], int]:
    A = np.asarray(A)
    if A.ndim != 2:
        raise InputError("expected a 2-D binary matrix")
    N = A.shape[1]
    rows = []
    for row in A:
        v = 0
        for bit in row:
            v = (v << 1) | (int(bit) & 1)
        rows.append(v)
    return rows, N


def _echelon_basis(rows: Sequence[int]) -> list[int]:
    """Reduced echelon basis of the span, sorted by decreasing leading bit."""
    pivots: dict[int, int] = {}
    for v in rows:
        for lead in sorted(pivots, reverse=True):
            if (v >> lead) & 1:
                v ^= pivots[lead]
        if v:
            lead = v.bit_length() - 1
            for other in list(pivots):
                if (pivots[other] >> lead) & 1:
                    pivots[other] ^= v
            pivots[lead] = v
    return [pivots[k] for k in sorted(pivots, reverse=True)]


def gf2_rank(A) -> int:
    rows, _ = _rows_as_ints(A)
    return len(_echelon_basis(rows))


@dataclass(frozen=True)
class Gf2RowSpace:
    """All ``2**r`` mod-2 combinations of the rows of A, in Gray-code order."""

    r: int
    vectors: np.ndarray  # (2**r, N) uint8
    basis: np.ndarray  # (r, N) uint8, reduced echelon form

    def __len__(self):
        return self.vectors.shape[0]


def gf2_rowspace(A, *, rank_guard: int = RANK_GUARD) -> Gf2RowSpace:
    rows, N = _rows_as_ints(A)
    basis_ints = _echelon_basis(rows)
    r = len(basis_ints)
    if r > rank_guard:
        raise RankTooLarge(f"GF(2) rank {r} exceeds the guard {rank_guard}")
    basis = np.array(
        [[(b >> (N - 1 - j)) & 1 for j in range(N)] for b in basis_ints], dtype=np.uint8
    ).reshape(r, N)
    idx = np.arange(1 << r, dtype=np.int64)
    gray = idx ^ (idx >> 1)
    bits = ((gray[:, None] >> np.arange(r)[None, :]) & 1).astype(np.int64)
    vectors = ((bits @ basis.astype(np.int64)) & 1).astype(np.uint8)
    return Gf2RowSpace(r=r, vectors=vectors, basis=basis)


def nonzero_columns(n: int) -> range:
    return range(1, 1 << n)


def count_architectures(n: int, N: int) -> int:
    return math.comb((1 << n) - 1, N)


def enumerate_architectures(n: int, N: int, *, cap: int = CENSUS_CAP) -> Iterator[CircuitArchitecture]:
    """Every N-subset of the nonzero columns, in lexicographic order."""
    if not n <= N <= (1 << n) - 1:
        raise SizeViolation(f"need n <= N <= 2^n - 1, got n={n}, N={N}")
    total = count_architectures(n, N)
    if total > cap:
        raise TooManyCircuits(f"C(2^{n}-1, {N}) = {total} exceeds the cap {cap}")
    for cols in itertools.combinations(nonzero_columns(n), N):
        yield CircuitArchitecture(n, cols)


def all_rotations_count(n: int, n_prime: int) -> int:
    return sum(math.comb(n, k) for k in range(1, n_prime + 1))


def all_rotations_up_to(n: int, n_prime: int) -> CircuitArchitecture:
    """Circuit using every rotation on between 1 and ``n_prime`` qubits."""
    if not 1 <= n_prime <= n:
        raise SizeViolation(f"need 1 <= n' <= n, got n'={n_prime}, n={n}")
    cols = tuple(c for c in nonzero_columns(n) if bin(c).count("1") <= n_prime)
    arch = CircuitArchitecture(n, cols)
    validate(arch)
    return arch


def all_rotations(n: int) -> CircuitArchitecture:
    return all_rotations_up_to(n, n)


# The n=4, N=5 circuit used as a worked example throughout the tests.
EXAMPLE_ROTATIONS = [[1], [2, 3, 4], [1, 2, 3], [2, 3], [1, 4]]


def example_circuit() -> CircuitArchitecture:
    return CircuitArchitecture.from_rotations(4, EXAMPLE_ROTATIONS)
