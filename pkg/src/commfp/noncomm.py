"""Two-qubit, two-rotation Pauli circuits that need not commute.

For ``U(theta) = exp(i theta_1 H_1) exp(i theta_2 H_2)`` with ``H^2 = I``,
each exponential splits as ``sum_k e^{i k theta} P_k`` with projectors
``P_k = (I + k H) / 2``. The overlap ``<psi0| U(theta)^dag U(theta') |psi0>``
is then a finite Fourier sum over ``(k, k')`` in ``{-1, 1}^2 x {-1, 1}^2``.
It is a characteristic function exactly when those coefficients form a
probability vector.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

TRUNCATION = 1e-12
CLASSIFY_TOL = 1e-10

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PLUS_PLUS = np.full(4, 0.5, dtype=complex)
SIGNS = (-1, 1)


@dataclass(frozen=True)
class PauliPair:
    first: str  # two letters, e.g. "ZI" for Z on qubit 1
    second: str

    def __post_init__(self):
        for label in (self.first, self.second):
            if len(label) != 2 or any(c not in PAULI for c in label):
                raise ValueError(f"bad Pauli label {label!r}")

    @staticmethod
    def matrix(label: str) -> np.ndarray:
        return np.kron(PAULI[label[0]], PAULI[label[1]])

    @property
    def H1(self) -> np.ndarray:
        return self.matrix(self.first)

    @property
    def H2(self) -> np.ndarray:
        return self.matrix(self.second)

    @property
    def commutes(self) -> bool:
        return np.allclose(self.H1 @ self.H2, self.H2 @ self.H1)


Mode = tuple[int, int, int, int]  # (k1, k2, k1', k2')


@dataclass(frozen=True)
class BiFourierTable:
    coefficients: dict[Mode, complex]

    def total(self) -> complex:
        return sum(self.coefficients.values(), 0j)

    def to_dict(self) -> dict:
        return {
            ",".join(str(x) for x in mode): [c.real, c.imag] for mode, c in sorted(self.coefficients.items())
        }


def _projector(H: np.ndarray, k: int) -> np.ndarray:
    return (np.eye(4, dtype=complex) + k * H) / 2


def bifourier_coefficients(pair: PauliPair, psi0: np.ndarray = PLUS_PLUS) -> BiFourierTable:
    P1 = {k: _projector(pair.H1, k) for k in SIGNS}
    P2 = {k: _projector(pair.H2, k) for k in SIGNS}
    bra = psi0.conj()
    out = {}
    for k1, k2, q1, q2 in itertools.product(SIGNS, repeat=4):
        c = bra @ (P2[-k2] @ P1[-k1] @ P1[q1] @ P2[q2] @ psi0)
        if abs(c) >= TRUNCATION:
            out[(k1, k2, q1, q2)] = complex(c)
    return BiFourierTable(out)


PROBABILISTIC = "probabilistic"
NON_PROBABILISTIC = "non_probabilistic"


def classify_representation(table: BiFourierTable, tol: float = CLASSIFY_TOL) -> str:
    cs = list(table.coefficients.values())
    ok = (
        all(abs(c.imag) <= tol and -tol <= c.real <= 1 + tol for c in cs)
        and abs(sum(cs, 0j) - 1) <= tol
    )
    return PROBABILISTIC if ok else NON_PROBABILISTIC


def all_pairs() -> list[PauliPair]:
    labels = ["".join(p) for p in itertools.product("IXYZ", repeat=2)]
    return [PauliPair(a, b) for a in labels for b in labels]


@dataclass(frozen=True)
class Census2Q:
    total: int
    noncommuting: int
    probabilistic_noncommuting: int
    non_probabilistic: int
    commuting_probabilistic: int

    def counts(self) -> tuple[int, int, int, int]:
        return (self.total, self.noncommuting, self.probabilistic_noncommuting, self.non_probabilistic)


def census_2q() -> Census2Q:
    """Classify all 256 ordered pairs of two-qubit Pauli strings."""
    total = nc = nc_prob = non_prob = comm_prob = 0
    for pair in all_pairs():
        total += 1
        prob = classify_representation(bifourier_coefficients(pair)) == PROBABILISTIC
        if pair.commutes:
            comm_prob += prob
        else:
            nc += 1
            nc_prob += prob
        non_prob += not prob
    return Census2Q(total, nc, nc_prob, non_prob, comm_prob)
