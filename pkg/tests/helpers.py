"""Shared test data and generators."""
import random

from commfp import kernels
from commfp.arch import CircuitArchitecture

# K matrix of the worked n=4, N=5 example, rows in ascending basis order.
EXAMPLE_K = [
    [1, 1, 1, 1, 1],
    [1, -1, 1, 1, -1],
    [1, -1, -1, -1, 1],
    [1, 1, -1, -1, -1],
    [1, -1, -1, -1, 1],
    [1, 1, -1, -1, -1],
    [1, 1, 1, 1, 1],
    [1, -1, 1, 1, -1],
    [-1, 1, -1, 1, -1],
    [-1, -1, -1, 1, 1],
    [-1, -1, 1, -1, -1],
    [-1, 1, 1, -1, 1],
    [-1, -1, 1, -1, -1],
    [-1, 1, 1, -1, 1],
    [-1, 1, -1, 1, -1],
    [-1, -1, -1, 1, 1],
]


def random_arch(rng: random.Random, n: int, N: int | None = None) -> CircuitArchitecture:
    m = (1 << n) - 1
    if N is None:
        N = rng.randint(n, m)
    return CircuitArchitecture(n, tuple(rng.sample(range(1, m + 1), N)))


BACKENDS = ["python"] + (["compiled"] if kernels.compiled_available() else [])

# (criterion, passed, detail) lines printed at the end of the session
ACCEPTANCE: list[tuple[int, bool, str]] = []
