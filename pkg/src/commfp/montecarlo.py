"""Stochastic estimators of the frame potential and a quadrature oracle.

Random streams: every chunk of ``CHUNK_SIZE`` replicas draws from its own
``numpy.random.SeedSequence(seed, spawn_key=(t, chunk))`` substream, so a
report depends only on ``(inputs, seed)`` and never on the worker count.
Chunk results are reduced with compensated summation in chunk order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import gammaln

from . import kernels
from .arch import CircuitArchitecture
from .errors import GridTooLarge, InvalidArchitecture
from .spectrum import DifferenceDistribution, Spectrum

CHUNK_SIZE = 4096
GRID_CAP = 10**7
METHODS = ("is_unbiased", "is_absorbing", "multinomial", "quadrature")


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    std_error: float
    samples: int
    seed: int
    method: str
    t: int
    log2_estimate: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _chunks(M: int):
    return [(c, min(CHUNK_SIZE, M - c * CHUNK_SIZE)) for c in range((M + CHUNK_SIZE - 1) // CHUNK_SIZE)]


def _rng(seed: int, t: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(t, chunk)))


def _map(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _mean_and_se(values: np.ndarray) -> tuple[float, float]:
    M = values.size
    mean = math.fsum(values) / M
    if M < 2:
        return mean, 0.0
    var = math.fsum((values - mean) ** 2) / (M - 1)
    return mean, math.sqrt(var / M)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def importance_sampling_fp(
    diff: DifferenceDistribution,
    t: int,
    M: int,
    seed: int,
    mode: str = "unbiased",
    *,
    threads: int = 1,
) -> EstimateReport:
    """Sequential importance sampling of ``P(W_t = 0)``.

    At each step after the first the increments are ranked by inner product
    with the current position (ties by their lexicographic order) and the
    true masses, sorted descending, are reassigned along that ranking, so
    steps toward the origin are favoured. The running weight collects the
    likelihood ratios. In ``absorbing`` mode a path sitting at the origin
    stays there and its weight picks up ``P(D = 0)`` for each such step.
    """
    if mode not in ("unbiased", "absorbing"):
        raise ValueError(f"unknown mode {mode!r}")
    if t < 1 or M < 1:
        raise ValueError("need t >= 1 and M >= 1")
    seed = _check_seed(seed)
    method = "is_" + mode
    deltas = np.ascontiguousarray(diff.deltas, dtype=np.int64)
    p_true = np.asarray(diff.float_masses(), dtype=np.float64)
    L = deltas.shape[0]
    zero_rows = np.flatnonzero(~deltas.any(axis=1))
    zero_index = int(zero_rows[0]) if zero_rows.size else -1
    if L == 1 and zero_index == 0:
        return EstimateReport(1.0, 0.0, M, seed, method, t, 0.0)
    p_sorted = np.sort(p_true)[::-1].copy()
    cum_true = np.cumsum(p_true)
    cum_sorted = np.cumsum(p_sorted)
    absorbing = mode == "absorbing"

    def run(chunk):
        c, m = chunk
        u = _rng(seed, t, c).random((m, t))
        return kernels.sis_paths(deltas, p_true, p_sorted, cum_true, cum_sorted, u, absorbing, zero_index)

    values = np.concatenate(_map(run, _chunks(M), threads))
    est, se = _mean_and_se(values)
    return EstimateReport(est, se, M, seed, method, t, math.log2(est) if est > 0 else None)


def is_all_rotations(arch: CircuitArchitecture) -> bool:
    return arch.N == (1 << arch.n) - 1  # columns are distinct and nonzero


def multinomial_fp(
    n: int,
    t: int,
    M: int,
    seed: int,
    *,
    arch: CircuitArchitecture | None = None,
    threads: int = 1,
) -> EstimateReport:
    """``F_U(t) = 2^(-nt) E[t! / prod_x B_x!]`` for the all-rotations circuit.

    ``B`` counts t uniform draws over the ``2**n`` basis states. The
    coefficients are handled as ``log2`` values and averaged after
    shifting by their maximum.
    """
    if arch is not None and (arch.n != n or not is_all_rotations(arch)):
        raise InvalidArchitecture("the multinomial estimator needs all 2^n - 1 rotations")
    if t < 1 or M < 1:
        raise ValueError("need t >= 1 and M >= 1")
    seed = _check_seed(seed)
    d = 1 << n
    probs = np.full(d, 1.0 / d)
    lgt = gammaln(t + 1)

    def run(chunk):
        c, m = chunk
        B = _rng(seed, t, c).multinomial(t, probs, size=m)
        return (lgt - gammaln(B + 1).sum(axis=1)) / math.log(2)

    logc = np.concatenate(_map(run, _chunks(M), threads))
    top = float(logc.max())
    scaled = np.exp2(logc - top)
    mean, se = _mean_and_se(scaled)
    log2_est = top + math.log2(mean) - n * t
    factor = 2.0 ** (top - n * t)
    return EstimateReport(mean * factor, se * factor, M, seed, "multinomial", t, log2_est)


def quadrature_oracle_fp(spec: Spectrum, t: int, *, grid_cap: int = GRID_CAP) -> float:
    """``F_U(t)`` as the torus average of ``|f_U(phi)|^(2t)``.

    A midpoint grid of ``G = 4 t max|k| + 2`` points per axis integrates
    the trigonometric polynomial exactly up to rounding. When every
    difference of wave vectors is even (Pauli circuits) the half torus
    ``[0, pi]^N`` suffices; otherwise the full ``[-pi, pi]^N`` is used.
    """
    N = spec.N
    kmax = spec.max_abs_entry()
    G = 4 * t * kmax + 2
    if G**N > grid_cap:
        raise GridTooLarge(f"grid of {G}^{N} points exceeds cap {grid_cap}")
    omega = spec.omega.astype(np.float64)
    masses = np.asarray(spec.float_masses(), dtype=np.float64)
    even = not ((spec.omega - spec.omega[0]) % 2).any()
    if even:
        axis = (np.arange(G) + 0.5) * (math.pi / G)
    else:
        axis = -math.pi + (np.arange(G) + 0.5) * (2 * math.pi / G)
    grids = np.meshgrid(*([axis] * N), indexing="ij")
    phi = np.stack([g.reshape(-1) for g in grids], axis=1)
    total = []
    step = max(1, 2_000_000 // max(1, omega.shape[0]))
    for s in range(0, phi.shape[0], step):
        f = np.exp(1j * (phi[s : s + step] @ omega.T)) @ masses
        total.append((np.abs(f) ** 2) ** t)
    vals = np.concatenate(total)
    return math.fsum(vals) / vals.size
