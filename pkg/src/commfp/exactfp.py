"""Exact frame potentials.

``F_U(t)`` is the return probability of the fidelity walk, which equals
``sum_s P(S_t = s)**2`` for ``S_t = K_1 + ... + K_t``. The law of ``S_t``
is built by repeated sparse convolution. Exact spectra keep integer
weights over a power-of-two denominator, so every value here is an exact
dyadic rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .arch import CircuitArchitecture, _echelon_basis, _rows_as_ints, gf2_rank
from .errors import SupportTooLarge
from .spectrum import Spectrum, _group_rows, build_spectrum_pauli

SUPPORT_CAP = 5 * 10**7
_INT64_SAFE_BITS = 62


@dataclass(frozen=True, eq=False)
class SparseDistribution:
    """Law of an integer vector: support rows and their weights.

    Exact mode: mass = weight / 2**denom_exp. Float mode: denom_exp is None.
    """

    support: np.ndarray  # (m, N) int64
    weights: np.ndarray
    denom_exp: int | None

    @property
    def N(self) -> int:
        return self.support.shape[1]

    @property
    def size(self) -> int:
        return self.support.shape[0]

    @property
    def exact(self) -> bool:
        return self.denom_exp is not None

    def total_mass(self):
        if self.exact:
            return Fraction(sum(int(w) for w in self.weights), 1 << self.denom_exp)
        return math.fsum(float(w) for w in self.weights)

    def as_dict(self) -> dict:
        if self.exact:
            d = 1 << self.denom_exp
            return {tuple(int(x) for x in s): Fraction(int(w), d) for s, w in zip(self.support, self.weights)}
        return {tuple(int(x) for x in s): float(w) for s, w in zip(self.support, self.weights)}

    def sum_of_squares(self):
        """``sum_s P(s)**2``: exact Fraction or float."""
        if self.exact:
            num = sum(int(w) * int(w) for w in self.weights)
            return Fraction(num, 1 << (2 * self.denom_exp))
        return math.fsum(float(w) ** 2 for w in self.weights)


def predicted_support(spec: Spectrum, t: int) -> int:
    """Upper bound on the support of S_t: lattice box size vs. multiset count."""
    box = 1
    for j in range(spec.N):
        col = spec.omega[:, j]
        lo, hi = int(col.min()), int(col.max())
        g = 0
        for v in col:
            g = math.gcd(g, int(v) - lo)
        box *= t * (hi - lo) // g + 1 if g else 1
    return min(box, math.comb(t + spec.size - 1, spec.size - 1))


class _Encoder:
    """Packs integer vectors with bounded entries into single int64 keys."""

    def __init__(self, N: int, bound: int):
        self.base = 2 * bound + 1
        self.offset = bound
        self.N = N
        self.ok = self.base ** N < (1 << 62)
        self.powers = np.array([self.base**j for j in range(N)], dtype=np.int64) if self.ok else None

    def encode(self, rows: np.ndarray) -> np.ndarray:
        return (rows + self.offset) @ self.powers

    def shifts(self, rows: np.ndarray) -> np.ndarray:
        return rows @ self.powers

    def decode(self, keys: np.ndarray) -> np.ndarray:
        out = np.empty((keys.shape[0], self.N), dtype=np.int64)
        rem = keys.copy()
        for j in range(self.N):
            out[:, j] = rem % self.base - self.offset
            rem //= self.base
        return out


def _grouped_sum(keys: np.ndarray, weights: np.ndarray):
    order = np.argsort(keys, kind="stable")
    ks = keys[order]
    starts = np.flatnonzero(np.r_[True, ks[1:] != ks[:-1]])
    return ks[starts], np.add.reduceat(weights[order], starts)


def _convolution_steps(spec: Spectrum, t_max: int, cap: int) -> Iterator[SparseDistribution]:
    """Yield the law of S_t for t = 1..t_max."""
    if t_max < 1:
        return
    if predicted_support(spec, t_max) > cap:
        raise SupportTooLarge(
            f"support of S_{t_max} may reach {predicted_support(spec, t_max)} > cap {cap}"
        )
    exact = spec.exact
    if exact:
        e = spec.denom_exp
        base_w = np.array([int(w) for w in spec.weights], dtype=object)
        max_w_bits = max(int(w).bit_length() for w in base_w)
    else:
        base_w = np.asarray(spec.weights, dtype=float)
    enc = _Encoder(spec.N, t_max * spec.max_abs_entry())

    def weights_for(t):
        # int64 while the total weight 2**(e*t) stays well inside the range
        if exact and max_w_bits * t < _INT64_SAFE_BITS and e * t < _INT64_SAFE_BITS:
            return base_w.astype(np.int64)
        return base_w

    if enc.ok:
        shifts = enc.shifts(spec.omega)
        keys = enc.encode(spec.omega)
        w = weights_for(1)
        yield SparseDistribution(spec.omega.copy(), base_w.copy(), spec.denom_exp)
        for t in range(2, t_max + 1):
            wt = weights_for(t)
            if w.dtype != wt.dtype:
                w = w.astype(wt.dtype)
            new_keys = (keys[:, None] + shifts[None, :]).reshape(-1)
            new_w = (w[:, None] * wt[None, :]).reshape(-1)
            keys, w = _grouped_sum(new_keys, new_w)
            support = enc.decode(keys)
            yield SparseDistribution(support, w.astype(object) if exact else w, spec.denom_exp)
        return
    support = spec.omega.copy()
    w = base_w.copy()
    yield SparseDistribution(support.copy(), w.copy(), spec.denom_exp)
    for t in range(2, t_max + 1):
        rows = (support[:, None, :] + spec.omega[None, :, :]).reshape(-1, spec.N)
        new_w = (w[:, None] * base_w[None, :]).reshape(-1)
        support, w = _group_rows(rows, new_w)
        yield SparseDistribution(support, w, spec.denom_exp)


def convolve_power(spec: Spectrum, t: int, *, cap: int = SUPPORT_CAP) -> SparseDistribution:
    """Exact law of ``S_t = K_1 + ... + K_t``."""
    if t < 1:
        raise ValueError("t must be >= 1")
    last = None
    for last in _convolution_steps(spec, t, cap):
        pass
    dist = last
    if dist.exact:
        # shared denominator of S_t is 2**(e*t)
        dist = SparseDistribution(dist.support, dist.weights, spec.denom_exp * t)
    return dist


@dataclass(frozen=True)
class DyadicSeries:
    """Frame-potential values for ``t = 1..t_max``.

    Exact series hold ``numerators[i] / 2**exponents[i]``; float series
    hold only ``floats`` plus a forward-error estimate.
    """

    t: tuple[int, ...]
    numerators: tuple[int, ...] | None
    exponents: tuple[int, ...] | None
    floats: tuple[float, ...]
    forward_error: tuple[float, ...] | None = None

    @property
    def t_max(self) -> int:
        return self.t[-1] if self.t else 0

    @property
    def exact(self) -> bool:
        return self.numerators is not None

    def fraction(self, t: int) -> Fraction:
        i = self.t.index(t)
        return Fraction(self.numerators[i], 1 << self.exponents[i])

    def fractions(self) -> list[Fraction]:
        return [Fraction(a, 1 << b) for a, b in zip(self.numerators, self.exponents)]

    def value(self, t: int):
        return self.fraction(t) if self.exact else self.floats[self.t.index(t)]

    def values(self) -> list:
        return self.fractions() if self.exact else list(self.floats)

    def log2(self) -> list[float]:
        if self.exact:
            return [math.log2(a) - b for a, b in zip(self.numerators, self.exponents)]
        return [math.log2(x) if x > 0 else -math.inf for x in self.floats]

    @classmethod
    def from_exact(cls, ts: Sequence[int], nums: Sequence[int], exps: Sequence[int]) -> "DyadicSeries":
        nums = tuple(int(x) for x in nums)
        exps = tuple(int(x) for x in exps)
        floats = tuple(float(Fraction(a, 1 << b)) for a, b in zip(nums, exps))
        return cls(tuple(ts), nums, exps, floats)

    def __mul__(self, other: "DyadicSeries") -> "DyadicSeries":
        if self.t != other.t:
            raise ValueError("series cover different t ranges")
        if self.exact and other.exact:
            return DyadicSeries.from_exact(
                self.t,
                [a * b for a, b in zip(self.numerators, other.numerators)],
                [a + b for a, b in zip(self.exponents, other.exponents)],
            )
        fl = tuple(a * b for a, b in zip(self.floats, other.floats))
        return DyadicSeries(self.t, None, None, fl, None)


def frame_potential_exact(spec: Spectrum, t_max: int, *, cap: int = SUPPORT_CAP) -> DyadicSeries:
    """``F_U(t)`` for t = 1..t_max by iterated convolution."""
    ts, nums, exps, floats, errs = [], [], [], [], []
    for t, dist in enumerate(_convolution_steps(spec, t_max, cap), start=1):
        ts.append(t)
        if spec.exact:
            nums.append(sum(int(w) * int(w) for w in dist.weights))
            exps.append(2 * spec.denom_exp * t)
        else:
            floats.append(math.fsum(float(w) ** 2 for w in dist.weights))
            errs.append(dist.size * np.finfo(float).eps)
    if spec.exact:
        return DyadicSeries.from_exact(ts, nums, exps)
    return DyadicSeries(tuple(ts), None, None, tuple(floats), tuple(errs))


def abelian_square_counts(m: int, t_max: int) -> list[int]:
    """``c_t = sum_b multinomial(t; b)**2`` over compositions of t into m parts.

    Uses ``c^(a+b)_t = sum_j C(t, j)**2 c^(a)_j c^(b)_{t-j}`` with binary
    splitting of m.
    """
    binom_sq = [[math.comb(t, j) ** 2 for j in range(t + 1)] for t in range(t_max + 1)]

    def combine(ca, cb):
        return [
            sum(binom_sq[t][j] * ca[j] * cb[t - j] for j in range(t + 1)) for t in range(t_max + 1)
        ]

    result = None
    power = [1] * (t_max + 1)  # one letter: a single composition
    while m:
        if m & 1:
            result = power if result is None else combine(result, power)
        m >>= 1
        if m:
            power = combine(power, power)
    return result


def frame_potential_all_rotations(n: int, t_max: int) -> DyadicSeries:
    """Exact ``F_U(t)`` when the circuit has all ``2**n - 1`` rotations.

    ``F_U(t) = 2**(-2nt) * sum_b multinomial(t; b)**2`` with ``b`` ranging
    over occupation vectors of ``2**n`` equally likely letters.
    """
    c = abelian_square_counts(1 << n, t_max)
    ts = range(1, t_max + 1)
    return DyadicSeries.from_exact(ts, [c[t] for t in ts], [2 * n * t for t in ts])


def closed_form_min_rotations(n: int, t: int) -> Fraction:
    """``(Gamma(t + 1/2) / (sqrt(pi) Gamma(t + 1)))**n = (C(2t, t) / 4**t)**n``."""
    r = Fraction(1)
    for k in range(1, t + 1):
        r *= Fraction(2 * k - 1, 2 * k)
    return r**n


def haar_frame_potential(n: int, t: int) -> Fraction:
    d = 1 << n
    return Fraction(1, math.comb(d + t - 1, d - 1))


def expressiveness(series: DyadicSeries, n: int) -> list:
    """Haar frame potential over the circuit's, per t (exact when possible)."""
    out = []
    for t, val in zip(series.t, series.values()):
        haar = haar_frame_potential(n, t)
        out.append(haar / val if series.exact else float(haar) / val)
    return out


def frame_potential_rank_formula(arch: CircuitArchitecture) -> Fraction:
    """``F_U(1) = 2**-r`` with r the GF(2) rank of A."""
    return Fraction(1, 1 << gf2_rank(arch.A))


# ---------------------------------------------------------------------------
# Pauli circuits: split into independent column blocks first.


def independent_blocks(arch: CircuitArchitecture) -> list[tuple[int, ...]]:
    """Column index groups whose wave-vector blocks are independent.

    Columns touched by a common row of the reduced echelon form of A are
    joined; distinct groups depend on disjoint bits of the random basis
    state, so the law of K factorises over them.
    """
    rows, N = _rows_as_ints(arch.A)
    basis = _echelon_basis(rows)
    parent = list(range(N))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for b in basis:
        cols = [j for j in range(N) if (b >> (N - 1 - j)) & 1]
        for c in cols[1:]:
            ra, rb = find(cols[0]), find(c)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for j in range(N):
        groups.setdefault(find(j), []).append(j)
    return sorted(tuple(g) for g in groups.values())


def frame_potential_pauli(
    arch: CircuitArchitecture,
    t_max: int,
    *,
    factorize: bool = True,
    closed_forms: bool = True,
    cap: int = SUPPORT_CAP,
) -> DyadicSeries:
    """Exact ``F_U(t)`` for a Pauli-Z circuit.

    With ``factorize`` the series is the product over independent column
    blocks. With ``closed_forms`` a block whose N_b columns span a space of
    rank r_b with ``N_b = 2**r_b - 1`` (every nonzero combination present)
    uses the abelian-square count instead of convolution.
    """
    blocks = independent_blocks(arch) if factorize else [tuple(range(arch.N))]
    result = None
    for cols in blocks:
        sub = CircuitArchitecture(arch.n, tuple(arch.columns[j] for j in cols))
        r = gf2_rank(sub.A)
        if closed_forms and len(cols) == (1 << r) - 1:
            part = frame_potential_all_rotations(r, t_max)
        else:
            part = frame_potential_exact(build_spectrum_pauli(sub), t_max, cap=cap)
        result = part if result is None else result * part
    return result
