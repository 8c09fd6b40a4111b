"""Volume censuses over Pauli-Z architectures."""
from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .approx import expressiveness_ratio
from .arch import (
    CENSUS_CAP,
    RANK_GUARD,
    CircuitArchitecture,
    count_architectures,
    enumerate_architectures,
)
from .errors import RankTooLarge, TooManyCircuits
from .lattice import lattice_volume_pauli


@dataclass
class VolumeTally:
    n: int
    counts: dict[int, dict[int, int]] = field(default_factory=dict)
    total: int = 0
    exhaustive: bool = False
    samples_per_N: int | None = None
    seed: int | None = None
    duplicates: dict[int, int] = field(default_factory=dict)

    def add(self, N: int, v: int, k: int = 1) -> None:
        per = self.counts.setdefault(N, {})
        per[v] = per.get(v, 0) + k
        self.total += k

    def merge(self, other: "VolumeTally") -> "VolumeTally":
        out = VolumeTally(self.n, {}, 0, self.exhaustive, self.samples_per_N, self.seed)
        for src in (self, other):
            for N, per in src.counts.items():
                for v, k in per.items():
                    out.add(N, v, k)
            for N, k in src.duplicates.items():
                out.duplicates[N] = out.duplicates.get(N, 0) + k
        return out

    def circuits(self, N: int) -> int:
        return sum(self.counts.get(N, {}).values())

    def non_power_of_two(self) -> dict[int, list[int]]:
        """Observed v_U values that are not powers of two, per N.

        Every tally so far has come back empty, but this is an observation,
        not a theorem, so violations are reported rather than rejected.
        """
        out = {}
        for N, per in sorted(self.counts.items()):
            odd = sorted(v for v in per if v & (v - 1))
            if odd:
                out[N] = odd
        return out

    def to_dict(self) -> dict:
        # JSON object keys must be strings; big v_U values stay exact as text
        return {
            "n": self.n,
            "total": self.total,
            "exhaustive": self.exhaustive,
            "samples_per_N": self.samples_per_N,
            "seed": self.seed,
            "counts": {
                str(N): {str(v): k for v, k in sorted(per.items())} for N, per in sorted(self.counts.items())
            },
            "duplicates": {str(N): k for N, k in sorted(self.duplicates.items())},
            "non_power_of_two": {str(N): [str(v) for v in vs] for N, vs in self.non_power_of_two().items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "VolumeTally":
        t = cls(d["n"], {}, 0, d["exhaustive"], d["samples_per_N"], d["seed"])
        for N, per in d["counts"].items():
            for v, k in per.items():
                t.add(int(N), int(v), int(k))
        t.duplicates = {int(N): int(k) for N, k in d.get("duplicates", {}).items()}
        return t


def _reduced_volume(arch: CircuitArchitecture) -> int:
    return lattice_volume_pauli(arch)[1]


def _volumes(archs, threads: int) -> list[int]:
    if threads <= 1:
        return [_reduced_volume(a) for a in archs]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(_reduced_volume, archs, chunksize=256))


def census_exhaustive(n: int, *, cap: int = CENSUS_CAP, threads: int = 1) -> VolumeTally:
    """Reduced volume of every architecture on n qubits, N = n .. 2^n - 1."""
    Ns = range(n, (1 << n))
    total = sum(count_architectures(n, N) for N in Ns)
    if total > cap:
        raise TooManyCircuits(f"{total} circuits on n={n} qubits exceed cap {cap}")
    tally = VolumeTally(n, exhaustive=True)
    for N in Ns:
        for v, k in Counter(_volumes(list(enumerate_architectures(n, N, cap=cap)), threads)).items():
            tally.add(N, v, k)
    return tally


def census_sampled(
    n: int,
    samples_per_N: int,
    seed: int,
    *,
    Ns=None,
    threads: int = 1,
) -> VolumeTally:
    """Tally over uniformly random N-subsets of the nonzero columns.

    Each N draws from ``SeedSequence(seed, spawn_key=(N,))``; circuits are
    sampled with replacement and repeats are counted in ``duplicates``.
    """
    if n > RANK_GUARD:
        raise RankTooLarge(f"n={n} exceeds the rank guard {RANK_GUARD}")
    tally = VolumeTally(n, exhaustive=False, samples_per_N=samples_per_N, seed=seed)
    m = (1 << n) - 1
    for N in Ns if Ns is not None else range(n, m + 1):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(N,)))
        archs, seen = [], Counter()
        for _ in range(samples_per_N):
            cols = tuple(int(c) + 1 for c in rng.choice(m, size=N, replace=False))
            a = CircuitArchitecture(n, cols)
            seen[a] += 1
            archs.append(a)
        for v, k in Counter(_volumes(archs, threads)).items():
            tally.add(N, v, k)
        dup = sum(k - 1 for k in seen.values())
        if samples_per_N:
            tally.duplicates[N] = dup
    return tally


def all_rotations_up_to_sizes(n: int) -> dict[int, int]:
    """``{N: n'}`` for ``N = sum_{k <= n'} C(n, k)``, n' = 1..n."""
    out, acc = {}, 0
    for k in range(1, n + 1):
        acc += math.comb(n, k)
        out[acc] = k
    return out


@dataclass(frozen=True)
class MinVolumePoint:
    N: int
    v_min: int
    ratio_to_previous: float | None  # v_min(N) / v_min(N - 1)
    all_rotations_up_to: int | None  # n' when N = sum_{k <= n'} C(n, k)


def min_volume_series(tally: VolumeTally) -> list[MinVolumePoint]:
    marks = all_rotations_up_to_sizes(tally.n)
    out, prev = [], None
    for N in sorted(tally.counts):
        per = tally.counts[N]
        if not per:
            continue
        v = min(per)
        ratio = v / prev[1] if prev is not None and prev[0] == N - 1 else None
        out.append(MinVolumePoint(N, v, ratio, marks.get(N)))
        prev = (N, v)
    return out


def diminishing_returns(series: list[MinVolumePoint], t: float) -> dict[int, float]:
    """Approximate expressiveness gain ``E_{N+1}/E_N`` for minimum-volume circuits.

    Keyed by N + 1, using ``sqrt(pi t) v_N / v_{N+1}``.
    """
    by_N = {p.N: p.v_min for p in series}
    return {N + 1: expressiveness_ratio(by_N[N], by_N[N + 1], t) for N in sorted(by_N) if N + 1 in by_N}
