"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal
summary (and to stdout under ``-s``).
"""
import io
import math
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from commfp.approx import approx_frame_potential_log2, fit_error_constant, relative_errors, scaled_errors
from commfp.arch import CircuitArchitecture, all_rotations, example_circuit, gf2_rank, load_circuit
from commfp.cli import run
from commfp.errors import CommFPError
from commfp.exactfp import (
    expressiveness,
    frame_potential_all_rotations,
    frame_potential_exact,
    frame_potential_pauli,
)
from commfp.lattice import lattice_volume_pauli, volume_bounds
from commfp.montecarlo import importance_sampling_fp, multinomial_fp, quadrature_oracle_fp
from commfp.noncomm import census_2q
from commfp.spectrum import build_spectrum_general, build_spectrum_pauli, difference_distribution, full_k_matrix
from commfp.survey import census_exhaustive
from helpers import ACCEPTANCE, EXAMPLE_K, random_arch

ROOT = Path(__file__).resolve().parents[1]


def report(num: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.append((num, ok, detail))
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def test_c01_example_reproduction():
    start = time.perf_counter()
    arch = load_circuit(ROOT / "circuits" / "example1.json")
    rank = gf2_rank(arch.A)
    K = full_k_matrix(arch).tolist()
    V, _ = lattice_volume_pauli(arch)
    s = frame_potential_pauli(arch, 1, factorize=False)
    F1 = s.fraction(1)
    E1 = expressiveness(s, arch.n)[0]
    elapsed = time.perf_counter() - start
    ok = rank == 3 and K == EXAMPLE_K and V == 128 and F1 == Fraction(1, 8) and E1 == Fraction(1, 2) and elapsed < 1
    report(1, ok, f"rank={rank} K_match={K == EXAMPLE_K} V_U={V} F(1)={F1} E(1)={E1} in {elapsed:.2f}s")
    assert ok


def test_c02_error_law():
    start = time.perf_counter()
    arch = example_circuit()
    V, _ = lattice_volume_pauli(arch)
    s = frame_potential_pauli(arch, 15, factorize=False)
    scaled = scaled_errors(s, V, arch.N)
    rel = relative_errors(s, V, arch.N)[2:]
    elapsed = time.perf_counter() - start
    bound = 0.2
    bounded = max(scaled) < bound and max(scaled[7:]) <= 1.25 * max(scaled[:7])
    monotone = all(b < a for a, b in zip(rel, rel[1:]))
    ok = bounded and monotone and elapsed < 10
    report(
        2, ok,
        f"scaled error in [{min(scaled):.3f}, {max(scaled):.3f}] < {bound}, "
        f"relative error decreasing for t>=3: {monotone}, {elapsed:.2f}s",
    )
    assert ok


def test_c03_identity_closed_form():
    start = time.perf_counter()
    bad = []
    for n in range(1, 5):
        arch = CircuitArchitecture(n, tuple(1 << i for i in range(n)))
        if n <= 3:
            s = frame_potential_exact(build_spectrum_pauli(arch), 50)
        else:
            # one independent block per qubit, each convolved exactly
            s = frame_potential_pauli(arch, 50, closed_forms=False)
        for t in range(1, 51):
            if s.fraction(t) != Fraction(math.comb(2 * t, t), 4**t) ** n:
                bad.append((n, t))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 30
    report(3, ok, f"{200 - len(bad)}/200 exact matches for n=1..4, t=1..50 in {elapsed:.2f}s")
    assert ok


def test_c04_multinomial():
    start = time.perf_counter()
    exact = frame_potential_all_rotations(2, 50).values()
    hits = 0
    for t in range(1, 51):
        r = multinomial_fp(2, t, 10_000, seed=5, arch=all_rotations(2))
        hits += abs(r.estimate - exact[t - 1]) <= 3 * r.std_error + 1e-15 * exact[t - 1]
    elapsed = time.perf_counter() - start
    ok = hits >= 0.95 * 50 and elapsed < 60
    report(4, ok, f"{hits}/50 t values within 3 se (M=1e4, seed 5) in {elapsed:.2f}s")
    assert ok


def test_c05_importance_sampling():
    start = time.perf_counter()
    single = difference_distribution(build_spectrum_pauli(CircuitArchitecture(1, (1,))))
    reps = [importance_sampling_fp(single, 2, 100_000, seed) for seed in range(50)]
    pooled = math.fsum(r.estimate for r in reps) / 50
    pooled_se = math.sqrt(math.fsum(r.std_error**2 for r in reps)) / 50
    single_ok = abs(pooled - 3 / 8) <= 3 * pooled_se

    arch = example_circuit()
    diff = difference_distribution(build_spectrum_pauli(arch))
    exact = frame_potential_pauli(arch, 15, factorize=False).values()
    worst_z, ratios = 0.0, []
    for t in range(1, 16):
        u = importance_sampling_fp(diff, t, 100_000, 123)
        a = importance_sampling_fp(diff, t, 100_000, 123, mode="absorbing")
        z = (u.estimate - exact[t - 1]) / u.std_error if u.std_error else 0.0
        worst_z = max(worst_z, abs(z))
        ratios.append(a.estimate / exact[t - 1])
    elapsed = time.perf_counter() - start
    ok = single_ok and worst_z <= 3 and elapsed < 120
    report(
        5, ok,
        f"pooled n=N=1 t=2: {pooled:.5f} +- {pooled_se:.5f} vs 0.375; example max |z|={worst_z:.2f}; "
        f"absorbing/exact in [{min(ratios):.2f}, {max(ratios):.2f}] (biased low); {elapsed:.1f}s",
    )
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="the 2688 circuits at N=5 have v_U=2; v_U=1 would need V_U=2^N, which forces N=n",
)
def test_c06_census():
    start = time.perf_counter()
    tally = census_exhaustive(4)
    elapsed = time.perf_counter() - start
    at5 = tally.counts[5]
    ok = tally.total == 32192 and at5.get(1) == 2688 and at5.get(4) == 315 and elapsed < 60
    report(
        6, ok,
        f"total={tally.total}, N=5 reduced volumes {dict(sorted(at5.items()))} "
        f"(expected 2688 at v_U=1, 315 at v_U=4) in {elapsed:.2f}s",
    )
    assert ok


def test_c06_census_matching_parts():
    tally = census_exhaustive(4)
    assert tally.total == 32192
    assert tally.counts[5] == {2: 2688, 4: 315}


def test_c07_volume_bounds():
    start = time.perf_counter()
    rng = random.Random(7)
    bad = 0
    for _ in range(10_000):
        n = rng.randint(1, 6)
        arch = random_arch(rng, n)
        V, _ = lattice_volume_pauli(arch)
        minimal = arch.N == n and gf2_rank(arch.A) == n
        bad += not volume_bounds(n, arch.N).holds(V) or ((V == 1 << arch.N) != minimal)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 60
    report(7, ok, f"{10_000 - bad}/10000 circuits satisfy the bounds and the equality case in {elapsed:.2f}s")
    assert ok


def test_c08_monotonicity():
    rng = random.Random(8)
    bad = 0
    for _ in range(200):
        n = rng.randint(1, 3)
        m = (1 << n) - 1
        if m == 1:
            small, big = CircuitArchitecture(1, (1,)), CircuitArchitecture(1, (1,))
        else:
            cols = rng.sample(range(1, m + 1), rng.randint(2, m))
            cut = rng.randint(1, len(cols) - 1)
            small, big = CircuitArchitecture(n, tuple(cols[:cut])), CircuitArchitecture(n, tuple(cols))
        fs = frame_potential_pauli(small, 6).fractions()
        fb = frame_potential_pauli(big, 6).fractions()
        bad += any(b > a for a, b in zip(fs, fb))
    report(8, bad == 0, f"{200 - bad}/200 nested pairs with F_big(t) <= F_small(t) exactly for t<=6")
    assert bad == 0


def _random_general(rng):
    # two integer-spectrum Hamiltonians on two qubits, dyadic initial state
    while True:
        D = [[rng.randint(-3, 3) for _ in range(4)] for _ in range(2)]
        cuts = sorted(rng.sample(range(1, 16), 3))
        amps = [Fraction(b - a, 16) for a, b in zip([0] + cuts, cuts + [16])]
        try:
            return build_spectrum_general(D, [float(a) for a in amps])
        except CommFPError:
            continue


def test_c09_quadrature_oracle():
    rng = random.Random(9)
    worst = 0.0
    for _ in range(50):
        spec = _random_general(rng)
        exact = frame_potential_exact(spec, 5).values()
        for t in range(1, 6):
            worst = max(worst, abs(quadrature_oracle_fp(spec, t) - exact[t - 1]))
    report(9, worst < 1e-10, f"max |quadrature - exact| = {worst:.2e} over 50 circuits, t<=5")
    assert worst < 1e-10


def test_c10_noncomm_census():
    start = time.perf_counter()
    counts = census_2q().counts()
    elapsed = time.perf_counter() - start
    ok = counts == (256, 120, 72, 48) and elapsed < 5
    report(10, ok, f"counts {counts} in {elapsed:.2f}s")
    assert ok


def test_c11_error_slope():
    arch = all_rotations(2)
    V, _ = lattice_volume_pauli(arch)
    s = frame_potential_all_rotations(2, 200)
    fit = fit_error_constant(s, V, arch.N, t_min=3, t_max=200)
    target = -(arch.N / 2 + 1)
    ok = abs(fit.slope - target) <= 0.05 * abs(target)
    report(11, ok, f"slope {fit.slope:.4f} vs {target} (c={fit.c:.4f}, {fit.points} points)")
    assert ok


def _run_bytes(argv, threads, tmp_path):
    target = tmp_path / f"out_{threads}"
    code = run(argv + ["--threads", str(threads), "--out", str(target)], stdout=io.StringIO(), stderr=io.StringIO())
    assert code == 0
    return target.read_bytes()


def test_c12_determinism(tmp_path):
    ex = str(ROOT / "circuits" / "example1.json")
    ar = str(ROOT / "circuits" / "all_rotations_n2.json")
    runs = [
        ["sample", "--circuit", ex, "--method", "is", "--t", "6", "--samples", "20000", "--seed", "11"],
        ["sample", "--circuit", ex, "--method", "is-absorbing", "--t", "6", "--samples", "20000", "--seed", "11"],
        ["sample", "--circuit", ar, "--method", "multinomial", "--t", "40", "--samples", "20000", "--seed", "11"],
        ["census", "--n", "5", "--samples", "20", "--seed", "11"],
        ["compare", "--circuit", ar, "--tmax", "5", "--methods", "exact,approx,is,is-absorbing,multinomial",
         "--samples", "10000", "--seed", "11"],
    ]
    same = [_run_bytes(a, 1, tmp_path) == _run_bytes(a, 3, tmp_path) for a in runs]
    report(12, all(same), f"{sum(same)}/{len(same)} sampling commands byte-identical for --threads 1 vs 3")
    assert all(same)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-rA"]))
