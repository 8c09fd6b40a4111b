"""Compiled vs pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Times the Hermite normal form (through the lattice volume of random
circuits) and the importance-sampling path kernel, and checks that both
backends return identical results.
"""
import argparse
import random
import time

from commfp import kernels
from commfp.arch import CircuitArchitecture, example_circuit
from commfp.lattice import lattice_volume_pauli
from commfp.montecarlo import importance_sampling_fp
from commfp.spectrum import build_spectrum_pauli, difference_distribution


def _circuits(count, seed=0):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(3, 6)
        m = (1 << n) - 1
        out.append(CircuitArchitecture(n, tuple(rng.sample(range(1, m + 1), rng.randint(n, m)))))
    return out


def bench_hnf(archs):
    return [lattice_volume_pauli(a) for a in archs]


def bench_sis(diff):
    return [importance_sampling_fp(diff, t, 50_000, 1).estimate for t in (4, 8, 12)]


def best_of(fn, arg, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(arg)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not kernels.compiled_available():
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    cases = [
        ("hnf (2000 random circuits)", bench_hnf, _circuits(2000)),
        ("sis_paths (3 x 50000 paths)", bench_sis, difference_distribution(build_spectrum_pauli(example_circuit()))),
    ]
    print(f"{'kernel':32s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}  same")
    for name, fn, arg in cases:
        with kernels.use_backend("python"):
            tp, rp = best_of(fn, arg, args.repeat)
        with kernels.use_backend("compiled"):
            tc, rc = best_of(fn, arg, args.repeat)
        print(f"{name:32s} {tp:10.3f} {tc:11.3f} {tp / tc:7.1f}x  {rp == rc}")


if __name__ == "__main__":
    main()
