import math
import random

import numpy as np
import pytest

from commfp import kernels
from commfp.arch import CircuitArchitecture, all_rotations, example_circuit
from commfp.errors import GridTooLarge, InvalidArchitecture
from commfp.exactfp import closed_form_min_rotations, frame_potential_exact, frame_potential_pauli
from commfp.montecarlo import importance_sampling_fp, multinomial_fp, quadrature_oracle_fp
from commfp.spectrum import build_spectrum_general, build_spectrum_pauli, difference_distribution
from helpers import BACKENDS, random_arch

ONE = CircuitArchitecture(1, (1,))


def diff_of(arch):
    return difference_distribution(build_spectrum_pauli(arch))


def test_degenerate_walk():
    d = difference_distribution(build_spectrum_general([[4, 0]], [1.0, 0.0]))
    r = importance_sampling_fp(d, 5, 100, 1)
    assert (r.estimate, r.std_error) == (1.0, 0.0)


def test_one_qubit_t2_unbiased():
    r = importance_sampling_fp(diff_of(ONE), 2, 20_000, 42)
    assert abs(r.estimate - 0.375) < 3 * r.std_error


def test_unbiased_over_seeds():
    d = diff_of(ONE)
    reps = [importance_sampling_fp(d, 2, 2000, s) for s in range(50)]
    pooled = sum(r.estimate for r in reps) / 50
    se = math.sqrt(sum(r.std_error**2 for r in reps)) / 50
    assert abs(pooled - 0.375) < 3 * se


def test_report_is_pure_function_of_seed():
    d = diff_of(example_circuit())
    a = importance_sampling_fp(d, 6, 9000, 5, threads=1)
    b = importance_sampling_fp(d, 6, 9000, 5, threads=3)
    assert a == b
    assert importance_sampling_fp(d, 6, 9000, 6) != a


@pytest.mark.parametrize("name", BACKENDS)
def test_backends_give_same_report(name):
    d = diff_of(example_circuit())
    ref = importance_sampling_fp(d, 5, 5000, 3, mode="absorbing")
    with kernels.use_backend(name):
        assert importance_sampling_fp(d, 5, 5000, 3, mode="absorbing") == ref


def test_absorbing_is_lower_biased():
    d = diff_of(example_circuit())
    exact = float(frame_potential_pauli(example_circuit(), 8).fraction(8))
    r = importance_sampling_fp(d, 8, 40_000, 9, mode="absorbing")
    assert r.estimate < exact


def test_mode_and_seed_validation():
    d = diff_of(ONE)
    with pytest.raises(ValueError):
        importance_sampling_fp(d, 2, 10, 1, mode="greedy")
    with pytest.raises(ValueError):
        importance_sampling_fp(d, 2, 10, -1)


def test_multinomial_t1_exact():
    for n in range(1, 6):
        r = multinomial_fp(n, 1, 500, 11)
        assert r.estimate == 2.0**-n and r.std_error == 0.0


def test_multinomial_one_qubit_converges():
    for t in (2, 5, 13):
        r = multinomial_fp(1, t, 20_000, t)
        exact = float(closed_form_min_rotations(1, t))
        assert abs(r.estimate - exact) < 4 * r.std_error


def test_multinomial_large_t_no_overflow():
    r = multinomial_fp(5, 200, 100, 1)
    assert r.estimate > 0 and math.isfinite(r.log2_estimate)


def test_multinomial_architecture_check(example):
    with pytest.raises(InvalidArchitecture):
        multinomial_fp(4, 3, 10, 1, arch=example)
    multinomial_fp(2, 3, 10, 1, arch=all_rotations(2))


def test_quadrature_examples():
    assert quadrature_oracle_fp(build_spectrum_pauli(ONE), 1) == pytest.approx(0.5, abs=1e-12)
    pt = build_spectrum_general([[3, 1]], [1.0, 0.0])
    assert quadrature_oracle_fp(pt, 4) == 1.0


def test_quadrature_matches_exact_small_circuits():
    rng = random.Random(1)
    for _ in range(10):
        arch = random_arch(rng, 2, rng.randint(2, 3))
        spec = build_spectrum_pauli(arch)
        ex = frame_potential_exact(spec, 5)
        for t in range(1, 6):
            assert abs(quadrature_oracle_fp(spec, t) - float(ex.fraction(t))) < 1e-10


def test_quadrature_odd_spectrum_uses_full_torus():
    spec = build_spectrum_general([[0, 1, 0, 3], [0, 0, 1, 1]], [0.25] * 4)
    ex = frame_potential_exact(spec, 4)
    for t in range(1, 5):
        assert abs(quadrature_oracle_fp(spec, t) - float(ex.fraction(t))) < 1e-10


def test_grid_cap():
    with pytest.raises(GridTooLarge):
        quadrature_oracle_fp(build_spectrum_pauli(all_rotations(2)), 200, grid_cap=10**5)
