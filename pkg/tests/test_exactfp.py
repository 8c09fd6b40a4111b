import itertools
import random
from fractions import Fraction
from math import comb

import pytest

from commfp.arch import CircuitArchitecture, all_rotations, gf2_rank
from commfp.errors import SupportTooLarge
from commfp.exactfp import (
    DyadicSeries,
    abelian_square_counts,
    closed_form_min_rotations,
    convolve_power,
    expressiveness,
    frame_potential_all_rotations,
    frame_potential_exact,
    frame_potential_pauli,
    frame_potential_rank_formula,
    haar_frame_potential,
    independent_blocks,
)
from commfp.spectrum import build_spectrum_general, build_spectrum_pauli, difference_distribution
from helpers import random_arch

ONE_QUBIT = CircuitArchitecture(1, (1,))


def brute_force_fp(arch, t):
    """Direct enumeration of P(K_1 + .. + K_t = K'_1 + .. + K'_t)."""
    s = build_spectrum_pauli(arch)
    omega = [tuple(r) for r in s.omega]
    sums = {}
    for combo in itertools.product(omega, repeat=t):
        key = tuple(map(sum, zip(*combo)))
        sums[key] = sums.get(key, 0) + 1
    return Fraction(sum(c * c for c in sums.values()), len(omega) ** (2 * t))


def test_convolution_examples(example):
    s1 = build_spectrum_pauli(ONE_QUBIT)
    d = convolve_power(s1, 2)
    assert d.as_dict() == {(-2,): Fraction(1, 4), (0,): Fraction(1, 2), (2,): Fraction(1, 4)}
    assert convolve_power(s1, 1).as_dict() == {(-1,): Fraction(1, 2), (1,): Fraction(1, 2)}
    dist = convolve_power(build_spectrum_pauli(example), 10)
    assert dist.total_mass() == 1
    assert (abs(dist.support) <= 10).all()


def test_example_first_values(example):
    s = frame_potential_exact(build_spectrum_pauli(example), 3)
    assert s.fraction(1) == Fraction(1, 8)
    assert expressiveness(s, 4)[0] == Fraction(1, 2)
    assert frame_potential_pauli(example, 3).fractions() == s.fractions()


def test_t1_rank_formula_and_zero_mass():
    rng = random.Random(4)
    for _ in range(25):
        arch = random_arch(rng, rng.randint(1, 4))
        spec = build_spectrum_pauli(arch)
        F1 = frame_potential_exact(spec, 1).fraction(1)
        assert F1 == frame_potential_rank_formula(arch) == Fraction(1, 2 ** gf2_rank(arch.A))
        assert F1 == difference_distribution(spec).zero_mass()
        assert expressiveness(frame_potential_exact(spec, 1), arch.n)[0] == Fraction(2 ** gf2_rank(arch.A), 2**arch.n)


def test_closed_form_values():
    assert closed_form_min_rotations(3, 0) == 1
    assert closed_form_min_rotations(3, 1) == Fraction(1, 8)
    assert closed_form_min_rotations(2, 2) == Fraction(9, 64)
    assert closed_form_min_rotations(2, 3) == Fraction(25, 256)
    for t in range(0, 30):
        assert closed_form_min_rotations(1, t) == Fraction(comb(2 * t, t), 4**t)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_identity_matches_closed_form(n):
    arch = CircuitArchitecture(n, tuple(1 << i for i in range(n)))
    s = frame_potential_pauli(arch, 12, factorize=False, closed_forms=False)
    assert s.fractions() == [closed_form_min_rotations(n, t) for t in range(1, 13)]


def test_haar():
    assert [haar_frame_potential(1, t) for t in range(1, 6)] == [Fraction(1, t + 1) for t in range(1, 6)]
    assert haar_frame_potential(3, 1) == Fraction(1, 8)
    assert haar_frame_potential(2, 3) == Fraction(1, 20)


def test_brute_force_equivalence():
    for n in (1, 2):
        for N in range(n, (1 << n)):
            for cols in itertools.combinations(range(1, 1 << n), N):
                arch = CircuitArchitecture(n, cols)
                s = frame_potential_exact(build_spectrum_pauli(arch), 3)
                for t in (1, 2, 3):
                    assert s.fraction(t) == brute_force_fp(arch, t)


def test_pauli_denominators():
    arch = CircuitArchitecture(3, (1, 2, 3, 4))
    r = gf2_rank(arch.A)
    s = frame_potential_exact(build_spectrum_pauli(arch), 5)
    assert list(s.exponents) == [2 * r * t for t in range(1, 6)]


def test_expressiveness_in_unit_interval():
    rng = random.Random(8)
    for _ in range(20):
        arch = random_arch(rng, rng.randint(1, 3))
        s = frame_potential_pauli(arch, 6)
        assert all(0 < e <= 1 for e in expressiveness(s, arch.n))
    haar_like = DyadicSeries.from_exact(range(1, 4), [1, 1, 1], [1, 2, 2])
    # F = 1/2, 1/4, 1/4 against n = 1 Haar values 1/2, 1/3, 1/4
    assert expressiveness(haar_like, 1) == [1, Fraction(4, 3), 1]


def test_monotone_in_rotations():
    rng = random.Random(21)
    for _ in range(40):
        n = rng.randint(1, 3)
        small = random_arch(rng, n, rng.randint(n, (1 << n) - 1))
        rest = [c for c in range(1, 1 << n) if c not in small.columns]
        if not rest:
            continue
        big = small.extend(rng.sample(rest, rng.randint(1, len(rest))))
        a, b = frame_potential_pauli(small, 6), frame_potential_pauli(big, 6)
        assert all(y <= x for x, y in zip(a.fractions(), b.fractions()))


def test_abelian_square_counts_small():
    # m letters, t = 2: sum of squared multinomials = m * 1 + C(m, 2) * 4
    for m in range(1, 7):
        assert abelian_square_counts(m, 2)[2] == m + 4 * comb(m, 2)
    assert abelian_square_counts(2, 10)[1:] == [comb(2 * t, t) for t in range(1, 11)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_all_rotations_formula_matches_convolution(n):
    arch = all_rotations(n)
    conv = frame_potential_pauli(arch, 8, factorize=False, closed_forms=False)
    assert conv.fractions() == frame_potential_all_rotations(n, 8).fractions()


def test_factorisation_matches_full_convolution():
    rng = random.Random(6)
    for _ in range(25):
        arch = random_arch(rng, rng.randint(2, 4), None)
        if arch.N > 8:
            continue
        full = frame_potential_pauli(arch, 5, factorize=False, closed_forms=False)
        assert frame_potential_pauli(arch, 5).fractions() == full.fractions()


def test_independent_blocks():
    arch = CircuitArchitecture.from_rotations(4, [[1], [2], [1, 2], [3], [4], [3, 4]], check=False)
    blocks = independent_blocks(arch)
    assert sorted(map(len, blocks)) == [3, 3]


def test_float_mode_series():
    spec = build_spectrum_general([[1, -1, 1, -1], [1, 1, -1, -1]], [0.1, 0.2, 0.3, 0.4])
    s = frame_potential_exact(spec, 4)
    assert not s.exact and s.forward_error is not None
    # t = 1 equals sum of squared masses
    assert abs(s.floats[0] - sum(m * m for m in spec.masses)) < 1e-15


def test_support_cap():
    with pytest.raises(SupportTooLarge):
        convolve_power(build_spectrum_pauli(all_rotations(3)), 40, cap=1000)
