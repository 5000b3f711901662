import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddvv.algebra import IndexScheme, basis_matrices, family_coefficients, random_orthogonal
from ddvv.core import normal_form_pair
from ddvv.errors import InputError
from ddvv.lemmas import (
    greedy_subset,
    lemma22_equality_witness,
    lemma22_sum,
    lemma23_chain,
    lemma23_sum,
    lemma24_sum,
    lemma_suite,
    mirror_spectrum,
    random_unit_spectrum,
    spectrum_profile,
)

SQ2 = math.sqrt(2.0)


def test_profile_examples():
    p = spectrum_profile([1 / SQ2, 0.0, -1 / SQ2])
    assert p.I == ((0, 2),) and p.n0 == 1 and p.branch == "both"
    p = spectrum_profile([1.0, 0.0, 0.0, 0.0])
    assert p.I == () and p.n0 == 0
    p = spectrum_profile([math.sqrt(2 / 3), -1 / math.sqrt(6), -1 / math.sqrt(6)])
    assert p.I == ((0, 1), (0, 2)) and p.I1 == (1, 2) and p.branch == "first-row"


def test_profile_sorts_and_validates():
    p = spectrum_profile([-1 / SQ2, 1 / SQ2, 0.0])
    np.testing.assert_allclose(p.lam, [1 / SQ2, 0.0, -1 / SQ2])
    with pytest.raises(InputError):
        spectrum_profile([1.0, 1.0])


def test_lemma22_examples():
    assert lemma22_sum(spectrum_profile([1 / SQ2, 0.0, -1 / SQ2])) == pytest.approx(1.0, abs=1e-12)
    assert lemma22_sum(spectrum_profile([1.0, 0.0])) == 0.0
    lam = [0.9, 0.3, -0.1, -math.sqrt(1 - 0.91)]
    value = lemma22_sum(spectrum_profile(lam))
    # only (0, 3) is more than 1 apart: (0.9 + 0.3)^2 - 1
    assert value == pytest.approx((0.9 + math.sqrt(0.09)) ** 2 - 1.0)
    assert value < 1


@pytest.mark.parametrize("n,n0,expected", [
    (3, 1, [1 / SQ2, 0.0, -1 / SQ2]),
    (2, 1, [1 / SQ2, -1 / SQ2]),
    (4, 2, [math.sqrt(2 / 3), 0.0, -1 / math.sqrt(6), -1 / math.sqrt(6)]),
])
def test_witness_formula(n, n0, expected):
    lam = lemma22_equality_witness(n, n0)
    np.testing.assert_allclose(lam, expected, atol=1e-15)
    prof = spectrum_profile(lam)
    assert prof.n0 == n0
    assert abs(lemma22_sum(prof) - 1.0) <= 1e-12
    mirrored = spectrum_profile(mirror_spectrum(lam))
    assert mirrored.branch in ("last-column", "both")
    assert abs(lemma22_sum(mirrored) - 1.0) <= 1e-12


def test_witness_range():
    with pytest.raises(InputError):
        lemma22_equality_witness(3, 3)
    with pytest.raises(InputError):
        lemma22_equality_witness(3, 0)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_lemma21_22_random(n, seed):
    prof = spectrum_profile(random_unit_spectrum(n, np.random.default_rng(seed)))
    assert lemma22_sum(prof) <= 1 + 1e-12


def wintgen_q(n):
    off, diag = normal_form_pair(n, 1.0 / SQ2)
    first = family_coefficients([off, diag])
    rest = np.linalg.svd(first.T)[2][2:].T
    return np.column_stack([first, rest])


def test_lemma23_examples(rng):
    scheme = IndexScheme.of(2)
    q = wintgen_q(2)
    assert lemma23_sum(scheme, q, 0, []) == 0.0
    assert lemma23_sum(scheme, q, 0, [1]) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(InputError):
        lemma23_sum(scheme, q, 0, [5])


def test_lemma23_greedy_is_max(rng):
    scheme = IndexScheme.of(3)
    q = random_orthogonal(scheme.N, rng)
    for alpha in range(scheme.N):
        greedy = lemma23_sum(scheme, q, alpha, greedy_subset(scheme, q, alpha))
        for _ in range(20):
            subset = np.flatnonzero(rng.random(scheme.N) < 0.5)
            assert lemma23_sum(scheme, q, alpha, subset) <= greedy + 1e-12
        assert greedy <= 1 + 1e-9


def test_lemma23_chain(rng):
    for n in (2, 3, 4):
        scheme = IndexScheme.of(n)
        for _ in range(20):
            q = random_orthogonal(scheme.N, rng)
            alpha = int(rng.integers(scheme.N))
            j = greedy_subset(scheme, q, alpha)
            direct, eig, bound = lemma23_chain(scheme, q, alpha, j)
            assert direct == pytest.approx(eig, abs=1e-10)
            assert direct <= bound + 1e-10 <= 1 + 1e-9


def test_lemma23_near_equality_has_witness_spectrum(rng):
    # equality pair, then a small generic rotation of the remaining basis
    n = 4
    scheme = IndexScheme.of(n)
    p = random_orthogonal(n, rng)
    off, diag = normal_form_pair(n, 1.0 / SQ2)
    first = family_coefficients([p @ diag @ p.T, p @ off @ p.T])
    rest = np.linalg.svd(first.T)[2][2:].T
    q = np.column_stack([first, rest @ random_orthogonal(scheme.N - 2, rng)])
    value = lemma23_sum(scheme, q, 0, greedy_subset(scheme, q, 0))
    assert value == pytest.approx(1.0, abs=1e-9)
    lam = np.sort(np.linalg.eigvalsh(basis_matrices(scheme, q)[0]))[::-1]
    np.testing.assert_allclose(lam, lemma22_equality_witness(n, 1)[[0, 1, 2, 3]][np.argsort(
        -lemma22_equality_witness(n, 1))], atol=1e-4)


def test_lemma24_examples():
    s2 = IndexScheme.of(2)
    assert lemma24_sum(s2, np.eye(3), 1) == pytest.approx(2.0, abs=1e-14)
    assert lemma24_sum(s2, np.eye(3), 0) == pytest.approx(1.0, abs=1e-14)


def test_lemma24_random(rng):
    for n in range(1, 6):
        scheme = IndexScheme.of(n)
        for _ in range(30):
            q = random_orthogonal(scheme.N, rng)
            mats = basis_matrices(scheme, q)
            for alpha in range(scheme.N):
                v = lemma24_sum(scheme, q, alpha)
                assert v == pytest.approx(n - np.trace(mats[alpha]) ** 2, abs=1e-10)
                assert v <= n + 1e-10


def test_lemma_suite_reproducible():
    a = lemma_suite(seed=3, spectra=200, orthogonal=20)
    b = lemma_suite(seed=3, spectra=200, orthogonal=20)
    assert a == b
    for key, value in a.items():
        if isinstance(value, tuple):
            assert value[0] <= value[1] + 1e-9, key
