import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddvv.algebra import (
    IndexScheme,
    SymFamily,
    basis_matrices,
    build_basis,
    coefficients_to_matrices,
    commutator,
    compound,
    family_coefficients,
    frob_sq,
    gram_entry_basis,
    gram_row_identity,
    random_orthogonal,
    symmetrize,
)
from ddvv.errors import InputError

from conftest import random_symmetric

SQ2 = math.sqrt(2.0)


@pytest.mark.parametrize("n", range(1, 9))
def test_index_order_is_lexicographic_bijection(n):
    scheme = IndexScheme.of(n)
    assert scheme.N == n * (n + 1) // 2
    pairs = [tuple(p) for p in scheme.pairs]
    assert pairs == sorted(pairs)
    assert len(set(pairs)) == scheme.N
    for alpha, (i, j) in enumerate(pairs):
        assert scheme.index(i, j) == scheme.index(j, i) == alpha
        assert scheme.diagonal[alpha] == (i == j)


def test_index_out_of_range():
    with pytest.raises(InputError):
        IndexScheme.of(3).index(0, 3)
    with pytest.raises(InputError):
        IndexScheme(0)


def test_basis_n2_order():
    b = build_basis(IndexScheme.of(2))
    expected = [np.array([[1, 0], [0, 0]]), np.array([[0, 1], [1, 0]]) / SQ2,
                np.array([[0, 0], [0, 1]])]
    for got, want in zip(b, expected):
        np.testing.assert_array_equal(got, want)


def test_basis_n1():
    b = build_basis(IndexScheme.of(1))
    assert b.shape == (1, 1, 1) and b[0, 0, 0] == 1.0


@pytest.mark.parametrize("n", range(1, 9))
def test_basis_orthonormal(n):
    b = build_basis(IndexScheme.of(n)).reshape(-1, n * n)
    assert np.max(np.abs(b @ b.T - np.eye(len(b)))) <= 1e-14


def test_commutator_examples():
    b = np.array([[0.3, -1.2], [-1.2, 2.0]])
    np.testing.assert_array_equal(commutator(np.eye(2), b), np.zeros((2, 2)))
    c = commutator(np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_array_equal(c, [[0, 2], [-2, 0]])
    assert frob_sq(c) == 8.0
    e = build_basis(IndexScheme.of(2))
    c = commutator(e[0], e[1])
    np.testing.assert_allclose(c, np.array([[0, 1], [-1, 0]]) / SQ2, atol=1e-15)
    assert frob_sq(c) == pytest.approx(1.0, abs=1e-15)


def test_commutator_dimension_mismatch():
    with pytest.raises(InputError):
        commutator(np.eye(2), np.eye(3))


def test_frob_sq():
    assert frob_sq(np.zeros((3, 3))) == 0.0
    assert frob_sq(np.diag([1.0, -1.0])) == 2.0
    assert frob_sq([[0, 2], [-2, 0]]) == 8.0


def test_commutator_of_symmetric_is_antisymmetric(rng):
    a, b = random_symmetric(rng, 2, 5)
    c = commutator(a, b)
    np.testing.assert_array_equal(c + c.T, np.zeros((5, 5)))


@pytest.mark.parametrize("alpha,beta,value", [
    ((0, 0), (0, 1), 1.0),
    ((0, 0), (1, 1), 0.0),
])
def test_gram_entry_n2(alpha, beta, value):
    assert gram_entry_basis(IndexScheme.of(2), alpha, beta) == value


def test_gram_entry_half_case():
    assert gram_entry_basis(IndexScheme.of(3), (0, 1), (0, 2)) == 0.5


@pytest.mark.parametrize("n", range(1, 9))
def test_gram_entry_all_pairs(n):
    scheme = IndexScheme.of(n)
    basis = build_basis(scheme)
    for a in range(scheme.N):
        for b in range(scheme.N):
            v = gram_entry_basis(scheme, a, b)
            assert v in (0.0, 0.5, 1.0)
            assert abs(v - frob_sq(commutator(basis[a], basis[b]))) <= 1e-12


def test_gram_row_identity_examples():
    s2 = IndexScheme.of(2)
    assert gram_row_identity(s2, (0, 0), (0, 0)) == pytest.approx(1.0, abs=1e-12)
    assert gram_row_identity(s2, (0, 0), (1, 1)) == pytest.approx(-1.0, abs=1e-12)
    for n in (2, 3, 5):
        assert gram_row_identity(IndexScheme.of(n), (0, 1), (0, 1)) == pytest.approx(n, abs=1e-12)


def brute_compound(a):
    """Minors via np.linalg.det on explicit 2x2 submatrices."""
    rows = list(itertools.combinations(range(a.shape[0]), 2))
    cols = list(itertools.combinations(range(a.shape[1]), 2))
    return np.array([[np.linalg.det(a[np.ix_(r, c)]) for c in cols] for r in rows])


def test_compound_examples():
    np.testing.assert_array_equal(compound(np.eye(3)), np.eye(3))
    np.testing.assert_array_equal(compound([[1, 2], [3, 4]]), [[-2.0]])


def test_compound_matches_determinants(rng):
    for shape in [(2, 2), (3, 5), (6, 4)]:
        a = rng.standard_normal(shape)
        np.testing.assert_allclose(compound(a), brute_compound(a), rtol=1e-12, atol=1e-12)


def test_compound_rejects_small():
    with pytest.raises(InputError):
        compound(np.ones((1, 3)))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_compound_multiplicative(m, k, n, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal((m, k)), rng.standard_normal((k, n))
    lhs, rhs = compound(a @ b), compound(a) @ compound(b)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(lhs)))
    np.testing.assert_allclose(compound(a.T), compound(a).T)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_compound_maps_orthogonal_to_orthogonal(n, seed):
    q = random_orthogonal(n, np.random.default_rng(seed))
    c = compound(q)
    assert np.max(np.abs(compound(q.T) @ c - np.eye(len(c)))) <= 1e-12


def test_family_coefficients_examples():
    e = build_basis(IndexScheme.of(2))
    np.testing.assert_array_equal(family_coefficients([e[0]]), [[1.0], [0.0], [0.0]])
    col = family_coefficients([[[0.0, 1.0], [1.0, 0.0]]])
    np.testing.assert_allclose(col, [[0.0], [SQ2], [0.0]], atol=1e-15)


def test_family_coefficients_round_trip(rng):
    for n, m in [(1, 2), (3, 4), (6, 2)]:
        fam = random_symmetric(rng, m, n)
        b = family_coefficients(fam)
        back = coefficients_to_matrices(IndexScheme.of(n), b)
        for r in range(m):
            assert np.linalg.norm(back[r] - fam[r]) <= 1e-12 * np.linalg.norm(fam[r])
        assert np.sum(b * b) == pytest.approx(np.sum(fam * fam), rel=1e-13)


def test_basis_matrices_entry_map(rng):
    scheme = IndexScheme.of(4)
    q = random_orthogonal(scheme.N, rng)
    mats = basis_matrices(scheme, q)
    for alpha in range(scheme.N):
        for beta, (i, j) in enumerate(scheme.pairs):
            want = q[beta, alpha] if i == j else q[beta, alpha] / SQ2
            assert mats[alpha, i, j] == pytest.approx(want, abs=1e-15)
            assert mats[alpha, j, i] == mats[alpha, i, j]
    flat = mats.reshape(scheme.N, -1)
    assert np.max(np.abs(flat @ flat.T - np.eye(scheme.N))) <= 1e-13


def test_symmetrize_rejects_asymmetric():
    with pytest.raises(InputError, match="not symmetric"):
        SymFamily([[[0.0, 1.0], [0.0, 0.0]]])
    out, defect = symmetrize(np.array([[1.0, 1.0 + 1e-12], [1.0, 0.0]]))
    assert defect == pytest.approx(1e-12, rel=1e-3)
    assert out[0, 1] == out[1, 0]


def test_random_orthogonal_special(rng):
    for k in (1, 2, 5):
        q = random_orthogonal(k, rng, special=True)
        assert np.allclose(q.T @ q, np.eye(k))
        assert np.linalg.det(q) == pytest.approx(1.0)
