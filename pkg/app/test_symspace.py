import math
from collections import Counter
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from app.errors import CombinatorialOverflowError, DomainError, ResourceError
from app.models.occupation import OccupationVector
from app.models.state import SymVector
from app.symspace import (
    basis_vector,
    check_oracle_cap,
    enumerate_occupations,
    expand_to_full,
    letter_strings,
    multinomial,
    occupation_array,
    occupation_rank,
    occupation_unrank,
    project_to_sym,
    sym_dim,
)


def test_canonical_order_two_levels():
    assert [occ.counts for occ in enumerate_occupations(2, 2)] == [(2, 0), (1, 1), (0, 2)]


def test_canonical_order_three_levels():
    counts = [occ.counts for occ in enumerate_occupations(2, 3)]
    assert counts == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]


def test_zero_particles_has_one_state():
    assert [occ.counts for occ in enumerate_occupations(0, 4)] == [(0, 0, 0, 0)]
    assert sym_dim(0, 4) == 1


@given(st.integers(min_value=0, max_value=7), st.integers(min_value=2, max_value=5))
def test_enumeration_size_matches_dimension(n, d):
    occs = enumerate_occupations(n, d)
    assert len(occs) == sym_dim(n, d) == math.comb(n + d - 1, d - 1)
    assert len(set(occs)) == len(occs)
    assert all(occ.total == n and occ.d == d for occ in occs)


def test_rank_follows_enumeration():
    for rank, occ in enumerate(enumerate_occupations(4, 3)):
        assert occupation_rank(occ) == rank
        assert occupation_unrank(rank, 4, 3) == occ


def test_unrank_out_of_range():
    with pytest.raises(DomainError):
        occupation_unrank(sym_dim(3, 2), 3, 2)


def test_invalid_dimensions():
    with pytest.raises(DomainError):
        sym_dim(2, 1)
    with pytest.raises(DomainError):
        enumerate_occupations(-1, 3)


def test_occupation_array_is_read_only():
    arr = occupation_array(3, 2)
    assert arr.shape == (4, 2)
    with pytest.raises(ValueError):
        arr[0, 0] = 7


def test_multinomial_values():
    assert multinomial(OccupationVector((2, 1))) == 3
    assert multinomial((1, 1, 1)) == 6
    assert multinomial((0, 0)) == 1


def test_multinomial_overflow_is_reported():
    with pytest.raises(CombinatorialOverflowError):
        multinomial((40, 40))
    with pytest.raises(OverflowError):
        multinomial((40, 40))


def test_oracle_cap():
    assert check_oracle_cap(12, 2, 4096) == 4096
    with pytest.raises(ResourceError):
        check_oracle_cap(13, 2, 4096)


def test_letter_strings_lexicographic():
    strings = letter_strings(2, 2)
    assert strings.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]


def test_basis_state_expands_to_normalized_sum():
    full = expand_to_full(basis_vector(OccupationVector((1, 1))))
    np.testing.assert_allclose(full, [0.0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0.0], atol=1e-15)


def test_projection_inverts_expansion(rng):
    dim = sym_dim(4, 3)
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v = SymVector(4, 3, amps / np.linalg.norm(amps), normalized=True)
    full = expand_to_full(v)
    assert full.shape == (3**4,)
    assert abs(np.linalg.norm(full) - 1.0) < 1e-12
    np.testing.assert_allclose(project_to_sym(full, 4, 3).amplitudes, v.amplitudes, atol=1e-12)


def test_multinomial_three_levels():
    assert multinomial((2, 1, 1)) == 12


@given(st.integers(min_value=0, max_value=6), st.integers(min_value=2, max_value=4))
@settings(deadline=None)
def test_multinomial_counts_letter_arrangements(n, d):
    strings = letter_strings(n, d)
    counts = Counter(tuple(int(c) for c in np.bincount(row, minlength=d)) for row in strings)
    assert len(counts) == sym_dim(n, d)
    for occ in enumerate_occupations(n, d):
        assert counts[occ.counts] == multinomial(occ)


@pytest.mark.parametrize("n, d", [(1, 2), (3, 2), (4, 3), (3, 4)])
def test_expansion_preserves_inner_products(rng, n, d):
    dim = sym_dim(n, d)
    u, v = (SymVector(n, d, rng.normal(size=dim) + 1j * rng.normal(size=dim)) for _ in range(2))
    assert np.vdot(expand_to_full(u), expand_to_full(v)) == pytest.approx(u.inner(v), abs=1e-10)
