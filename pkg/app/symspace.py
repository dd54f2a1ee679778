"""Occupation-number combinatorics and the symmetric-subspace basis.

Basis states |{n_i}> of H_+^{(x)n} are labelled by occupation vectors and ordered
lexicographically with the first coordinate descending: for n=2, d=2 the order is
(2,0), (1,1), (0,2). Ranks, file outputs and tests all follow this order.

The normalized convention is used throughout:
|{n}> = sqrt(prod n_i! / n!) * sum over the n!/prod n_i! distinct letter arrangements.
"""
import itertools
import logging
import math
from functools import lru_cache
import numpy as np
from .config import ORACLE_CAP
from .errors import CombinatorialOverflowError, DomainError, ResourceError
from .models.occupation import OccupationVector
from .models.state import SymVector

logger = logging.getLogger(__name__)

# Largest multinomial returned by multinomial(); larger values raise.
MULTINOMIAL_BOUND = 2**63 - 1


def _check_nd(n, d):
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if n < 0:
        raise DomainError(f"particle number must be >= 0, got {n}")


def _compositions(n, parts):
    if parts == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=256)
def _occupations(n, d):
    return tuple(OccupationVector(counts) for counts in _compositions(n, d))


def enumerate_occupations(n, d):
    """All compositions of n into d non-negative parts, in canonical order."""
    _check_nd(n, d)
    return list(_occupations(n, d))


@lru_cache(maxsize=256)
def occupation_array(n, d):
    """The canonical occupations as a read-only (sym_dim, d) integer array."""
    _check_nd(n, d)
    arr = np.array([occ.counts for occ in _occupations(n, d)], dtype=np.int64).reshape(-1, d)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=256)
def occupation_index(n, d):
    """Map from counts tuple to canonical rank."""
    _check_nd(n, d)
    return {occ.counts: rank for rank, occ in enumerate(_occupations(n, d))}


def sym_dim(n, d):
    _check_nd(n, d)
    return math.comb(n + d - 1, d - 1)


def multinomial_unbounded(counts):
    total = sum(counts)
    value = math.factorial(total)
    for c in counts:
        value //= math.factorial(c)
    return value


def multinomial(occ):
    """total! / prod counts_i!, exact; raises beyond MULTINOMIAL_BOUND."""
    counts = occ.counts if isinstance(occ, OccupationVector) else OccupationVector(tuple(occ)).counts
    value = multinomial_unbounded(counts)
    if value > MULTINOMIAL_BOUND:
        raise CombinatorialOverflowError(
            f"multinomial of {counts} exceeds the exact bound 2**63 - 1"
        )
    return value


@lru_cache(maxsize=64)
def log_factorials(n):
    """log(j!) for j = 0..n as a float array."""
    values = np.zeros(n + 1)
    if n > 0:
        values[1:] = np.cumsum(np.log(np.arange(1, n + 1, dtype=np.float64)))
    values.setflags(write=False)
    return values


def log_multinomial_probabilities(occs, d):
    """log of multinomial(n) / d^n for each row of an occupation array."""
    occs = np.asarray(occs)
    n = int(occs[0].sum()) if len(occs) else 0
    logf = log_factorials(max(n, int(occs.max()) if occs.size else 0))
    return logf[n] - logf[occs].sum(axis=1) - n * math.log(d)


def occupation_rank(occ):
    """Position of occ in enumerate_occupations(occ.total, occ.d)."""
    counts = occ.counts
    d = len(counts)
    rank = 0
    remaining = sum(counts)
    for i, c in enumerate(counts[:-1]):
        parts_after = d - i - 1
        # every vector with a larger value at position i comes first
        for v in range(remaining, c, -1):
            rank += math.comb(remaining - v + parts_after - 1, parts_after - 1)
        remaining -= c
    return rank


def occupation_unrank(rank, n, d):
    size = sym_dim(n, d)
    if not 0 <= rank < size:
        raise DomainError(f"rank {rank} outside [0, {size}) for n={n}, d={d}")
    counts = []
    remaining = n
    for i in range(d - 1):
        parts_after = d - i - 1
        v = remaining
        while True:
            block = math.comb(remaining - v + parts_after - 1, parts_after - 1)
            if rank < block:
                break
            rank -= block
            v -= 1
        counts.append(v)
        remaining -= v
    counts.append(remaining)
    return OccupationVector(tuple(counts))


def basis_vector(occ):
    """The symmetric basis state |{n}> as a SymVector."""
    amps = np.zeros(sym_dim(occ.total, occ.d), dtype=np.complex128)
    amps[occupation_rank(occ)] = 1.0
    return SymVector(occ.total, occ.d, amps, normalized=True)


def check_oracle_cap(n, d, cap):
    size = d**n
    if size > cap:
        raise ResourceError(f"full tensor space d^n = {d}^{n} = {size} exceeds the oracle cap {cap}")
    return size


@lru_cache(maxsize=64)
def letter_strings(n, d):
    """All d^n letter strings as rows, in lexicographic order (site 0 most significant)."""
    strings = np.array(list(itertools.product(range(d), repeat=n)), dtype=np.int64).reshape(d**n, n)
    strings.setflags(write=False)
    return strings


@lru_cache(maxsize=64)
def _string_layout(n, d):
    """For each letter string: the rank of its occupation and sqrt(prod n_i!/n!)."""
    strings = letter_strings(n, d)
    counts = np.stack([(strings == level).sum(axis=1) for level in range(d)], axis=1)
    index = occupation_index(n, d)
    ranks = np.array([index[tuple(int(c) for c in row)] for row in counts], dtype=np.int64)
    weights = np.array([1.0 / math.sqrt(multinomial_unbounded(tuple(row))) for row in counts])
    return ranks, weights


def expand_to_full(v, cap=ORACLE_CAP):
    """Embed a symmetric vector into the full d^n tensor space."""
    check_oracle_cap(v.n, v.d, cap)
    ranks, weights = _string_layout(v.n, v.d)
    return v.amplitudes[ranks] * weights


def project_to_sym(full, n, d, cap=ORACLE_CAP):
    """Inverse of expand_to_full on symmetric inputs: <{n}|full> for each basis state."""
    check_oracle_cap(n, d, cap)
    ranks, weights = _string_layout(n, d)
    amps = np.zeros(sym_dim(n, d), dtype=np.complex128)
    np.add.at(amps, ranks, np.asarray(full, dtype=np.complex128) * weights)
    return SymVector(n, d, amps)
