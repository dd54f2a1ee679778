"""Equatorial qudit states, the multi-phase rotation and symmetric embeddings of product states."""
import math
import numpy as np
from .config import ORACLE_CAP
from .errors import DomainError
from .models.state import PhaseVector, QuditState, SymVector
from .symspace import check_oracle_cap, letter_strings, log_factorials, occupation_array


def make_equatorial(phases):
    """(1, e^{i phi_1}, ..., e^{i phi_{d-1}}) / sqrt(d)."""
    d = phases.d
    amps = np.exp(1j * phases.as_array()) / math.sqrt(d)
    amps[0] = 1.0 / math.sqrt(d)
    return QuditState(d, amps)


def reference_state(d):
    """|psi_0> = d^{-1/2} sum_i |i>."""
    return make_equatorial(PhaseVector.zeros(d))


def basis_state(level, d):
    if not 0 <= level < d:
        raise DomainError(f"level {level} outside [0, {d})")
    amps = np.zeros(d, dtype=np.complex128)
    amps[level] = 1.0
    return QuditState(d, amps)


def embed_product(state, n):
    """|c>^{(x)n} in the symmetric basis: amplitude sqrt(n!/prod n_i!) * prod c_i^{n_i}.

    Magnitudes are built in log space, so large n neither overflows the multinomial
    nor underflows the powers of |c_i|.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    occs = occupation_array(n, state.d)
    coeffs = state.amplitudes
    support = np.abs(coeffs) > 0.0
    logf = log_factorials(n)
    log_mag = 0.5 * (logf[n] - logf[occs].sum(axis=1)) + occs[:, support] @ np.log(np.abs(coeffs[support]))
    amps = np.exp(log_mag + 1j * (occs @ np.angle(coeffs)))
    # occupations touching a level where c_i = 0 carry no weight
    amps[occs[:, ~support].sum(axis=1) > 0] = 0.0
    amps /= np.linalg.norm(amps)
    return SymVector(n, state.d, amps, normalized=True)


def phase_factors(phases, n):
    """exp(i sum_{j>=1} n_j phi_j) for each canonical occupation of n particles."""
    occs = occupation_array(n, phases.d)
    return np.exp(1j * (occs @ phases.as_array()))


def apply_phases_sym(phases, v):
    """U(phi)^{(x)n} restricted to the symmetric subspace (diagonal in the occupation basis)."""
    if phases.d != v.d:
        raise DomainError(f"phase vector for d={phases.d} applied to a d={v.d} state")
    return SymVector(v.n, v.d, v.amplitudes * phase_factors(phases, v.n), normalized=v.normalized)


def apply_phases_full(phases, full, n, cap=ORACLE_CAP):
    """Letter-wise U(phi)^{(x)n} on a full tensor-space vector."""
    check_oracle_cap(n, phases.d, cap)
    strings = letter_strings(n, phases.d)
    total_phase = phases.as_array()[strings].sum(axis=1)
    return np.asarray(full, dtype=np.complex128) * np.exp(1j * total_phase)


def product_full(state, n, cap=ORACLE_CAP):
    """|c>^{(x)n} in the full tensor space, site 0 most significant."""
    check_oracle_cap(n, state.d, cap)
    vector = np.ones(1, dtype=np.complex128)
    for _ in range(n):
        vector = np.kron(vector, state.amplitudes)
    return vector
