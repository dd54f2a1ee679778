"""The economical cloning machine.

The optimal N -> N + k*d cloner is the shift isometry V|{n}> = |{n} + k>. Its Choi
operator R = |r_k><r_k| is rank one, so the map has a single isometric Kraus operator
and needs no ancilla beyond the blank copies.

Transposition in the map reconstruction C(O) = Tr_N[(1 (x) O^T) R] is taken in the
canonical occupation basis.
"""
import logging
import math
import numpy as np
from .config import CHOI_CAP, TOL_EXACT
from .errors import DomainError, ResourceError
from .models.cloner import ChoiOperator
from .models.occupation import OccupationVector
from .models.state import SymVector
from .states import embed_product, make_equatorial, phase_factors
from .symspace import enumerate_occupations, occupation_index, sym_dim

logger = logging.getLogger(__name__)


def _as_block(block, d):
    block = block if isinstance(block, OccupationVector) else OccupationVector(tuple(block))
    if block.d != d:
        raise DomainError(f"block {block.label()} has {block.d} levels, expected {d}")
    return block


def block_isometry(block, n_in):
    """V_m |{n}> = |{n} + {m}> from H_+^{(x)N} into H_+^{(x)(N + |m|)}."""
    d = block.d
    m_out = n_in + block.total
    out_index = occupation_index(m_out, d)
    inputs = enumerate_occupations(n_in, d)
    V = np.zeros((sym_dim(m_out, d), len(inputs)), dtype=np.complex128)
    for col, occ in enumerate(inputs):
        V[out_index[occ.shifted(block).counts], col] = 1.0
    return V


def shift_isometry(spec):
    return block_isometry(spec.block, spec.n_in)


def clone(spec, phases):
    """V |psi(phi)>^{(x)N}; an M-particle symmetric state of unit norm."""
    if phases.d != spec.d:
        raise DomainError(f"phase vector for d={phases.d} used with a d={spec.d} cloner")
    source = embed_product(make_equatorial(phases), spec.n_in)
    return SymVector(spec.m_out, spec.d, shift_isometry(spec) @ source.amplitudes, normalized=True)


def _check_choi_side(d, n_in, m_out, cap):
    side = sym_dim(m_out, d) * sym_dim(n_in, d)
    if side > cap:
        raise ResourceError(f"dense Choi operator of side {side} exceeds the cap {cap}")
    return side


def choi_block_vector(d, n_in, m_out, block):
    """|r_m> = sum_n |{m} + {n}> (x) |{n}>, unnormalized, output factor first."""
    block = _as_block(block, d)
    if block.total != m_out - n_in:
        raise DomainError(f"block {block.label()} has total {block.total}, expected M - N = {m_out - n_in}")
    # entry (a, j) of V_m is <a|{n_j} + {m}>, so its row-major flattening is sum_j V_m|n_j> (x) |n_j>
    return block_isometry(block, n_in).reshape(-1)


def choi_operator(d, n_in, m_out, weights, cap=CHOI_CAP, tol=TOL_EXACT):
    """R = sum_m p_m |r_m><r_m| for a convex weight assignment over blocks."""
    if m_out < n_in:
        raise DomainError(f"M={m_out} must be >= N={n_in}")
    side = _check_choi_side(d, n_in, m_out, cap)
    blocks = {_as_block(block, d): float(p) for block, p in dict(weights).items()}
    if not blocks:
        raise DomainError("at least one block weight is required")
    if any(p < 0 or not math.isfinite(p) for p in blocks.values()):
        raise DomainError(f"block weights must be finite and non-negative: {list(blocks.values())}")
    if abs(math.fsum(blocks.values()) - 1.0) > tol:
        raise DomainError(f"block weights sum to {math.fsum(blocks.values())!r}, expected 1")
    R = np.zeros((side, side), dtype=np.complex128)
    for block, p in blocks.items():
        if p == 0.0:
            continue
        r = choi_block_vector(d, n_in, m_out, block)
        R += p * np.outer(r, r.conj())
    logger.debug(f"built Choi operator d={d} {n_in}->{m_out} side={side} blocks={len(blocks)}")
    return ChoiOperator(d=d, n_in=n_in, m_out=m_out, matrix=R, block_weights=blocks)


def optimal_choi(spec, cap=CHOI_CAP):
    """The rank-one operator concentrated on the uniform block m_i = k."""
    return choi_operator(spec.d, spec.n_in, spec.m_out, {spec.block: 1.0}, cap=cap)


def _check_density(rho, dim, tol):
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (dim, dim):
        raise DomainError(f"input density matrix has shape {rho.shape}, expected ({dim}, {dim})")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise DomainError("input density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise DomainError(f"input density matrix has trace {np.trace(rho).real!r}")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise DomainError("input density matrix is not positive")
    return rho


def apply_choi(R, rho_in, tol=1e-10):
    """C(O) = Tr_N[(1_M (x) O^T) R]."""
    rho = _check_density(rho_in, R.input_dim, tol)
    # (1 (x) O^T)_{(a,x),(a,y)} = O_{y,x}; contracting with R_{(a,y),(b,x)} traces the input factor
    return np.einsum("yx,aybx->ab", rho, R.as_tensor())


def conjugate_by(V, rho_in):
    """V rho V^dagger."""
    return V @ np.asarray(rho_in, dtype=np.complex128) @ V.conj().T


def phase_operator_diagonal(phases, n_in, m_out):
    """Diagonal of U(phi)^{(x)M} (x) U*(phi)^{(x)N} on the symmetric spaces."""
    return np.kron(phase_factors(phases, m_out), phase_factors(phases, n_in).conj())


def commutator_deviation(R, phases):
    """max |[R, U^{(x)M} (x) U*^{(x)N}]| using the diagonal form of the phase operator."""
    diag = phase_operator_diagonal(phases, R.n_in, R.m_out)
    # [R, D]_{ij} = R_ij (D_j - D_i)
    return float(np.abs(R.matrix * (diag[np.newaxis, :] - diag[:, np.newaxis])).max())


def extend_to_unitary(V, tol=1e-10):
    """Complete an isometry to a unitary whose first columns are V.

    The complement is built by Gram-Schmidt over the canonical basis vectors in rank order,
    with one re-orthogonalization pass per candidate.
    """
    V = np.asarray(V, dtype=np.complex128)
    rows, cols = V.shape
    if cols > rows or np.abs(V.conj().T @ V - np.eye(cols)).max() > tol:
        raise DomainError("input is not an isometry (V^dagger V != 1)")
    columns = [V[:, j] for j in range(cols)]
    for j in range(rows):
        if len(columns) == rows:
            break
        candidate = np.zeros(rows, dtype=np.complex128)
        candidate[j] = 1.0
        for _ in range(2):
            for q in columns:
                candidate = candidate - np.vdot(q, candidate) * q
        norm = np.linalg.norm(candidate)
        if norm > 1e-6:
            columns.append(candidate / norm)
    if len(columns) != rows:
        raise DomainError("Gram-Schmidt completion did not reach a full basis")
    return np.stack(columns, axis=1)


def ancilla_input(v, side):
    """v padded into the first columns of the output space (input (x) fixed ancilla state)."""
    amps = np.zeros(side, dtype=np.complex128)
    amps[: v.amplitudes.shape[0]] = v.amplitudes
    return amps


def economical_clone(spec, phases, unitary=None):
    """The clone produced by the unitary realization U (input (x) |a>)."""
    if unitary is None:
        unitary = extend_to_unitary(shift_isometry(spec))
    source = embed_product(make_equatorial(phases), spec.n_in)
    return SymVector(spec.m_out, spec.d, unitary @ ancilla_input(source, unitary.shape[0]), normalized=True)

