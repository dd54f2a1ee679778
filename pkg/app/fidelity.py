"""Single-qudit and global fidelities, by simulation and in closed form.

Reduced-state convention: rho1[a, b] = <a|rho1|b> = <Psi| a_b^dagger a_a |Psi> / M, which
agrees with the brute-force partial trace over sites 1..M-1 (see verify.oracle_partial_trace).
"""
import logging
import math
from functools import lru_cache
import numpy as np
from .config import TOL_EXACT, TOL_SUM
from .errors import DiscrepancyError, DomainError
from .models.cloner import ClonerSpec
from .models.occupation import OccupationVector
from .models.report import CurveRow, FidelityReport
from .models.state import PhaseVector
from .cloner import clone
from .states import embed_product, make_equatorial
from .symspace import log_multinomial_probabilities, occupation_array, occupation_index

logger = logging.getLogger(__name__)


@lru_cache(maxsize=128)
def _one_body_moves(m, d):
    """For each (a, b): source ranks, target ranks and sqrt(n_a (n_b - delta_ab + 1)).

    Moving one particle from level a to level b maps |{n}> to |{n} - e_a + e_b>.
    """
    occs = occupation_array(m, d)
    index = occupation_index(m, d)
    moves = {}
    for a in range(d):
        sources = np.nonzero(occs[:, a] > 0)[0]
        for b in range(d):
            targets = occs[sources].copy()
            targets[:, a] -= 1
            targets[:, b] += 1
            target_ranks = np.array([index[tuple(int(c) for c in row)] for row in targets], dtype=np.int64)
            coeffs = np.sqrt(occs[sources, a] * targets[:, b]).astype(np.float64)
            moves[(a, b)] = (sources, target_ranks, coeffs)
    return moves


def reduced_onebody(v, tol=TOL_EXACT):
    """d x d one-body marginal of a normalized symmetric M-particle state."""
    if v.n < 1:
        raise DomainError("the one-body marginal needs at least one particle")
    if abs(v.norm() - 1.0) > tol:
        raise DomainError(f"state is not normalized (norm {v.norm()!r})")
    amps = v.amplitudes
    rho = np.zeros((v.d, v.d), dtype=np.complex128)
    for (a, b), (sources, targets, coeffs) in _one_body_moves(v.n, v.d).items():
        rho[a, b] = np.sum(amps[sources] * amps[targets].conj() * coeffs)
    return rho / v.n


def _expectation(state, rho):
    psi = state.amplitudes
    return float(np.real(np.vdot(psi, rho @ psi)))


def single_fidelity_sim(spec, phases):
    """<psi(phi)| Tr_{M-1}[clone] |psi(phi)>."""
    return _expectation(make_equatorial(phases), reduced_onebody(clone(spec, phases)))


def global_fidelity_sim(spec, phases):
    """|<psi(phi)^{(x)M}|clone>|^2."""
    ideal = embed_product(make_equatorial(phases), spec.m_out)
    return float(abs(ideal.inner(clone(spec, phases))) ** 2)


def _block_counts(block, d):
    counts = block.counts if isinstance(block, OccupationVector) else tuple(block)
    if len(counts) != d:
        raise DomainError(f"block {counts} has {len(counts)} levels, expected {d}")
    return np.array(counts, dtype=np.float64)


def _sum_positive(terms):
    """Sum of non-negative terms, smallest first."""
    return math.fsum(np.sort(np.asarray(terms, dtype=np.float64).ravel()))


def offdiagonal_sum(d, n_in, block):
    """sum_{n: |n| = N-1} sum_{i != j} N!/prod n! * sqrt((m_i+n_i+1)(m_j+n_j+1) / ((n_i+1)(n_j+1)))."""
    m = _block_counts(block, d)
    occs = occupation_array(n_in - 1, d)
    # N!/prod n_l! = N * multinomial(n) for |n| = N - 1
    weights = n_in * np.exp(log_multinomial_probabilities(occs, d) + (n_in - 1) * math.log(d))
    a = np.sqrt((m + occs + 1.0) / (occs + 1.0))
    # sum_{i != j} a_i a_j = (sum a)^2 - sum a^2
    pairs = a.sum(axis=1) ** 2 - (a**2).sum(axis=1)
    return _sum_positive(weights * pairs)


def diagonal_sum(d, n_in, block):
    """Diagonal one-body contribution of a block at weight 1, one term per distinct output basis pair.

    Each input label {n} (|n| = N) appears once with weight multinomial(n)/d^N and level
    occupancy (n_i + m_i)/M; the sum is 1/d for every block.
    """
    m = _block_counts(block, d)
    m_out = n_in + int(m.sum())
    occs = occupation_array(n_in, d)
    probs = np.exp(log_multinomial_probabilities(occs, d))
    occupancy = (occs + m).sum(axis=1) / m_out
    return _sum_positive(probs * occupancy) / d


def block_single_closed(d, n_in, block):
    """Single-qudit fidelity of the block {m} at weight 1."""
    m_out = n_in + sum(block)
    return diagonal_sum(d, n_in, block) + offdiagonal_sum(d, n_in, block) / (m_out * d ** (n_in + 1))


def closed_single_1M(d, k):
    """1/d + (d-1)(M+d-1)/(M d^2) for M = k*d + 1."""
    if d < 2 or k < 1:
        raise DomainError(f"closed_single_1M needs d >= 2 and k >= 1, got d={d}, k={k}")
    m_out = k * d + 1
    return 1.0 / d + (d - 1) * (m_out + d - 1) / (m_out * d * d)


def closed_single_NM(d, n_in, k):
    """Single-qudit fidelity of the optimal N -> N + k*d cloner."""
    spec = ClonerSpec(d=d, n_in=n_in, k=k)
    return 1.0 / d + offdiagonal_sum(d, n_in, spec.block) / (spec.m_out * d ** (n_in + 1))


def phase_estimation_fidelity(d, n_in):
    """k -> infinity limit of closed_single_NM: optimal multi-phase estimation on N copies."""
    if d < 2 or n_in < 1:
        raise DomainError(f"phase_estimation_fidelity needs d >= 2 and N >= 1, got d={d}, N={n_in}")
    occs = occupation_array(n_in - 1, d)
    weights = n_in * np.exp(log_multinomial_probabilities(occs, d) + (n_in - 1) * math.log(d))
    a = 1.0 / np.sqrt(occs + 1.0)
    pairs = a.sum(axis=1) ** 2 - (a**2).sum(axis=1)
    return 1.0 / d + _sum_positive(weights * pairs) / d ** (n_in + 2)


def universal_fidelity(d, n_in, m_out):
    """Literature closed form of the optimal universal N -> M cloner, used for comparison only."""
    if n_in < 1 or m_out < n_in or d < 2:
        raise DomainError(f"universal_fidelity needs d >= 2 and M >= N >= 1, got d={d}, N={n_in}, M={m_out}")
    return n_in / m_out + (m_out - n_in) * (n_in + 1) / (m_out * (n_in + d))


def block_global_full(d, n_in, block):
    """Tr[|psi_0><psi_0|^{(x)(M+N)} |r_m><r_m|], full double sum over input labels."""
    m = np.array(_block_counts(block, d), dtype=np.int64)
    occs = occupation_array(n_in, d)
    log_in = log_multinomial_probabilities(occs, d)
    log_out = log_multinomial_probabilities(occs + m, d)
    amplitude = _sum_positive(np.exp(0.5 * (log_in + log_out)))
    return amplitude**2


def block_global_diagonal(d, n_in, block):
    """The diagonal-only sum sum_n multinomial(n+m) multinomial(n) / d^{M+N}."""
    m = np.array(_block_counts(block, d), dtype=np.int64)
    occs = occupation_array(n_in, d)
    return _sum_positive(np.exp(log_multinomial_probabilities(occs, d) + log_multinomial_probabilities(occs + m, d)))


def closed_global_NM(d, n_in, k):
    spec = ClonerSpec(d=d, n_in=n_in, k=k)
    return block_global_full(d, n_in, spec.block)


def fidelity_report(spec, method="closed_form", phases=None, tol=TOL_SUM):
    """FidelityReport for one machine; method is simulation, closed_form or both."""
    phases = phases if phases is not None else PhaseVector.zeros(spec.d)
    f_limit = phase_estimation_fidelity(spec.d, spec.n_in)
    closed = None
    if method in ("closed_form", "both"):
        closed = (closed_single_NM(spec.d, spec.n_in, spec.k), closed_global_NM(spec.d, spec.n_in, spec.k))
    if method == "closed_form":
        return FidelityReport(
            d=spec.d, n_in=spec.n_in, m_out=spec.m_out, k=spec.k,
            f_single=closed[0], f_global=closed[1], f_limit=f_limit, method=method,
        )
    if method not in ("simulation", "both"):
        raise DomainError(f"unknown method {method!r}")
    f_single = single_fidelity_sim(spec, phases)
    f_global = global_fidelity_sim(spec, phases)
    if method == "both":
        deviation = max(abs(f_single - closed[0]), abs(f_global - closed[1]))
        if deviation > tol:
            logger.error(f"simulation and closed form disagree for {spec!r}: deviation {deviation:.3e}")
            raise DiscrepancyError(
                f"simulation and closed form disagree by {deviation:.3e} (tolerance {tol:.1e})",
                deviation=deviation,
                tolerance=tol,
            )
    return FidelityReport(
        d=spec.d, n_in=spec.n_in, m_out=spec.m_out, k=spec.k,
        f_single=f_single, f_global=f_global, f_limit=f_limit, method=method,
        f_single_closed=closed[0] if closed else None,
        f_global_closed=closed[1] if closed else None,
        phases=phases.phases,
    )


def dimension_decay_profile(n_in, k, d_values):
    """(d, F, d*F) over the given dimensions at fixed N and k."""
    rows = []
    for d in d_values:
        f = closed_single_NM(d, n_in, k)
        rows.append((d, f, d * f))
    return rows


def dimension_decay_limit(n_in, k):
    """d -> infinity limit of d * closed_single_NM(d, N, k), i.e. 1 + N(k+1)/k."""
    if n_in < 1 or k < 1:
        raise DomainError(f"dimension_decay_limit needs N >= 1 and k >= 1, got N={n_in}, k={k}")
    return 1.0 + n_in * (k + 1) / k


def saturation_profile(d, m_out):
    """(N, F_phase, F_universal) for every N <= M with M - N a multiple of d, increasing N."""
    start = m_out % d or d
    rows = []
    for n_in in range(start, m_out + 1, d):
        k = (m_out - n_in) // d
        rows.append((n_in, closed_single_NM(d, n_in, k), universal_fidelity(d, n_in, m_out)))
    return rows


def curve_rows(d_values, n_in, max_k):
    """k-sweep rows grouped by d, then increasing k."""
    if max_k < 0:
        raise DomainError(f"max_k must be >= 0, got {max_k}")
    rows = []
    for d in d_values:
        f_limit = phase_estimation_fidelity(d, n_in)
        for k in range(max_k + 1):
            m_out = n_in + k * d
            rows.append(
                CurveRow(
                    d=d, n_in=n_in, m_out=m_out, k=k,
                    f_phase=closed_single_NM(d, n_in, k),
                    f_universal=universal_fidelity(d, n_in, m_out),
                    f_limit=f_limit,
                )
            )
    if not rows:
        raise DomainError("empty sweep: no dimensions given")
    logger.debug(f"k-sweep: {len(rows)} rows for d={list(d_values)}, N={n_in}")
    return rows


def saturation_rows(d, m_out):
    """N-sweep rows at fixed M, increasing N."""
    if m_out < 1:
        raise DomainError(f"M must be >= 1 for a saturation sweep, got {m_out}")
    rows = [
        CurveRow(
            d=d, n_in=n_in, m_out=m_out, k=(m_out - n_in) // d,
            f_phase=f_phase, f_universal=f_universal,
            f_limit=phase_estimation_fidelity(d, n_in),
        )
        for n_in, f_phase, f_universal in saturation_profile(d, m_out)
    ]
    if not rows:
        raise DomainError(f"empty sweep: no N <= {m_out} with M - N divisible by {d}")
    return rows
