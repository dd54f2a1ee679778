"""Brute-force oracles and the verification suite.

Every check runs on a deterministic parameter grid. Random phases and states come from a
Philox (counter-based) generator keyed by the suite seed, the check name and the
parameter point, so reports are reproducible across platforms and independent of the
order in which checks run.
"""
import logging
import math
import zlib
from dataclasses import dataclass
import numpy as np
from .cloner import (
    apply_choi,
    choi_operator,
    clone,
    commutator_deviation,
    conjugate_by,
    economical_clone,
    extend_to_unitary,
    optimal_choi,
    shift_isometry,
)
from .config import CHOI_CAP, ORACLE_CAP, TOL_EXACT, TOL_SUM
from .errors import DomainError, ResourceError
from .fidelity import (
    closed_global_NM,
    closed_single_1M,
    closed_single_NM,
    dimension_decay_limit,
    dimension_decay_profile,
    global_fidelity_sim,
    phase_estimation_fidelity,
    reduced_onebody,
    saturation_profile,
    single_fidelity_sim,
    universal_fidelity,
)
from .models.cloner import ClonerSpec
from .models.report import VerificationResult
from .models.state import TWO_PI, PhaseVector, SymVector
from .optimizer import enumerate_blocks, find_optimal_blocks, score_blocks
from .states import apply_phases_full, apply_phases_sym, embed_product, make_equatorial, product_full, reference_state
from .symspace import check_oracle_cap, enumerate_occupations, expand_to_full, multinomial, project_to_sym, sym_dim

logger = logging.getLogger(__name__)

# Fixed M of the saturation sweep per dimension; 10d + 1 for any other d.
SATURATION_M = {2: 21, 3: 28, 5: 51}
ESTIMATION_GAP_TOL = 5e-3


@dataclass(frozen=True)
class SuiteGrid:
    d_values: tuple = (2, 3)
    n_values: tuple = (1, 2)
    k_values: tuple = (0, 1, 2)
    phase_samples: int = 20
    oracle_samples: int = 25
    oracle_max_m: int = 8
    decay_d_max: int = 12
    estimation_k_max: int = 200
    oracle_cap: int = ORACLE_CAP
    choi_cap: int = CHOI_CAP

    @classmethod
    def up_to(cls, max_d=3, max_n=2, max_k=2, phase_samples=20, **kwargs):
        if max_d < 2 or max_n < 1 or max_k < 0 or phase_samples < 1:
            raise DomainError("grid needs max_d >= 2, max_n >= 1, max_k >= 0 and at least one phase sample")
        return cls(
            d_values=tuple(range(2, max_d + 1)),
            n_values=tuple(range(1, max_n + 1)),
            k_values=tuple(range(0, max_k + 1)),
            phase_samples=phase_samples,
            **kwargs,
        )

    def to_dict(self):
        return {
            "d_values": list(self.d_values),
            "n_values": list(self.n_values),
            "k_values": list(self.k_values),
            "phase_samples": self.phase_samples,
        }


def oracle_partial_trace(v, cap=ORACLE_CAP):
    """One-body marginal by expanding to the full tensor space and summing over sites 1..M-1."""
    full = expand_to_full(v, cap=cap).reshape(v.d, -1)
    # rho[a, b] = sum_rest psi(a, rest) psi*(b, rest)
    return full @ full.conj().T


def stream_key(seed, check_name, point):
    """SeedSequence entropy of one (check, point), recorded as parameters["stream"] on its result."""
    return [seed, zlib.crc32(check_name.encode())] + [int(point[key]) for key in sorted(point)]


def check_rng(stream):
    """The generator a check draws its random phases and states from."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(stream)))


def random_phases(rng, d):
    return PhaseVector(tuple(rng.uniform(0.0, TWO_PI, size=d - 1)))


def random_sym_state(rng, n, d):
    dim = sym_dim(n, d)
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return SymVector(n, d, amps / np.linalg.norm(amps), normalized=True)


def _max_abs(a, b):
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())


# -- per (d, N, k) checks ----------------------------------------------------------------------


def check_isometry(spec, rng, grid):
    V = shift_isometry(spec)
    deviation = _max_abs(V.conj().T @ V, np.eye(V.shape[1]))
    nonzero = np.count_nonzero(V, axis=0)
    if not (np.all(nonzero == 1) and np.all(V[V != 0] == 1.0)):
        deviation = max(deviation, 1.0)
    return deviation


def check_trace_preservation(spec, rng, grid):
    R = optimal_choi(spec, cap=grid.choi_cap)
    identity = np.eye(R.input_dim)
    deviation = _max_abs(R.partial_trace_output(), identity)
    blocks = enumerate_blocks(spec.d, spec.m_out - spec.n_in)
    weights = rng.dirichlet(np.ones(len(blocks)))
    mixed = choi_operator(spec.d, spec.n_in, spec.m_out, dict(zip(blocks, weights)), cap=grid.choi_cap)
    return max(deviation, _max_abs(mixed.partial_trace_output(), identity))


def check_covariance(spec, rng, grid):
    reference = clone(spec, PhaseVector.zeros(spec.d))
    deviation = 0.0
    for _ in range(grid.phase_samples):
        phases = random_phases(rng, spec.d)
        rotated = apply_phases_sym(phases, reference)
        deviation = max(deviation, _max_abs(clone(spec, phases).amplitudes, rotated.amplitudes))
    return deviation


def check_commutation(spec, rng, grid):
    R = optimal_choi(spec, cap=grid.choi_cap)
    blocks = enumerate_blocks(spec.d, spec.m_out - spec.n_in)
    mixed = choi_operator(
        spec.d, spec.n_in, spec.m_out, dict(zip(blocks, rng.dirichlet(np.ones(len(blocks))))), cap=grid.choi_cap
    )
    deviation = 0.0
    for _ in range(grid.phase_samples):
        phases = random_phases(rng, spec.d)
        deviation = max(deviation, commutator_deviation(R, phases), commutator_deviation(mixed, phases))
    return deviation


def check_choi_vs_isometry(spec, rng, grid):
    R = optimal_choi(spec, cap=grid.choi_cap)
    V = shift_isometry(spec)
    deviation = 0.0 if R.rank() == 1 else 1.0
    for _ in range(grid.phase_samples):
        psi = random_sym_state(rng, spec.n_in, spec.d).amplitudes
        rho = np.outer(psi, psi.conj())
        deviation = max(deviation, _max_abs(apply_choi(R, rho), conjugate_by(V, rho)))
    return deviation


def check_unitary_extension(spec, rng, grid):
    V = shift_isometry(spec)
    U = extend_to_unitary(V)
    deviation = max(_max_abs(U.conj().T @ U, np.eye(U.shape[0])), _max_abs(U[:, : V.shape[1]], V))
    for _ in range(grid.phase_samples):
        phases = random_phases(rng, spec.d)
        deviation = max(
            deviation, _max_abs(economical_clone(spec, phases, U).amplitudes, clone(spec, phases).amplitudes)
        )
    return deviation


def check_closed_vs_simulation(spec, rng, grid):
    closed = closed_single_NM(spec.d, spec.n_in, spec.k)
    return max(abs(single_fidelity_sim(spec, random_phases(rng, spec.d)) - closed) for _ in range(grid.phase_samples))


def check_global_closed_vs_simulation(spec, rng, grid):
    closed = closed_global_NM(spec.d, spec.n_in, spec.k)
    return max(abs(global_fidelity_sim(spec, random_phases(rng, spec.d)) - closed) for _ in range(grid.phase_samples))


def check_block_optimality(spec, rng, grid):
    scores = score_blocks(spec.d, spec.n_in, spec.m_out)
    deviation = 0.0
    for merit in ("single", "global"):
        search = find_optimal_blocks(spec.d, spec.n_in, spec.m_out, merit=merit, scores=scores)
        if search.winners != (spec.block,):
            logger.error(f"{merit} optimum for {spec!r} is {[b.label() for b in search.winners]}")
            deviation = 1.0
    uniform = next(score for score in scores if score.block == spec.block)
    return max(deviation, abs(uniform.f_single_block - closed_single_NM(spec.d, spec.n_in, spec.k)))


def check_block_permutation_symmetry(spec, rng, grid):
    scores = {score.block: score for score in score_blocks(spec.d, spec.n_in, spec.m_out)}
    order = rng.permutation(spec.d)
    deviation = 0.0
    for block, score in scores.items():
        permuted = scores[block.permuted(order)]
        deviation = max(
            deviation,
            abs(score.f_single_block - permuted.f_single_block),
            abs(score.f_global_block - permuted.f_global_block),
        )
    return deviation


def check_universal_dominance(spec, rng, grid):
    phase = closed_single_NM(spec.d, spec.n_in, spec.k)
    return max(0.0, universal_fidelity(spec.d, spec.n_in, spec.m_out) - phase)


# -- checks on other parameter points ------------------------------------------------------------


def check_closed_form_1M(d, k, rng, grid):
    spec = ClonerSpec(d=d, n_in=1, k=k)
    closed = closed_single_1M(d, k)
    deviation = abs(closed - closed_single_NM(d, 1, k))
    return max(deviation, abs(closed - single_fidelity_sim(spec, random_phases(rng, d))))


def check_estimation_gap(d, n_in, rng, grid):
    return abs(closed_single_NM(d, n_in, grid.estimation_k_max) - phase_estimation_fidelity(d, n_in))


def check_estimation_monotone(d, n_in, rng, grid):
    limit = phase_estimation_fidelity(d, n_in)
    gaps = np.array([abs(closed_single_NM(d, n_in, k) - limit) for k in range(1, grid.estimation_k_max + 1)])
    return float(max(0.0, np.diff(gaps).max())) if len(gaps) > 1 else 0.0


def check_embedding_oracle(d, n_in, rng, grid):
    check_oracle_cap(n_in, d, grid.oracle_cap)
    reference = embed_product(reference_state(d), n_in)
    expected = np.array(
        [math.sqrt(multinomial(occ)) / d ** (n_in / 2) for occ in enumerate_occupations(n_in, d)]
    )
    deviation = _max_abs(reference.amplitudes, expected)
    for _ in range(grid.phase_samples):
        state = make_equatorial(random_phases(rng, d))
        projected = project_to_sym(product_full(state, n_in, cap=grid.oracle_cap), n_in, d, cap=grid.oracle_cap)
        deviation = max(deviation, _max_abs(projected.amplitudes, embed_product(state, n_in).amplitudes))
    return deviation


def check_phase_action_oracle(d, n_in, rng, grid):
    check_oracle_cap(n_in, d, grid.oracle_cap)
    deviation = 0.0
    for _ in range(grid.phase_samples):
        v = random_sym_state(rng, n_in, d)
        phases = random_phases(rng, d)
        lhs = expand_to_full(apply_phases_sym(phases, v), cap=grid.oracle_cap)
        rhs = apply_phases_full(phases, expand_to_full(v, cap=grid.oracle_cap), n_in, cap=grid.oracle_cap)
        deviation = max(deviation, _max_abs(lhs, rhs))
    return deviation


def check_oracle_partial_trace(d, m_out, rng, grid):
    check_oracle_cap(m_out, d, grid.oracle_cap)
    deviation = 0.0
    for _ in range(grid.oracle_samples):
        v = random_sym_state(rng, m_out, d)
        deviation = max(deviation, _max_abs(reduced_onebody(v), oracle_partial_trace(v, cap=grid.oracle_cap)))
    return deviation


def check_dimension_decay(n_in, k, rng, grid):
    """F non-increasing in d, d*F concave in d and below its large-d limit."""
    rows = dimension_decay_profile(n_in, k, range(2, grid.decay_d_max + 1))
    values = np.array([f for _, f, _ in rows])
    scaled = np.array([s for _, _, s in rows])
    deviation = max(np.max(np.diff(values), initial=0.0), np.max(np.diff(scaled, n=2), initial=0.0))
    return float(max(deviation, scaled.max() - dimension_decay_limit(n_in, k), 0.0))


def check_saturation(d, rng, grid):
    rows = saturation_profile(d, SATURATION_M.get(d, 10 * d + 1))
    phase = np.array([row[1] for row in rows])
    _, f_phase_end, f_universal_end = rows[-1]
    deviation = max(abs(f_phase_end - 1.0), abs(f_universal_end - 1.0))
    if len(phase) > 1:
        deviation = max(deviation, float(max(0.0, -np.diff(phase).min())))
    return deviation


def _spec_points(grid):
    return [{"d": d, "n_in": n, "k": k} for d in grid.d_values for n in grid.n_values for k in grid.k_values]


def _spec_check(check):
    def run(params, rng, grid):
        return check(ClonerSpec(d=params["d"], n_in=params["n_in"], k=params["k"]), rng, grid)

    return run


def _point_check(check, *keys):
    def run(params, rng, grid):
        return check(*(params[key] for key in keys), rng, grid)

    return run


def _checks(grid):
    """(name, tolerance key, parameter points, runner) for every configured check."""
    spec_points = _spec_points(grid)
    dn_points = [{"d": d, "n_in": n} for d in grid.d_values for n in grid.n_values]
    return [
        ("isometry", "exact", spec_points, _spec_check(check_isometry)),
        ("trace_preservation", "exact", spec_points, _spec_check(check_trace_preservation)),
        ("covariance", "exact", spec_points, _spec_check(check_covariance)),
        ("commutation", "exact", spec_points, _spec_check(check_commutation)),
        ("choi_vs_isometry", "exact", spec_points, _spec_check(check_choi_vs_isometry)),
        ("unitary_extension", "exact", spec_points, _spec_check(check_unitary_extension)),
        ("closed_vs_simulation", "sum", spec_points, _spec_check(check_closed_vs_simulation)),
        ("global_closed_vs_simulation", "sum", spec_points, _spec_check(check_global_closed_vs_simulation)),
        ("block_optimality", "sum", spec_points, _spec_check(check_block_optimality)),
        ("block_permutation_symmetry", "sum", spec_points, _spec_check(check_block_permutation_symmetry)),
        ("universal_dominance", "sum", spec_points, _spec_check(check_universal_dominance)),
        (
            "closed_form_1M",
            "sum",
            [{"d": d, "k": k} for d in grid.d_values for k in grid.k_values if k >= 1],
            _point_check(check_closed_form_1M, "d", "k"),
        ),
        ("phase_estimation_gap", "estimation_gap", dn_points, _point_check(check_estimation_gap, "d", "n_in")),
        ("phase_estimation_monotone", "exact", dn_points, _point_check(check_estimation_monotone, "d", "n_in")),
        ("embedding_oracle", "exact", dn_points, _point_check(check_embedding_oracle, "d", "n_in")),
        ("phase_action_oracle", "exact", dn_points, _point_check(check_phase_action_oracle, "d", "n_in")),
        (
            "oracle_partial_trace",
            "exact",
            [{"d": d, "m_out": m} for d in grid.d_values for m in range(1, grid.oracle_max_m + 1)],
            _point_check(check_oracle_partial_trace, "d", "m_out"),
        ),
        (
            "dimension_decay",
            "sum",
            [{"n_in": n, "k": k} for n in grid.n_values for k in grid.k_values if k >= 1],
            _point_check(check_dimension_decay, "n_in", "k"),
        ),
        ("saturation", "sum", [{"d": d} for d in grid.d_values], _point_check(check_saturation, "d")),
    ]


def _tolerances(override=None, base=None):
    tolerances = {"exact": TOL_EXACT, "sum": TOL_SUM, "estimation_gap": ESTIMATION_GAP_TOL}
    tolerances.update(base or {})
    if override is not None:
        if override < 0 or not math.isfinite(override):
            raise DomainError(f"tolerance override must be a finite non-negative number, got {override}")
        tolerances = {key: float(override) for key in tolerances}
    return tolerances


def run_suite(grid=None, seed=0, tolerance=None, tolerances=None):
    """Run every configured check on every grid point; results sorted by check name, then parameters.

    tolerances replaces the defaults per key; tolerance then overrides every key at once.
    """
    if seed < 0:
        raise DomainError(f"seed must be >= 0, got {seed}")
    grid = grid or SuiteGrid()
    tol = _tolerances(tolerance, tolerances)
    results = []
    for name, tol_key, points, runner in _checks(grid):
        for point in points:
            stream = stream_key(seed, name, point)
            params = dict(point, seed=seed, stream=stream)
            rng = check_rng(stream)
            try:
                deviation = runner(point, rng, grid)
            except ResourceError as exc:
                logger.warning(f"skipped {name} {point}: {exc}")
                results.append(VerificationResult.skipped(name, params, tol[tol_key], str(exc)))
                continue
            result = VerificationResult.measured(name, params, deviation, tol[tol_key])
            if not result.passed:
                logger.error(f"check {name} failed at {point}: deviation {deviation:.3e} > {tol[tol_key]:.1e}")
            results.append(result)
    results.sort(key=VerificationResult.sort_key)
    summary = summarize(results)
    logger.info(f"verification suite: {summary['passed']} passed, {summary['failed']} failed, {summary['skipped']} skipped")
    return results


def summarize(results):
    counts = {"passed": 0, "failed": 0, "skipped": 0}
    for result in results:
        counts[result.status] += 1
    counts["total"] = len(results)
    return counts
