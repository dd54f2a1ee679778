import dataclasses
import math
import numpy as np
import pytest
from app.errors import DomainError, ResourceError
from app.fidelity import reduced_onebody
from app.models.state import PhaseVector, SymVector
from app.states import embed_product, make_equatorial
from app.models.cloner import ClonerSpec
from app.verify import (
    SuiteGrid,
    check_covariance,
    check_dimension_decay,
    check_rng,
    oracle_partial_trace,
    random_sym_state,
    run_suite,
    stream_key,
    summarize,
)

SMALL_GRID = SuiteGrid.up_to(max_d=2, max_n=1, max_k=1, phase_samples=3)


@pytest.mark.parametrize("d, m_out", [(2, 1), (2, 5), (3, 4), (4, 3), (2, 12)])
def test_oracle_partial_trace_matches_occupation_formula(d, m_out):
    rng = np.random.default_rng(d * 100 + m_out)
    for _ in range(10):
        v = random_sym_state(rng, m_out, d)
        np.testing.assert_allclose(reduced_onebody(v), oracle_partial_trace(v), atol=1e-12)


def test_default_suite_passes():
    results = run_suite(seed=0)
    summary = summarize(results)
    failed = [r.to_dict() for r in results if r.status == "failed"]
    assert summary["failed"] == 0, failed
    assert summary["passed"] > 0
    names = {r.check_name for r in results}
    assert {"isometry", "covariance", "oracle_partial_trace", "block_optimality", "saturation"} <= names


def test_results_sorted_and_deterministic():
    first = [r.to_dict() for r in run_suite(SMALL_GRID, seed=7)]
    second = [r.to_dict() for r in run_suite(SMALL_GRID, seed=7)]
    assert first == second
    keys = [(r["check_name"], sorted(r["parameters"].items())) for r in first]
    assert keys == sorted(keys)


def test_oversized_oracles_are_skipped():
    results = run_suite(dataclasses.replace(SMALL_GRID, oracle_max_m=13), seed=1)
    skipped = [r for r in results if r.status == "skipped"]
    assert [r.parameters["m_out"] for r in skipped] == [13]
    assert skipped[0].check_name == "oracle_partial_trace"
    assert summarize(results)["failed"] == 0


def test_zero_tolerance_forces_failures():
    summary = summarize(run_suite(SMALL_GRID, seed=0, tolerance=0.0))
    assert summary["failed"] > 0


def test_invalid_arguments():
    with pytest.raises(DomainError):
        run_suite(SMALL_GRID, seed=-1)
    with pytest.raises(DomainError):
        run_suite(SMALL_GRID, tolerance=-1e-3)
    with pytest.raises(DomainError):
        SuiteGrid.up_to(max_d=1)


def test_oracle_on_qubit_clone_output():
    v = SymVector(3, 2, np.array([0, 1, 1, 0]) / math.sqrt(2), normalized=True)
    np.testing.assert_allclose(oracle_partial_trace(v), [[0.5, 1 / 3], [1 / 3, 0.5]], atol=1e-12)


def test_oracle_marginal_of_product_is_pure():
    rho = oracle_partial_trace(embed_product(make_equatorial(PhaseVector((0.3, 1.2))), 4))
    assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-12)


def test_oracle_cap_is_enforced():
    rng = np.random.default_rng(5)
    with pytest.raises(ResourceError):
        oracle_partial_trace(random_sym_state(rng, 13, 2))


def test_results_carry_their_random_stream():
    results = run_suite(SMALL_GRID, seed=4)
    covariance = [r for r in results if r.check_name == "covariance"]
    for result in covariance:
        point = {key: result.parameters[key] for key in ("d", "n_in", "k")}
        assert result.parameters["stream"] == stream_key(4, "covariance", point)
        replayed = check_covariance(ClonerSpec(**point), check_rng(result.parameters["stream"]), SMALL_GRID)
        assert replayed == result.max_deviation


def test_dimension_decay_runs_on_cloning_points_only():
    results = [r for r in run_suite(SMALL_GRID, seed=0) if r.check_name == "dimension_decay"]
    assert [r.parameters["k"] for r in results] == [1]
    assert results[0].passed


@pytest.mark.parametrize("n_in", [1, 2, 3])
@pytest.mark.parametrize("k", [1, 2])
def test_dimension_decay_check(n_in, k):
    assert check_dimension_decay(n_in, k, None, SuiteGrid()) <= 1e-10
