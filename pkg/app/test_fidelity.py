import math
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from app import fidelity
from app.cloner import clone
from app.errors import DiscrepancyError, DomainError
from app.fidelity import (
    block_global_diagonal,
    block_global_full,
    block_single_closed,
    closed_global_NM,
    closed_single_1M,
    closed_single_NM,
    curve_rows,
    diagonal_sum,
    dimension_decay_limit,
    dimension_decay_profile,
    fidelity_report,
    global_fidelity_sim,
    phase_estimation_fidelity,
    reduced_onebody,
    saturation_profile,
    saturation_rows,
    single_fidelity_sim,
    universal_fidelity,
)
from app.models.cloner import ClonerSpec
from app.models.report import FidelityReport
from app.models.occupation import OccupationVector
from app.models.state import PhaseVector, SymVector

SPECS = st.builds(
    ClonerSpec,
    d=st.sampled_from([2, 3, 5]),
    n_in=st.integers(min_value=1, max_value=3),
    k=st.integers(min_value=0, max_value=2),
)


def _phases(d, data):
    values = data.draw(st.lists(st.floats(min_value=0.0, max_value=6.3), min_size=d - 1, max_size=d - 1))
    return PhaseVector(tuple(values))


def test_qubit_one_to_three_values():
    assert abs(closed_single_NM(2, 1, 1) - 5 / 6) <= 1e-12
    assert abs(closed_global_NM(2, 1, 1) - 0.75) <= 1e-12
    spec = ClonerSpec(d=2, n_in=1, k=1)
    assert abs(single_fidelity_sim(spec, PhaseVector((1.1,))) - 5 / 6) <= 1e-12
    assert abs(global_fidelity_sim(spec, PhaseVector((1.1,))) - 0.75) <= 1e-12


def test_qubit_two_to_four_value():
    expected = 0.5 + math.sqrt(3) / 4
    assert abs(closed_single_NM(2, 2, 1) - expected) <= 1e-12
    assert abs(single_fidelity_sim(ClonerSpec(d=2, n_in=2, k=1), PhaseVector((0.2,))) - expected) <= 1e-12


def test_identity_machine_is_perfect():
    for d in (2, 3, 4):
        assert closed_single_NM(d, 2, 0) == pytest.approx(1.0, abs=1e-12)
        assert closed_global_NM(d, 2, 0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("d, limit", [(2, 0.75), (3, 5 / 9), (5, 0.36)])
def test_one_to_many_asymptote(d, limit):
    assert abs(closed_single_1M(d, 1000) - limit) <= 1e-3
    assert phase_estimation_fidelity(d, 1) == pytest.approx(limit, abs=1e-12)


def test_one_to_many_form_matches_general_form():
    for d in (2, 3, 5):
        for k in (1, 2, 7):
            assert closed_single_1M(d, k) == pytest.approx(closed_single_NM(d, 1, k), abs=1e-12)
    with pytest.raises(DomainError):
        closed_single_1M(2, 0)


@given(SPECS, st.data())
@settings(deadline=None, max_examples=60)
def test_closed_form_matches_simulation(spec, data):
    phases = _phases(spec.d, data)
    assert abs(single_fidelity_sim(spec, phases) - closed_single_NM(spec.d, spec.n_in, spec.k)) <= 1e-10
    assert abs(global_fidelity_sim(spec, phases) - closed_global_NM(spec.d, spec.n_in, spec.k)) <= 1e-10


def test_reduced_state_of_qubit_clone():
    out = clone(ClonerSpec(d=2, n_in=1, k=1), PhaseVector.zeros(2))
    np.testing.assert_allclose(reduced_onebody(out), [[0.5, 1 / 3], [1 / 3, 0.5]], atol=1e-12)


def test_reduced_state_needs_normalized_input():
    with pytest.raises(DomainError):
        reduced_onebody(SymVector(2, 2, np.array([1.0, 1.0, 0.0])))


def test_block_scores_qubit_one_to_three():
    assert block_single_closed(2, 1, OccupationVector((2, 0))) == pytest.approx(0.5 + math.sqrt(3) / 6, abs=1e-12)
    assert block_global_full(2, 1, OccupationVector((1, 1))) == pytest.approx(0.75, abs=1e-12)
    assert block_global_diagonal(2, 1, OccupationVector((1, 1))) == pytest.approx(0.375, abs=1e-12)


@pytest.mark.parametrize("block", [(2, 0, 1), (0, 0, 3), (1, 1, 1)])
def test_diagonal_part_is_one_over_d(block):
    assert diagonal_sum(3, 2, OccupationVector(block)) == pytest.approx(1 / 3, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("n_in", [1, 2, 3])
def test_phase_estimation_gap_shrinks(d, n_in):
    limit = phase_estimation_fidelity(d, n_in)
    gaps = np.array([abs(closed_single_NM(d, n_in, k) - limit) for k in range(1, 201)])
    assert (np.diff(gaps) <= 0).all()
    assert gaps[-1] <= 5e-3


def test_universal_fidelity_values():
    assert universal_fidelity(2, 1, 3) == pytest.approx(7 / 9)
    assert universal_fidelity(3, 2, 2) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        universal_fidelity(2, 3, 2)


def test_phase_covariant_beats_universal():
    for d in (2, 3, 5):
        for n_in in (1, 2, 3):
            for k in range(0, 6):
                m_out = n_in + k * d
                assert closed_single_NM(d, n_in, k) >= universal_fidelity(d, n_in, m_out) - 1e-12


def test_report_methods():
    spec = ClonerSpec(d=3, n_in=1, k=1)
    closed = fidelity_report(spec)
    both = fidelity_report(spec, method="both", phases=PhaseVector((0.7, 1.9)))
    assert closed.method == "closed_form"
    assert both.f_single == pytest.approx(closed.f_single, abs=1e-10)
    assert both.to_dict()["f_single_closed"] == closed.f_single
    with pytest.raises(DomainError):
        fidelity_report(spec, method="exact")


def test_report_discrepancy(monkeypatch):
    monkeypatch.setattr(fidelity, "single_fidelity_sim", lambda spec, phases: 0.0)
    with pytest.raises(DiscrepancyError) as excinfo:
        fidelity_report(ClonerSpec(d=2, n_in=1, k=1), method="both")
    assert excinfo.value.deviation == pytest.approx(5 / 6)


@pytest.mark.parametrize("n_in", [1, 2, 3])
@pytest.mark.parametrize("k", [1, 2])
def test_dimension_decay(n_in, k):
    rows = dimension_decay_profile(n_in, k, range(2, 13))
    values = np.array([f for _, f, _ in rows])
    scaled = np.array([s for _, _, s in rows])
    assert (np.diff(values) < 0).all()
    np.testing.assert_allclose(scaled, [d * f for d, f, _ in rows])
    # d*F rises toward a constant with shrinking steps
    assert (np.diff(scaled) > 0).all()
    assert (np.diff(scaled, n=2) < 0).all()
    assert scaled.max() < dimension_decay_limit(n_in, k)


def test_dimension_decay_limit():
    assert dimension_decay_limit(1, 1) == 3.0
    assert dimension_decay_limit(2, 2) == 4.0
    far = dimension_decay_profile(2, 2, [80, 400])
    assert 3.9 < far[0][2] < far[1][2] < 4.0
    with pytest.raises(DomainError):
        dimension_decay_limit(1, 0)


def test_saturation():
    rows = saturation_profile(3, 28)
    assert rows[0][0] == 1 and rows[-1][0] == 28
    assert rows[-1][1] == pytest.approx(1.0, abs=1e-12)
    assert rows[-1][2] == pytest.approx(1.0, abs=1e-12)
    phase = [row[1] for row in rows]
    assert all(a < b for a, b in zip(phase, phase[1:]))
    assert all(f >= u - 1e-12 for _, f, u in rows)


def test_curve_rows():
    rows = curve_rows([2, 3], 1, 2)
    assert [(row.d, row.k, row.m_out) for row in rows] == [(2, 0, 1), (2, 1, 3), (2, 2, 5), (3, 0, 1), (3, 1, 4), (3, 2, 7)]
    assert rows[1].f_phase == pytest.approx(5 / 6)
    assert rows[0].f_limit == pytest.approx(0.75)
    with pytest.raises(DomainError):
        curve_rows([2], 1, -1)
    with pytest.raises(DomainError):
        curve_rows([], 1, 2)


def test_saturation_rows():
    rows = saturation_rows(2, 5)
    assert [(row.n_in, row.k) for row in rows] == [(1, 2), (3, 1), (5, 0)]
    assert rows[-1].f_phase == pytest.approx(1.0)


def test_simulation_at_large_output_count():
    spec = ClonerSpec(d=2, n_in=1, k=600)
    report = fidelity_report(spec, method="simulation")
    assert report.f_single == pytest.approx(closed_single_NM(2, 1, 600), abs=1e-9)
    assert report.f_global == pytest.approx(closed_global_NM(2, 1, 600), abs=1e-9)


def test_report_rejects_out_of_range_fidelity():
    base = dict(d=3, n_in=1, m_out=4, k=1, f_global=0.5, f_limit=0.6, method="closed_form")
    with pytest.raises(DomainError):
        FidelityReport(f_single=0.2, **base)
    with pytest.raises(DomainError):
        FidelityReport(f_single=1.01, **base)
    with pytest.raises(DomainError):
        FidelityReport(f_single=0.8, **dict(base, method="exact"))
    assert FidelityReport(f_single=1 / 3, **base).f_single == pytest.approx(1 / 3)
