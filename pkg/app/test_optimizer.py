import math
import pytest
from app.errors import DomainError
from app.fidelity import closed_single_NM
from app.models.occupation import OccupationVector
from app.optimizer import (
    block_global_fidelity,
    block_global_fidelity_diagonal,
    block_single_fidelity,
    enumerate_blocks,
    find_optimal_blocks,
    score_blocks,
)


def test_unique_uniform_winner_qubit_one_to_three():
    search = find_optimal_blocks(2, 1, 3)
    assert search.winners == (OccupationVector((1, 1)),)
    assert search.is_economical_point
    best = next(score for score in search.scores if score.block == search.winners[0])
    assert best.f_single_block == pytest.approx(5 / 6, abs=1e-12)


def test_tied_winners_off_the_economical_points():
    search = find_optimal_blocks(2, 1, 2)
    assert search.winners == (OccupationVector((1, 0)), OccupationVector((0, 1)))
    assert not search.is_economical_point


def test_identity_block():
    search = find_optimal_blocks(3, 2, 2)
    assert search.winners == (OccupationVector((0, 0, 0)),)
    assert search.scores[0].f_single_block == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("n_in", [1, 2, 3])
@pytest.mark.parametrize("k", [1, 2])
def test_uniform_block_is_optimal_for_both_merits(d, n_in, k):
    m_out = n_in + k * d
    scores = score_blocks(d, n_in, m_out)
    for merit in ("single", "global"):
        search = find_optimal_blocks(d, n_in, m_out, merit=merit, scores=scores)
        assert search.winners == (OccupationVector.uniform(k, d),)
    uniform = next(score for score in scores if score.block.is_uniform())
    assert uniform.f_single_block == pytest.approx(closed_single_NM(d, n_in, k), abs=1e-12)


def test_scores_invariant_under_level_permutation():
    scores = {score.block: score for score in score_blocks(3, 2, 5)}
    for block, score in scores.items():
        permuted = scores[block.permuted((2, 0, 1))]
        assert score.f_single_block == pytest.approx(permuted.f_single_block, abs=1e-12)
        assert score.f_global_block == pytest.approx(permuted.f_global_block, abs=1e-12)


def test_block_count():
    assert len(enumerate_blocks(3, 3)) == math.comb(5, 2)
    with pytest.raises(DomainError):
        enumerate_blocks(2, -1)


def test_block_fidelities():
    block = OccupationVector((2, 0))
    assert block_single_fidelity(block, 2, 1, 3) == pytest.approx(0.5 + math.sqrt(3) / 6, abs=1e-12)
    assert block_global_fidelity((1, 1), 2, 1, 3) == pytest.approx(0.75, abs=1e-12)
    assert block_global_fidelity_diagonal((1, 1), 2, 1, 3) == pytest.approx(0.375, abs=1e-12)


def test_block_validation():
    with pytest.raises(DomainError):
        block_single_fidelity((1, 0), 2, 1, 3)
    with pytest.raises(DomainError):
        block_single_fidelity((1, 1, 0), 2, 1, 3)
    with pytest.raises(DomainError):
        find_optimal_blocks(2, 1, 3, merit="average")
    with pytest.raises(DomainError):
        score_blocks(2, 3, 1)
