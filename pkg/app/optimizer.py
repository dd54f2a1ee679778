"""Exhaustive search over the irreducible blocks {m_j}, |m| = M - N.

Each block at weight p = 1 is itself an economical map (the shift by {m}); the search
scores every block for both figures of merit and reports the argmax set.
"""
import logging
from .config import TIE_RTOL
from .errors import DomainError
from .fidelity import block_global_diagonal, block_global_full, block_single_closed
from .models.occupation import OccupationVector
from .models.report import BlockScore, BlockSearch
from .symspace import enumerate_occupations, occupation_rank

logger = logging.getLogger(__name__)

MERITS = ("single", "global")


def enumerate_blocks(d, excess):
    if excess < 0:
        raise DomainError(f"M - N must be >= 0, got {excess}")
    return enumerate_occupations(excess, d)


def _check_block(block, d, n_in, m_out):
    block = block if isinstance(block, OccupationVector) else OccupationVector(tuple(block))
    if block.d != d:
        raise DomainError(f"block {block.label()} has {block.d} levels, expected {d}")
    if block.total != m_out - n_in:
        raise DomainError(f"block {block.label()} has total {block.total}, expected M - N = {m_out - n_in}")
    return block


def block_single_fidelity(block, d, n_in, m_out):
    block = _check_block(block, d, n_in, m_out)
    return block_single_closed(d, n_in, block)


def block_global_fidelity(block, d, n_in, m_out):
    """Full double sum, cross terms included."""
    block = _check_block(block, d, n_in, m_out)
    return block_global_full(d, n_in, block)


def block_global_fidelity_diagonal(block, d, n_in, m_out):
    """Diagonal-only sum; kept as a diagnostic next to the full value."""
    block = _check_block(block, d, n_in, m_out)
    return block_global_diagonal(d, n_in, block)


def score_block(block, d, n_in, m_out):
    block = _check_block(block, d, n_in, m_out)
    return BlockScore(
        block=block,
        f_single_block=block_single_closed(d, n_in, block),
        f_global_block=block_global_full(d, n_in, block),
        f_global_diagonal=block_global_diagonal(d, n_in, block),
    )


def score_blocks(d, n_in, m_out):
    if m_out < n_in:
        raise DomainError(f"M={m_out} must be >= N={n_in}")
    scores = [score_block(block, d, n_in, m_out) for block in enumerate_blocks(d, m_out - n_in)]
    for score in scores:
        logger.debug(
            f"block {score.block.label()}: single={score.f_single_block:.12g} global={score.f_global_block:.12g}"
        )
    return scores


def find_optimal_blocks(d, n_in, m_out, merit="single", tie_rtol=TIE_RTOL, scores=None):
    """All blocks whose score is within tie_rtol of the best, in canonical order."""
    if merit not in MERITS:
        raise DomainError(f"unknown merit {merit!r}; expected one of {MERITS}")
    scores = scores if scores is not None else score_blocks(d, n_in, m_out)
    best = max(score.score(merit) for score in scores)
    winners = sorted(
        (score.block for score in scores if score.score(merit) >= best - tie_rtol * abs(best)),
        key=occupation_rank,
    )
    result = BlockSearch(d=d, n_in=n_in, m_out=m_out, merit=merit, winners=tuple(winners), scores=tuple(scores))
    if len(winners) > 1:
        logger.info(f"{len(winners)} tied blocks for d={d} {n_in}->{m_out} ({merit} merit)")
    elif result.is_economical_point and not winners[0].is_uniform():
        logger.warning(f"non-uniform optimum {winners[0].label()} at an M = N + k*d point")
    return result
