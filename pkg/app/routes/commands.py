"""Command-line front end, registered on the Flask CLI (`flask --app app <command>` or `python -m app <command>`).

Exit codes: 0 success, 1 verification failure or discrepancy, 2 usage error.
"""
import json
import logging
import click
from flask import Blueprint, current_app
from app.cloner import clone
from app.errors import DiscrepancyError, DomainError
from app.fidelity import curve_rows, fidelity_report, reduced_onebody, saturation_rows
from app.forms import parse_int_list
from app.models.cloner import ClonerSpec
from app.models.state import PhaseVector
from app.optimizer import MERITS, find_optimal_blocks, score_blocks
from app.symspace import enumerate_occupations
from app.utils.export import (
    blocks_to_text,
    clone_to_text,
    curve_to_csv,
    curve_to_xlsx,
    report_to_text,
    results_to_jsonl,
)
from app.verify import SuiteGrid, run_suite, summarize

logger = logging.getLogger(__name__)

commands_bp = Blueprint("commands", __name__, cli_group=None)

METHOD_NAMES = {"closed": "closed_form", "sim": "simulation", "both": "both"}


def _emit(text, out=None):
    if out is None:
        click.echo(text, nl=False)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    logger.info(f"wrote {out}")


def _machine(d, n_in, k, m_out):
    if k is None and m_out is None:
        raise click.UsageError("give --k or --m-out")
    try:
        if k is not None:
            spec = ClonerSpec(d=d, n_in=n_in, k=k)
            if m_out is not None and m_out != spec.m_out:
                raise DomainError(f"--m-out {m_out} does not match M = N + k*d = {spec.m_out}")
            return spec
        return ClonerSpec.from_outputs(d, n_in, m_out)
    except DomainError as e:
        raise click.UsageError(str(e))


def _phases(text, d):
    if text is None:
        return PhaseVector.zeros(d)
    try:
        return PhaseVector.parse(text, d)
    except DomainError as e:
        raise click.BadParameter(str(e), param_hint="--phases")


@commands_bp.cli.command("fidelity")
@click.option("--d", "d", type=click.IntRange(min=2), required=True, help="Qudit dimension.")
@click.option("--n-in", type=click.IntRange(min=1), required=True, help="Number of input copies N.")
@click.option("--k", type=click.IntRange(min=0), default=None, help="Excitations added per level; M = N + k*d.")
@click.option("--m-out", type=click.IntRange(min=1), default=None, help="Number of output copies M.")
@click.option("--method", type=click.Choice(["closed", "sim", "both"]), default="closed", show_default=True)
@click.option("--phases", default=None, help="Comma-separated phases phi_1..phi_{d-1} in radians.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
def fidelity_command(d, n_in, k, m_out, method, phases, fmt):
    """Single-qudit and global fidelity of the optimal N -> M phase-covariant cloner."""
    spec = _machine(d, n_in, k, m_out)
    phase_vector = _phases(phases, d)
    try:
        report = fidelity_report(spec, method=METHOD_NAMES[method], phases=phase_vector, tol=current_app.config["TOL_SUM"])
    except DiscrepancyError as e:
        raise click.ClickException(str(e))
    data = report.to_dict()
    _emit(json.dumps(data, indent=2) + "\n" if fmt == "json" else report_to_text(data))


@commands_bp.cli.command("curve")
@click.option("--d", "d", required=True, help="Dimension, or comma list of dimensions in k-sweep mode.")
@click.option("--n-in", type=click.IntRange(min=1), default=None, help="N for the k sweep.")
@click.option("--max-k", type=click.IntRange(min=0), default=None, help="Sweep k = 0..max_k.")
@click.option("--m-out", type=click.IntRange(min=1), default=None, help="Fixed M for the saturation sweep over N.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "xlsx"]), default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Output file.")
def curve_command(d, n_in, max_k, m_out, fmt, out):
    """Fidelity curves: phase-covariant, universal and the estimation limit."""
    try:
        d_values = parse_int_list(d)
    except DomainError as e:
        raise click.BadParameter(str(e), param_hint="--d")
    if any(value < 2 for value in d_values):
        raise click.BadParameter("every d must be >= 2", param_hint="--d")
    if fmt == "xlsx" and out is None:
        raise click.UsageError("--format xlsx needs --out")
    try:
        if m_out is not None:
            rows = [row for value in d_values for row in saturation_rows(value, m_out)]
        elif n_in is not None and max_k is not None:
            if max_k > current_app.config["MAX_SWEEP_K"]:
                raise DomainError(f"--max-k {max_k} exceeds the sweep limit {current_app.config['MAX_SWEEP_K']}")
            rows = curve_rows(d_values, n_in, max_k)
        else:
            raise DomainError("give --m-out (saturation sweep) or --n-in with --max-k (k sweep)")
    except DomainError as e:
        raise click.UsageError(str(e))

    if fmt == "xlsx":
        with open(out, "wb") as handle:
            handle.write(curve_to_xlsx(rows).getvalue())
        logger.info(f"wrote {out}")
    elif fmt == "json":
        _emit(json.dumps([row.to_dict() for row in rows], indent=2) + "\n", out)
    else:
        _emit(curve_to_csv(rows), out)


@commands_bp.cli.command("blocks")
@click.option("--d", "d", type=click.IntRange(min=2), required=True)
@click.option("--n-in", type=click.IntRange(min=1), required=True)
@click.option("--m-out", type=click.IntRange(min=1), required=True)
@click.option("--merit", type=click.Choice(["single", "global", "both"]), default="both", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
def blocks_command(d, n_in, m_out, merit, fmt):
    """Score every block {m} with |m| = M - N and report the best ones."""
    if m_out < n_in:
        raise click.UsageError(f"--m-out {m_out} must be >= --n-in {n_in}")
    merits = MERITS if merit == "both" else (merit,)
    scores = score_blocks(d, n_in, m_out)
    tie_rtol = current_app.config["TIE_RTOL"]
    searches = [find_optimal_blocks(d, n_in, m_out, merit=m, tie_rtol=tie_rtol, scores=scores) for m in merits]
    if fmt == "json":
        data = {
            "d": d,
            "n_in": n_in,
            "m_out": m_out,
            "scores": [score.to_dict() for score in scores],
            "winners": {search.merit: [list(block.counts) for block in search.winners] for search in searches},
        }
        _emit(json.dumps(data, indent=2) + "\n")
    else:
        _emit(blocks_to_text(searches))


@commands_bp.cli.command("verify")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Suite seed (default from config).")
@click.option("--max-d", type=click.IntRange(min=2), default=3, show_default=True)
@click.option("--max-n", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--max-k", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--phase-samples", type=click.IntRange(min=1), default=20, show_default=True)
@click.option("--tol", type=click.FloatRange(min=0.0), default=None, help="Override every tolerance.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Write the report here.")
@click.pass_context
def verify_command(ctx, seed, max_d, max_n, max_k, phase_samples, tol, out):
    """Run the verification suite; JSON lines, one per check, then a summary line."""
    config = current_app.config
    seed = config["DEFAULT_SEED"] if seed is None else seed
    grid = SuiteGrid.up_to(
        max_d=max_d,
        max_n=max_n,
        max_k=max_k,
        phase_samples=phase_samples,
        oracle_cap=config["ORACLE_CAP"],
        choi_cap=config["CHOI_CAP"],
    )
    results = run_suite(
        grid, seed=seed, tolerance=tol, tolerances={"exact": config["TOL_EXACT"], "sum": config["TOL_SUM"]}
    )
    summary = summarize(results)
    _emit(results_to_jsonl(results, summary), out)
    if summary["failed"]:
        logger.error(f"{summary['failed']} verification checks failed")
        ctx.exit(1)


@commands_bp.cli.command("clone")
@click.option("--d", "d", type=click.IntRange(min=2), required=True)
@click.option("--n-in", type=click.IntRange(min=1), required=True)
@click.option("--k", type=click.IntRange(min=0), required=True)
@click.option("--phases", default=None, help="Comma-separated phases phi_1..phi_{d-1} in radians.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
def clone_command(d, n_in, k, phases, fmt):
    """Apply the shift isometry to |psi(phi)>^N and print the output state."""
    spec = _machine(d, n_in, k, None)
    phase_vector = _phases(phases, d)
    output = clone(spec, phase_vector)
    reduced = reduced_onebody(output, tol=current_app.config["TOL_EXACT"])
    if fmt == "json":
        data = {
            "spec": spec.to_dict(),
            "phases": list(phase_vector.phases),
            "output": output.to_dict(),
            "reduced": {"re": reduced.real.tolist(), "im": reduced.imag.tolist()},
        }
        _emit(json.dumps(data, indent=2) + "\n")
    else:
        _emit(clone_to_text(output, reduced, enumerate_occupations(spec.m_out, d)))
