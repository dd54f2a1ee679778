import logging
from io import BytesIO
from flask import Blueprint, current_app, jsonify, request, send_file
from werkzeug.datastructures import MultiDict
from app import limiter
from app.cloner import clone
from app.errors import ResourceError
from app.fidelity import curve_rows, fidelity_report, reduced_onebody, saturation_rows
from app.forms import BlocksQueryForm, CurveQueryForm, FidelityQueryForm, MachineQueryForm, VerifyRequestForm
from app.optimizer import MERITS, find_optimal_blocks, score_blocks
from app.utils.export import curve_to_csv, curve_to_xlsx
from app.verify import SuiteGrid, run_suite, summarize

logger = logging.getLogger(__name__)

api_bp = Blueprint("api", __name__)

METHOD_NAMES = {"closed": "closed_form", "sim": "simulation", "both": "both"}
XLSX_MIMETYPE = "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet"


def _invalid(form):
    return jsonify({"error": "invalid_query", "fields": form.errors}), 400


def _matrix_to_dict(matrix):
    return {"re": matrix.real.tolist(), "im": matrix.imag.tolist()}


def _suite_tolerances():
    return {"exact": current_app.config["TOL_EXACT"], "sum": current_app.config["TOL_SUM"]}


@api_bp.route("/fidelity")
def fidelity():
    form = FidelityQueryForm(request.args)
    if not form.validate():
        return _invalid(form)
    spec = form.spec()
    report = fidelity_report(
        spec,
        method=METHOD_NAMES[form.method.data],
        phases=form.phase_vector(),
        tol=current_app.config["TOL_SUM"],
    )
    return jsonify(report.to_dict())


@api_bp.route("/curve")
def curve():
    form = CurveQueryForm(request.args)
    if not form.validate():
        return _invalid(form)
    if form.m_out.data is not None:
        rows = [row for d in form.d_values for row in saturation_rows(d, form.m_out.data)]
    else:
        if form.max_k.data > current_app.config["MAX_SWEEP_K"]:
            raise ResourceError(f"max_k={form.max_k.data} exceeds the sweep limit {current_app.config['MAX_SWEEP_K']}")
        rows = curve_rows(form.d_values, form.n_in.data, form.max_k.data)

    if form.format.data == "json":
        return jsonify([row.to_dict() for row in rows])
    if form.format.data == "xlsx":
        return send_file(curve_to_xlsx(rows), mimetype=XLSX_MIMETYPE, as_attachment=True, download_name="curve.xlsx")
    return send_file(
        BytesIO(curve_to_csv(rows).encode("utf-8")),
        mimetype="text/csv",
        as_attachment=True,
        download_name="curve.csv",
    )


@api_bp.route("/blocks")
def blocks():
    form = BlocksQueryForm(request.args)
    if not form.validate():
        return _invalid(form)
    d, n_in, m_out = form.d.data, form.n_in.data, form.m_out.data
    scores = score_blocks(d, n_in, m_out)
    tie_rtol = current_app.config["TIE_RTOL"]
    searches = [find_optimal_blocks(d, n_in, m_out, merit=merit, tie_rtol=tie_rtol, scores=scores) for merit in MERITS]
    return jsonify(
        {
            "d": d,
            "n_in": n_in,
            "m_out": m_out,
            "scores": [score.to_dict() for score in scores],
            "winners": {search.merit: [list(block.counts) for block in search.winners] for search in searches},
        }
    )


@api_bp.route("/clone")
def clone_state():
    form = MachineQueryForm(request.args)
    if not form.validate():
        return _invalid(form)
    spec = form.spec()
    phases = form.phase_vector()
    output = clone(spec, phases)
    return jsonify(
        {
            "spec": spec.to_dict(),
            "phases": list(phases.phases),
            "output": output.to_dict(),
            "reduced": _matrix_to_dict(reduced_onebody(output, tol=current_app.config["TOL_EXACT"])),
        }
    )


@api_bp.route("/verify", methods=["POST"])
@limiter.limit(lambda: current_app.config["VERIFY_RATE_LIMIT"])
def verify():
    form = VerifyRequestForm(MultiDict(request.get_json(silent=True) or {}))
    if not form.validate():
        return _invalid(form)
    grid = SuiteGrid.up_to(
        max_d=form.max_d.data,
        max_n=form.max_n.data,
        max_k=form.max_k.data,
        phase_samples=form.phase_samples.data,
        oracle_cap=current_app.config["ORACLE_CAP"],
        choi_cap=current_app.config["CHOI_CAP"],
    )
    seed = form.seed.data if form.seed.data is not None else current_app.config["DEFAULT_SEED"]
    results = run_suite(grid, seed=seed, tolerance=form.tol.data, tolerances=_suite_tolerances())
    summary = summarize(results)
    logger.info(f"API verification run (seed {seed}): {summary}")
    return jsonify({"grid": grid.to_dict(), "seed": seed, "results": [r.to_dict() for r in results], "summary": summary})
