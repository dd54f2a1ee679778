import json
import logging
from io import BytesIO, StringIO
import pandas as pd
from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.utils import get_column_letter

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ["d", "n_in", "m_out", "k", "f_phase", "f_universal", "f_limit"]
FLOAT_FORMAT = "%.12g"
UNIVERSAL_NOTE = (
    "f_universal is the literature closed form N/M + (M-N)(N+1)/(M(N+d)) of the optimal "
    "universal cloner, listed for comparison only"
)


def curve_frame(rows):
    return pd.DataFrame([row.to_dict() for row in rows], columns=CURVE_COLUMNS)


def curve_to_csv(rows):
    """Curve table as CSV text: one # comment line, header, LF line endings."""
    buffer = StringIO()
    buffer.write(f"# {UNIVERSAL_NOTE}\n")
    curve_frame(rows).to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def curve_to_xlsx(rows):
    """Curve table as an .xlsx workbook in memory, plus a Notes sheet."""
    wb = Workbook()
    ws = wb.active
    ws.title = "Curve"
    header_font = Font(bold=True, name="Calibri", size=12, color="FFFFFF")
    header_fill = PatternFill(start_color="1E659E", end_color="1E659E", fill_type="solid")

    ws.append(CURVE_COLUMNS)
    for cell in ws[1]:
        cell.font = header_font
        cell.fill = header_fill
        cell.alignment = Alignment(horizontal="center")
    for row in curve_frame(rows).itertuples(index=False):
        ws.append([value.item() if hasattr(value, "item") else value for value in row])
    for col, name in enumerate(CURVE_COLUMNS, start=1):
        ws.column_dimensions[get_column_letter(col)].width = max(len(name) + 4, 16)
    ws.freeze_panes = "A2"

    notes = wb.create_sheet("Notes")
    notes.append(["note"])
    notes["A1"].font = Font(bold=True)
    notes.append([UNIVERSAL_NOTE])
    notes.column_dimensions["A"].width = 120

    output = BytesIO()
    wb.save(output)
    output.seek(0)
    logger.debug(f"curve workbook written with {len(rows)} rows")
    return output


def results_to_jsonl(results, summary):
    """One JSON object per check, then a summary line; keys sorted for byte-stable output."""
    lines = [json.dumps(result.to_dict(), sort_keys=True) for result in results]
    lines.append(json.dumps({"summary": summary}, sort_keys=True))
    return "\n".join(lines) + "\n"


def report_to_text(data):
    """Aligned key: value lines for a flat report dict."""
    width = max(len(key) for key in data)
    lines = []
    for key, value in data.items():
        if isinstance(value, float):
            value = format(value, ".12g")
        lines.append(f"{key.ljust(width)}  {value}")
    return "\n".join(lines) + "\n"


def blocks_to_text(searches):
    """Block table with both scores; winners under each merit are marked."""
    first = searches[0]
    marks = {search.merit: set(search.winners) for search in searches}
    lines = [f"d={first.d} N={first.n_in} M={first.m_out}", f"{'block':<16}{'f_single':>18}{'f_global':>18}  best"]
    for score in first.scores:
        best = ",".join(merit for merit in marks if score.block in marks[merit])
        lines.append(
            f"{score.block.label():<16}{score.f_single_block:>18.12g}{score.f_global_block:>18.12g}  {best}".rstrip()
        )
    for search in searches:
        lines.append(f"winners ({search.merit}): {' '.join(block.label() for block in search.winners)}")
    return "\n".join(lines) + "\n"


def clone_to_text(vector, reduced, occupations):
    """Output state rows `occupation, re, im` then the reduced one-body matrix."""
    lines = [f"{'occupation':<16}{'re':>20}{'im':>20}"]
    for occ, amp in zip(occupations, vector.amplitudes):
        lines.append(f"{occ.label():<16}{amp.real:>20.12g}{amp.imag:>20.12g}")
    lines.append("reduced one-body matrix:")
    for row in reduced:
        lines.append("  ".join(f"{value.real:.12g}{value.imag:+.12g}j" for value in row))
    return "\n".join(lines) + "\n"
