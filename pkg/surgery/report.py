"""
Reports: ordered key/value results of a plan run, with kv, text, JSON, Excel
and PDF renderings.
"""

import json
import logging
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

from surgery import config
from surgery.errors import PlanSyntaxError, SurgeryError

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """Exact text for a report value: booleans true/false, rationals p/q, lists comma-joined."""
    if value is None:
        return 'none'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (int, Fraction)):
        return str(value)
    if isinstance(value, (list, tuple)):
        if not value:
            return 'none'
        return ','.join(format_value(x) for x in value)
    return str(value)


class Report:
    """Insertion-ordered entries; setting an existing key keeps its position."""

    def __init__(self, name: str = ''):
        self.name = name
        self._entries: Dict[str, Any] = {}

    def set(self, key: str, value: Any) -> None:
        if '=' in key or not key.strip():
            raise SurgeryError(f"invalid report key '{key}'")
        self._entries[key] = value

    def get(self, key: str, default: Any = None) -> Any:
        return self._entries.get(key, default)

    def text(self, key: str) -> str:
        return format_value(self._entries[key])

    def __getitem__(self, key: str) -> Any:
        return self._entries[key]

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def items(self) -> List[Tuple[str, str]]:
        return [(key, format_value(value)) for key, value in self._entries.items()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Report):
            return NotImplemented
        return self.items() == other.items()


# ═══════════════════════════════════════════════════════════════════════════════
# TEXT FORMATS
# ═══════════════════════════════════════════════════════════════════════════════

def to_kv(report: Report) -> str:
    return ''.join(f"{key}={value}\n" for key, value in report.items())


def parse_kv(text: str, name: str = '') -> Report:
    report = Report(name)
    for number, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith('#'):
            continue
        key, sep, value = line.partition('=')
        if not sep:
            raise PlanSyntaxError(f"expected key=value, got '{line}'", number, 1)
        report.set(key, value)
    return report


def load_kv(path) -> Report:
    path = Path(path)
    try:
        return parse_kv(path.read_text(encoding='utf-8'), path.stem)
    except OSError as err:
        raise PlanSyntaxError(f"cannot read report {path}: {err.strerror}") from err


def to_text(report: Report) -> str:
    rows = report.items()
    width = max((len(key) for key, _ in rows), default=0)
    lines = ["=" * 50, f"{config.EMOJIS['report']} REPORT {report.name}".rstrip(), "=" * 50]
    lines += [f"{key.ljust(width)}  {value}" for key, value in rows]
    lines.append("=" * 50)
    return '\n'.join(lines) + '\n'


def to_json(report: Report) -> str:
    return json.dumps({'name': report.name, 'entries': dict(report.items())}, indent=2, ensure_ascii=False) + '\n'


# ═══════════════════════════════════════════════════════════════════════════════
# EXPORTS
# ═══════════════════════════════════════════════════════════════════════════════

def export_xlsx(report: Report, filename) -> Path:
    from openpyxl import Workbook
    from openpyxl.styles import Font, PatternFill

    wb = Workbook()
    ws = wb.active
    ws.title = "Report"

    # Headers
    ws.append(['Key', 'Value'])
    for cell in ws[1]:
        cell.font = Font(bold=True)
        cell.fill = PatternFill(start_color="DDDDDD", end_color="DDDDDD", fill_type="solid")

    # Data
    for key, value in report.items():
        ws.append([key, value])

    ws.column_dimensions['A'].width = max((len(key) for key in report), default=10) + 2
    ws.column_dimensions['B'].width = 60

    wb.save(filename)
    return Path(filename)


def export_pdf(report: Report, filename) -> Path:
    from reportlab.lib import colors
    from reportlab.lib.pagesizes import A4, landscape
    from reportlab.lib.styles import getSampleStyleSheet
    from reportlab.lib.units import inch
    from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

    doc = SimpleDocTemplate(str(filename), pagesize=landscape(A4))
    elements = []
    styles = getSampleStyleSheet()

    # Title
    elements.append(Paragraph(f"Surgery report {report.name}".strip(), styles['Title']))
    elements.append(Spacer(1, 0.2 * inch))

    summary = f"Generated: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}<br/>Entries: {len(report)}"
    elements.append(Paragraph(summary, styles['Normal']))
    elements.append(Spacer(1, 0.3 * inch))

    # Long forms wrap inside their cell
    cell = styles['BodyText']
    data = [['Key', 'Value']]
    for key, value in report.items():
        data.append([Paragraph(key, cell), Paragraph(value, cell)])

    table = Table(data, colWidths=[3.0 * inch, 7.0 * inch])
    table.setStyle(TableStyle([
        ('BACKGROUND', (0, 0), (-1, 0), colors.grey),
        ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
        ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
        ('FONTSIZE', (0, 0), (-1, 0), 12),
        ('BOTTOMPADDING', (0, 0), (-1, 0), 12),
        ('BACKGROUND', (0, 1), (-1, -1), colors.beige),
        ('VALIGN', (0, 0), (-1, -1), 'TOP'),
        ('GRID', (0, 0), (-1, -1), 1, colors.black),
    ]))

    elements.append(table)
    doc.build(elements)
    return Path(filename)


def render(report: Report, fmt: Optional[str] = None) -> str:
    fmt = fmt or config.REPORT_FORMAT
    if fmt == 'kv':
        return to_kv(report)
    if fmt == 'json':
        return to_json(report)
    if fmt == 'text':
        return to_text(report)
    raise SurgeryError(f"format '{fmt}' is written to a file, not rendered as text")


def write_report(report: Report, fmt: str, filename=None) -> Path:
    """Write the report in the given format; binary formats get a timestamped default name."""
    if fmt not in config.REPORT_FORMATS:
        raise SurgeryError(f"unknown report format '{fmt}', expected one of {', '.join(config.REPORT_FORMATS)}")
    if filename is None:
        suffix = {'text': 'txt', 'xlsx': 'xlsx', 'pdf': 'pdf', 'json': 'json', 'kv': 'kv'}[fmt]
        stem = report.name or 'report'
        filename = f"{stem}_{datetime.now().strftime('%Y%m%d_%H%M%S')}.{suffix}"
    if fmt == 'xlsx':
        path = export_xlsx(report, filename)
    elif fmt == 'pdf':
        path = export_pdf(report, filename)
    else:
        path = Path(filename)
        path.write_text(render(report, fmt), encoding='utf-8', newline='\n')
    logger.info("report %s written as %s to %s", report.name, fmt, path)
    return path
