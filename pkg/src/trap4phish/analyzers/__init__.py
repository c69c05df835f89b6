"""Per-format static feature extractors. Each analyzer is a pure function of
the input bytes and always returns a full-length report, downgrading parse
problems to warnings."""

from .docx import DOCX_TOP10, analyze_docx, docx_schema, project_top10_docx
from .xlsx import (
    XLSX_TOP10,
    MacroMetrics,
    analyze_xlsx,
    compute_macro_metrics,
    project_top10_xlsx,
    xlsx_schema,
)
from .pdf import PDF_TOP10, analyze_pdf, pdf_schema, project_top10_pdf
from .html import HTML_TOP13, analyze_html, html_schema, project_top13_html

__all__ = [
    "analyze_docx",
    "docx_schema",
    "project_top10_docx",
    "DOCX_TOP10",
    "analyze_xlsx",
    "xlsx_schema",
    "project_top10_xlsx",
    "compute_macro_metrics",
    "MacroMetrics",
    "XLSX_TOP10",
    "analyze_pdf",
    "pdf_schema",
    "project_top10_pdf",
    "PDF_TOP10",
    "analyze_html",
    "html_schema",
    "project_top13_html",
    "HTML_TOP13",
]
