"""Problem files, JSON reports and the command-line driver."""

from .parser import ProblemFile, format_problem, parse_input
from .report import SCHEMA_VERSION, emit_report, to_jsonable

__all__ = ["ProblemFile", "SCHEMA_VERSION", "emit_report", "format_problem", "parse_input", "to_jsonable"]
