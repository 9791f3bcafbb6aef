"""
Problem descriptors in, deterministic reports out
"""

import csv
import io
import json
import math
import sys
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

from pydantic import BaseModel, TypeAdapter, ValidationError

from app.config import settings
from app.exceptions import DescriptorError
from app.models.schemas import ProblemDescriptor, Report

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_DESCRIPTOR_ADAPTER = TypeAdapter(ProblemDescriptor)

FORMATS = ("toml", "json")


def _error_path(error: dict, command: Any) -> str:
    loc = list(error.get("loc", ()))
    if loc and loc[0] == command:
        loc = loc[1:]
    return ".".join(str(part) for part in loc)


def parse_descriptor(text: str, format: str = "json"):
    """
    Parse and validate a problem descriptor

    Args:
        text: Descriptor source
        format: "toml" or "json"

    Returns:
        Validated descriptor model

    Raises:
        DescriptorError: on syntax or schema failure, naming the offending path
    """
    if format not in FORMATS:
        raise DescriptorError(f"unknown format '{format}' (expected toml or json)")
    try:
        data = json.loads(text) if format == "json" else tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise DescriptorError(f"cannot parse {format}: {e}") from e
    if not isinstance(data, dict):
        raise DescriptorError("descriptor must be a table/object")
    try:
        return _DESCRIPTOR_ADAPTER.validate_python(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise DescriptorError(first["msg"], _error_path(first, data.get("command"))) from e


def emit_descriptor(descriptor) -> str:
    """Canonical JSON for a descriptor; parsing it back gives the same descriptor"""
    return descriptor.model_dump_json(indent=2)


def format_float(x: float) -> Any:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{settings.float_digits}g}")


def to_jsonable(value: Any) -> Any:
    """Report values with floats at 15 significant digits and exact rationals as "a/b" """
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump())
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return str(value)


def run(descriptor) -> Report:
    """Dispatch to the handler owning the command"""
    from app.cli import HANDLERS

    return HANDLERS[descriptor.command](descriptor)


def emit(report: Report, csv_output: Optional[bool] = None) -> bytes:
    """
    Serialize a report

    Reports carrying a grid table default to CSV, everything else to JSON;
    `csv_output` forces either form (CSV needs a table).
    """
    use_csv = report.table is not None if csv_output is None else csv_output
    if use_csv and report.table is not None:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(report.table.header)
        for row in report.table.rows:
            writer.writerow(["" if v is None else to_jsonable(v) for v in row])
        return buffer.getvalue().encode("utf-8")
    payload = {
        "command": report.command,
        "inputs": to_jsonable(report.inputs),
        "results": to_jsonable(report.results),
        "warnings": report.warnings,
        "version": report.version,
    }
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
