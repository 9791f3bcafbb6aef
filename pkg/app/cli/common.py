from typing import Any, Dict, List, Optional, Sequence

from app.models.curve import NevanlinnaCurve
from app.models.schemas import Report, Table
from app.services.bundle import AnyBundle


def make_report(descriptor, results: Dict[str, Any], warnings: Optional[List[str]] = None,
                header: Optional[Sequence[str]] = None, rows: Optional[List[list]] = None) -> Report:
    """Wrap handler results with the validated descriptor echo"""
    table = Table(header=list(header), rows=rows) if header is not None else None
    return Report(
        command=descriptor.command,
        inputs=descriptor.model_dump(mode="json", exclude_none=True),
        results=results,
        warnings=warnings or [],
        table=table,
    )


def row_warnings(rows, key: str = "r") -> List[str]:
    """One warning per row that failed its numerical guard"""
    return [f"{key}={getattr(row, key)}: {row.error}" for row in rows if getattr(row, "error", None)]


def on_template(b: AnyBundle, template: Optional[NevanlinnaCurve]) -> AnyBundle:
    """Move a Nevanlinna bundle onto the descriptor's integration settings"""
    if template is None or not isinstance(getattr(b, "curve", None), NevanlinnaCurve):
        return b
    return b.model_copy(update={"curve": template.with_radius(b.curve.R)})
