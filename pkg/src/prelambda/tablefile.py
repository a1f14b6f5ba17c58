"""Reading and writing tables as CSV grids."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import NotRectangular, ParseError
from .tables import ContingencyTable, ProbabilityTable


@dataclass(frozen=True)
class TableFile:
    path: str | Path
    mode: str = "counts"  # or "probabilities"
    has_header: bool = False


@dataclass(frozen=True)
class ParsedTable:
    table: ContingencyTable | ProbabilityTable
    row_labels: tuple[str, ...] | None = None
    col_labels: tuple[str, ...] | None = None


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def parse_table_text(text: str, mode: str = "counts", has_header: bool = False) -> ParsedTable:
    """Parse a comma-separated numeric grid.

    A first column whose data cells are all non-numeric is taken as row
    labels.  With ``has_header`` the first non-blank line supplies column
    labels.
    """
    if mode not in ("counts", "probabilities"):
        raise ValueError(f"unknown table mode {mode!r}")
    rows = [(lineno, rec) for lineno, rec in enumerate(csv.reader(io.StringIO(text)), start=1)
            if any(cell.strip() for cell in rec)]
    if not rows:
        raise ParseError("no data rows")
    header = None
    if has_header:
        header = [cell.strip() for cell in rows[0][1]]
        rows = rows[1:]
        if not rows:
            raise ParseError("header present but no data rows")

    widths = {len(rec) for _, rec in rows}
    if len(widths) != 1:
        lineno, rec = next((ln, r) for ln, r in rows if len(r) != len(rows[0][1]))
        raise NotRectangular(f"line {lineno} has {len(rec)} fields, expected {len(rows[0][1])}")

    labelled = all(not _is_number(rec[0].strip()) for _, rec in rows)
    grid = []
    for lineno, rec in rows:
        cells = rec[1:] if labelled else rec
        values = []
        for col, cell in enumerate(cells, start=2 if labelled else 1):
            try:
                v = float(cell.strip())
            except ValueError:
                raise ParseError(f"non-numeric cell {cell.strip()!r}", line=lineno, column=col) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite cell {cell.strip()!r}", line=lineno, column=col)
            values.append(v)
        grid.append(values)

    row_labels = tuple(rec[0].strip() for _, rec in rows) if labelled else None
    col_labels = None
    if header is not None:
        ncols = len(grid[0])
        if len(header) == ncols + 1:
            header = header[1:]
        if len(header) != ncols:
            raise NotRectangular(f"header has {len(header)} labels for {ncols} columns")
        col_labels = tuple(header)

    table = ContingencyTable(grid) if mode == "counts" else ProbabilityTable(grid)
    return ParsedTable(table, row_labels, col_labels)


def parse_table_file(spec: TableFile) -> ParsedTable:
    """Read ``spec.path`` (``-`` for stdin handled by the caller)."""
    try:
        text = Path(spec.path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {spec.path}: {exc.strerror}") from None
    return parse_table_text(text, spec.mode, spec.has_header)


def grid_to_csv(grid) -> str:
    """Full-precision CSV so a round trip reproduces every float exactly."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in grid:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
