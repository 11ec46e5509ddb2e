"""Flatten an ontology graph into the four-column Class/Property/Incoming/Outgoing table."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple, Optional

from .ontology import NONE_SYMBOL, OntologyGraph, UndeclaredClassError, categorize_parts


class Attribute(IntEnum):
    CLASS = 0
    PROPERTY = 1
    INCOMING = 2
    OUTGOING = 3

    @property
    def key(self) -> str:
        """Lowercase name used in files and on the command line."""
        return self.name.lower()

    @property
    def title(self) -> str:
        return self.name.capitalize()

    @classmethod
    def parse(cls, text: str) -> "Attribute":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown attribute {text!r}") from None


ATTRIBUTES = tuple(Attribute)

# Cell value used when a class has no element in a category.
NONE = None


def value_key(value: Optional[str]):
    """Sort key for cell values: the empty sentinel first, then lexicographic."""
    return (0, "") if value is None else (1, value)


def format_value(value: Optional[str]) -> str:
    return NONE_SYMBOL if value is None else value


class Cell(NamedTuple):
    value: Optional[str]
    mu: float = 1.0


NONE_CELL = Cell(NONE, 1.0)


class DataRow(NamedTuple):
    row_index: int
    cells: tuple

    def value(self, attr: Attribute):
        return self.cells[attr].value

    def mu(self, attr: Attribute) -> float:
        return self.cells[attr].mu


@dataclass(frozen=True)
class DataSet:
    rows: tuple = ()
    source_id: str = ""

    def __post_init__(self):
        rows = tuple(self.rows)
        for i, row in enumerate(rows, 1):
            if row.row_index != i:
                raise ValueError(f"row {i} has row_index {row.row_index}")
            if len(row.cells) != len(ATTRIBUTES):
                raise ValueError(f"row {i} does not have {len(ATTRIBUTES)} cells")
            if row.cells[Attribute.CLASS].value is None:
                raise ValueError(f"row {i} has an empty Class cell")
        object.__setattr__(self, "rows", rows)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def column(self, attr: Attribute) -> list:
        return [row.cells[attr].value for row in self.rows]

    def values(self, attr: Attribute) -> list:
        """Distinct values of a column in sort order."""
        return sorted(set(self.column(attr)), key=value_key)

    @classmethod
    def from_values(cls, rows, mus=None, source_id="") -> "DataSet":
        """Build a dataset from 4-tuples of values (``None`` for the sentinel)."""
        out = []
        for i, values in enumerate(rows):
            mrow = mus[i] if mus is not None else (1.0,) * len(values)
            cells = tuple(Cell(v, 1.0 if v is None else m) for v, m in zip(values, mrow))
            out.append(DataRow(i + 1, cells))
        return cls(tuple(out), source_id)


def extract_class_rows(graph: OntologyGraph, cls: str, start: int = 1) -> list:
    """Rows for one class: property outermost, then outgoing, then incoming."""
    if cls not in graph:
        raise UndeclaredClassError(f"unknown class {cls!r}")
    parts = categorize_parts(graph, cls)
    class_cell = Cell(cls, graph.class_mu[cls])
    props = [Cell(*p) for p in parts.properties] or [NONE_CELL]
    incoming = [Cell(*r) for r in parts.incoming] or [NONE_CELL]
    outgoing = [Cell(*r) for r in parts.outgoing] or [NONE_CELL]
    rows = []
    index = start
    for p in props:
        for o in outgoing:
            for i in incoming:
                rows.append(DataRow(index, (class_cell, p, i, o)))
                index += 1
    return rows


def extract_dataset(graph: OntologyGraph) -> DataSet:
    rows = []
    for cls in graph.class_names():
        rows.extend(extract_class_rows(graph, cls, start=len(rows) + 1))
    return DataSet(tuple(rows), graph.source_id)


CSV_HEADER = ["row", "class", "class_mu", "property", "property_mu",
              "incoming", "incoming_mu", "outgoing", "outgoing_mu"]


def write_csv(dataset: DataSet, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in dataset.rows:
        record = [row.row_index]
        for cell in row.cells:
            record.append("" if cell.value is None else cell.value)
            record.append(f"{cell.mu:.6f}")
        writer.writerow(record)


def dataset_to_csv(dataset: DataSet) -> str:
    buf = io.StringIO()
    write_csv(dataset, buf)
    return buf.getvalue()
