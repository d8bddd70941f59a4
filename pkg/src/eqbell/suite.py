"""Published class-count tables and the code that recomputes a row."""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from eqbell.geometry import facet_enumeration
from eqbell.geometry.standard import standard_facetness
from eqbell.scenario import Scenario
from eqbell.symmetry import classify, geometry_for, group_for


@dataclass(frozen=True)
class TableRow:
    scenario: str
    classes: int
    lfacets: int
    ppi: int
    max_facetness: Fraction | None = None
    size: str = "small"  # small, medium, large


TABLE_ROWS = (
    TableRow("n=2 m=2 k=2", 1, 1, 1),
    TableRow("n=2 m=2 k=3", 1, 0, 1),
    TableRow("n=2 m=3 k=2", 1, 1, 1),
    TableRow("n=2 m=3 k=3", 4, 0, 2),
    TableRow("n=2 m=3 k=4", 3, 0, 2),
    TableRow("n=3 m=2 k=2", 3, 0, 0),
    TableRow("n=2 m=4 k=2", 3, 3, 3, size="medium"),
    TableRow("n=3 m=2 k=2 mode=unanimous", 3, 0, 1, Fraction(19, 26), size="medium"),
    TableRow("n=3 m=2 k=3 mode=unanimous", 7, 0, 2, Fraction(115, 123), size="medium"),
    TableRow("n=4 m=2 k=2 mode=unanimous", 371, 3, 12, Fraction(1), size="large"),
)

SIZES = ("small", "medium", "large")


def rows_up_to(max_size: str = "small"):
    limit = SIZES.index(max_size)
    return [r for r in TABLE_ROWS if SIZES.index(r.size) <= limit]


@dataclass
class RowResult:
    row: TableRow
    classes: int
    lfacets: int
    ppi: int
    max_facetness: Fraction
    facetness_pair: tuple
    seconds: float
    class_list: list

    def checks(self) -> list[tuple[str, object, object, bool]]:
        r = self.row
        out = [("classes", r.classes, self.classes), ("L-facets", r.lfacets, self.lfacets), ("PPI", r.ppi, self.ppi)]
        if r.max_facetness is not None:
            out.append(("max-facetness", r.max_facetness, self.max_facetness))
        return [(name, want, got, want == got) for name, want, got in out]

    @property
    def ok(self) -> bool:
        return all(c[-1] for c in self.checks())


def compute_row(row: TableRow | str, positivity: str = "literal") -> RowResult:
    """Enumerate facets, classify them and evaluate each class on the standard scenario."""
    if isinstance(row, str):
        row = next((r for r in TABLE_ROWS if r.scenario == row), TableRow(row, -1, -1, -1))
    t0 = time.perf_counter()
    sc = Scenario.parse(row.scenario)
    geo = geometry_for(sc)
    hrep = facet_enumeration(geo.vertices)
    classes = classify(hrep, sc, geo, positivity=positivity, group=group_for(sc))
    best = Fraction(0)
    best_pair = (0, 0)
    lfacets = 0
    for c in classes:
        num, den = standard_facetness(c["representative"])
        c["standard_facetness"] = (num, den)
        lfacets += num == den
        if Fraction(num, den) > best:
            best, best_pair = Fraction(num, den), (num, den)
    ppi = sum(bool(c["ppi"]) for c in classes)
    return RowResult(row, len(classes), lfacets, ppi, best, best_pair, time.perf_counter() - t0, classes)


__all__ = ["TableRow", "TABLE_ROWS", "SIZES", "rows_up_to", "RowResult", "compute_row"]
