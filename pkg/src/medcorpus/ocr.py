"""Reading order for OCR text boxes, plus page exclusion.

Box lists come in as JSON lines ``{"page","x0","y0","x1","y1","content"}``
with y growing downward.  Boxes are grouped into rows and emitted
left-to-right within a row, rows top-to-bottom.  A plain ``(y, x)`` sort
breaks on slightly jittered baselines, so boxes are clustered into rows by
vertical overlap instead.

Right-to-left scripts and dual-column layouts are not handled; a
dual-column page will interleave its columns.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DataFormatError

#: A box joins a row when its vertical overlap with the row anchor is at
#: least this fraction of the shorter of the two heights.
ROW_OVERLAP_THRESHOLD = 0.5


@dataclass(frozen=True)
class TextBox:
    """One OCR text box on a page; y increases downward."""

    page: int
    x0: float
    y0: float
    x1: float
    y1: float
    content: str

    def __post_init__(self) -> None:
        if self.page < 1:
            raise DataFormatError(f"page must be >= 1, got {self.page}")
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise DataFormatError(
                f"degenerate box ({self.x0},{self.y0})-({self.x1},{self.y1})")
        if not self.content.strip():
            raise DataFormatError("box content is empty")

    @classmethod
    def from_json(cls, obj: dict) -> "TextBox":
        try:
            return cls(page=int(obj["page"]), x0=float(obj["x0"]), y0=float(obj["y0"]),
                       x1=float(obj["x1"]), y1=float(obj["y1"]), content=str(obj["content"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"bad text box record: {exc}") from exc


def _vertical_overlap_ratio(a: TextBox, b: TextBox) -> float:
    overlap = min(a.y1, b.y1) - max(a.y0, b.y0)
    shorter = min(a.y1 - a.y0, b.y1 - b.y0)
    return overlap / shorter if shorter > 0 else 0.0


def reading_order(
    boxes: list[TextBox],
    row_overlap: float = ROW_OVERLAP_THRESHOLD,
) -> list[str]:
    """Order one page's boxes left-to-right, top-to-bottom; return contents.

    Boxes are first sorted canonically (so any input permutation gives the
    same result), then clustered greedily: each box joins the existing row
    whose anchor box it overlaps best, provided that overlap meets the
    threshold; otherwise it starts a new row.  Rows come out ordered by
    their anchor's top edge, and each row is sorted by left edge.
    """
    if not boxes:
        return []
    ordered = sorted(boxes, key=lambda b: (b.y0, b.x0, b.y1, b.x1, b.content))
    rows: list[list[TextBox]] = []
    anchors: list[TextBox] = []
    for box in ordered:
        best_row = -1
        best_ratio = 0.0
        for i, anchor in enumerate(anchors):
            ratio = _vertical_overlap_ratio(box, anchor)
            if ratio > best_ratio:
                best_ratio = ratio
                best_row = i
        if best_row >= 0 and best_ratio >= row_overlap:
            rows[best_row].append(box)
        else:
            rows.append([box])
            anchors.append(box)
    out: list[str] = []
    for row in rows:
        row.sort(key=lambda b: (b.x0, b.y0, b.x1, b.content))
        out.extend(b.content for b in row)
    return out


def parse_page_ranges(spec: str) -> list[tuple[int, int]]:
    """Parse an exclusion spec like ``"1-3,250-260,400"`` into ranges."""
    ranges: list[tuple[int, int]] = []
    spec = spec.strip()
    if not spec:
        return ranges
    for part in spec.split(","):
        part = part.strip()
        if not part:
            raise DataFormatError(f"empty page range in {spec!r}")
        lo_str, sep, hi_str = part.partition("-")
        try:
            lo = int(lo_str)
            hi = int(hi_str) if sep else lo
        except ValueError as exc:
            raise DataFormatError(f"bad page range {part!r}") from exc
        if lo < 1 or hi < lo:
            raise DataFormatError(f"bad page range {part!r}: need 1 <= lo <= hi")
        ranges.append((lo, hi))
    return ranges


def exclude_pages(
    pages: dict[int, list[TextBox]],
    exclusions: str | list[tuple[int, int]],
) -> dict[int, list[TextBox]]:
    """Drop every page falling inside any exclusion range."""
    ranges = parse_page_ranges(exclusions) if isinstance(exclusions, str) else exclusions
    for lo, hi in ranges:
        if lo < 1 or hi < lo:
            raise DataFormatError(f"bad page range ({lo}, {hi})")
    return {page: boxes for page, boxes in pages.items()
            if not any(lo <= page <= hi for lo, hi in ranges)}


def group_boxes_by_page(boxes: list[TextBox]) -> dict[int, list[TextBox]]:
    pages: dict[int, list[TextBox]] = {}
    for box in boxes:
        pages.setdefault(box.page, []).append(box)
    return pages
