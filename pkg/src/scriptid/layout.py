"""Page decomposition into lines and word parts, plus baseline estimation.

A page splits into horizontal line bands wherever the horizontal projection
goes blank for long enough. Within a line, ink is grouped into word parts:
connected components, with small detached marks above or below the body band
reattached to the body they annotate, ordered right to left. Two baseline
rows bound the dense body band of a word; they are estimated as the widest
run of rows whose projection stays above a fraction of the peak, restricted
to runs that contain the peak itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import connected_components
from .raster import BinaryRaster

__all__ = [
    "NoInkError",
    "Baselines",
    "LineBand",
    "Paw",
    "extract_lines",
    "segment_paws",
    "estimate_baselines",
]


class NoInkError(ValueError):
    """Raised when an operation needs ink pixels and the image has none."""


@dataclass(frozen=True)
class Baselines:
    """Upper and lower baseline rows splitting a word into three zones."""

    upper_row: int
    lower_row: int

    def __post_init__(self):
        if not 0 <= self.upper_row <= self.lower_row:
            raise ValueError(
                f"need 0 <= upper_row <= lower_row, got ({self.upper_row}, {self.lower_row})"
            )

    @property
    def band_height(self) -> int:
        return self.lower_row - self.upper_row


@dataclass(frozen=True)
class LineBand:
    """Row extent of one text line; bands of a page are disjoint and ordered."""

    top_row: int
    bottom_row: int


@dataclass(eq=False)
class Paw:
    """One word part: a body component plus any reattached detached marks.

    order_index runs right to left, the rightmost part being 0.
    """

    bbox: tuple[int, int, int, int]
    pixels: np.ndarray
    order_index: int

    def pixel_set(self):
        return {(int(r), int(c)) for r, c in self.pixels}


def extract_lines(page: BinaryRaster, merge_gap: int = 2) -> list[LineBand]:
    """Find line bands as maximal inked row runs of the horizontal projection.

    Blank runs shorter than merge_gap rows do not split a line, which keeps
    broken strokes in scans together.
    """
    if merge_gap < 0:
        raise ValueError("merge_gap must be >= 0")
    inked = np.flatnonzero(page.pixels.any(axis=1))
    if inked.size == 0:
        return []
    groups = np.split(inked, np.flatnonzero(np.diff(inked) > merge_gap) + 1)
    return [LineBand(int(g[0]), int(g[-1])) for g in groups]


def estimate_baselines(word: BinaryRaster, alpha: float = 0.5) -> Baselines:
    """Estimate the dense body band of a word from its horizontal projection.

    Rows whose count reaches alpha times the peak are band candidates; the
    widest candidate run containing a peak row wins, topmost on ties. The
    returned band therefore always holds the projection's global maximum.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    counts = word.pixels.sum(axis=1)
    peak = int(counts.max())
    if peak == 0:
        raise NoInkError("cannot estimate baselines of a blank image")
    dense = np.flatnonzero(counts >= alpha * peak)
    runs = np.split(dense, np.flatnonzero(np.diff(dense) > 1) + 1)
    best = None
    for run in runs:
        if not (counts[run] == peak).any():
            continue
        if best is None or len(run) > len(best):
            best = run
    return Baselines(int(best[0]), int(best[-1]))


def _column_overlap(a: tuple[int, int, int, int], b: tuple[int, int, int, int]) -> int:
    # Signed overlap: negative values measure the gap, so the horizontally
    # nearest body still wins when no body overlaps the mark.
    return min(a[3], b[3]) - max(a[1], b[1])


def segment_paws(
    line: BinaryRaster,
    baselines: Baselines | None = None,
    alpha: float = 0.5,
) -> list[Paw]:
    """Group the ink of a single line into word parts, right to left.

    Components lying entirely above the upper baseline or entirely below the
    lower one are detached marks, not standalone parts; each is attached to
    the body component with maximal column overlap (nearest centroid on
    ties). The resulting pixel sets partition the line's ink.
    """
    comps = connected_components(line)
    if not comps:
        return []
    b = baselines if baselines is not None else estimate_baselines(line, alpha=alpha)

    marks = [c for c in comps if c.bbox[2] < b.upper_row or c.bbox[0] > b.lower_row]
    bodies = [c for c in comps if c not in marks]
    if not bodies:
        bodies, marks = comps, []

    groups = {id(body): [body] for body in bodies}
    centroids = {id(body): body.pixels.mean(axis=0) for body in bodies}
    for mark in marks:
        mc = mark.pixels.mean(axis=0)
        best = max(
            bodies,
            key=lambda body: (
                _column_overlap(body.bbox, mark.bbox),
                -float(np.hypot(*(centroids[id(body)] - mc))),
            ),
        )
        groups[id(best)].append(mark)

    paws = []
    for body in bodies:
        members = groups[id(body)]
        pixels = np.concatenate([m.pixels for m in members])
        order = np.lexsort((pixels[:, 1], pixels[:, 0]))
        pixels = pixels[order]
        bbox = (
            int(pixels[:, 0].min()),
            int(pixels[:, 1].min()),
            int(pixels[:, 0].max()),
            int(pixels[:, 1].max()),
        )
        paws.append((bbox, pixels))
    paws.sort(key=lambda t: (-t[0][3], -t[0][1], t[0][0]))
    return [Paw(bbox, pixels, i) for i, (bbox, pixels) in enumerate(paws)]
