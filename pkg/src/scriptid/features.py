"""Structural primitive detection: poles, jambs, diacritic dots, and loops.

A word is measured against two baseline rows. Rows above the upper baseline
form the upper zone, rows below the lower baseline the lower zone, and the
rows between them the body band. The margins derive from the band height h:
a pole (H) must rise more than 2h above the upper baseline and a jamb (J)
must drop more than h below the lower one. A closed outer contour shorter
than the contour cap counts as an upper (P) or lower (Q) diacritic dot when
it lies entirely inside the matching outer zone. A background hole whose
boundary touches the band counts as a loop (B) if that boundary stays under
the same cap; larger holes are dropped but tallied.

Classification order is dots, then loops, then poles and jambs, so a deep
detached dot can never double as a pole or a jamb. Per-word extraction is a
pure function of its inputs and is independently parallelizable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .geometry import ContourChain, _trace, trace_contours
from .layout import Baselines, NoInkError, segment_paws
from .raster import BinaryRaster, dilate

__all__ = [
    "FEATURE_KINDS",
    "POSITIONS",
    "FeatureThresholds",
    "FeatureHit",
    "FeatureSet",
    "detect_poles",
    "detect_jambs",
    "detect_diacritics",
    "detect_loops",
    "detect_positions",
    "feature_zones",
    "extract_features",
    "combine_feature_sets",
]

FEATURE_KINDS = ("H", "J", "P", "Q", "B")
POSITIONS = ("D", "M", "F", "I")

_EIGHT = np.ones((3, 3), dtype=int)


@dataclass(frozen=True)
class FeatureThresholds:
    """Pole/jamb margins in pixels plus the diacritic contour cap in points."""

    marge_h: int
    marge_j: int
    diacritic_max_contour: int = 60

    def __post_init__(self):
        if self.diacritic_max_contour <= 0:
            raise ValueError("diacritic_max_contour must be positive")

    @classmethod
    def from_baselines(cls, baselines: Baselines, diacritic_max_contour: int = 60):
        """Margins recomputed per word: marge_h = 2 * band height, marge_j = band height."""
        h = baselines.band_height
        return cls(marge_h=2 * h, marge_j=h, diacritic_max_contour=diacritic_max_contour)


@dataclass(frozen=True)
class FeatureHit:
    """One detected primitive with a representative pixel.

    paw_index and position stay None until the full extraction pipeline
    assigns them; the standalone detectors do not know the word layout.
    """

    kind: str
    location: tuple[int, int]
    paw_index: int | None = None
    position: str | None = None


@dataclass(frozen=True)
class FeatureSet:
    """Occurrence counts of the five primitives plus the word-part count."""

    counts: dict[str, int]
    nb_paws: int
    hits: tuple[FeatureHit, ...] = ()
    dropped_oversize_loops: int = 0

    @classmethod
    def empty(cls) -> "FeatureSet":
        return cls(counts={k: 0 for k in FEATURE_KINDS}, nb_paws=0)

    def total_hits(self) -> int:
        return sum(self.counts.values())


def _zone_rows(chain: ContourChain):
    rows = [p[0] for p in chain.points]
    return min(rows), max(rows)


def detect_diacritics(chains, baselines: Baselines, thresholds: FeatureThresholds):
    """Split short closed outer chains into upper (P) and lower (Q) dots.

    A chain qualifies only when every point sits strictly inside one outer
    zone; anything touching the body band is left to the loop stage.
    Returns the (P hits, Q hits) pair.
    """
    p_hits, q_hits = [], []
    for chain in chains:
        if chain.polarity != "outer" or not chain.closed:
            continue
        if chain.length >= thresholds.diacritic_max_contour:
            continue
        lo, hi = _zone_rows(chain)
        if hi < baselines.upper_row:
            p_hits.append(FeatureHit("P", chain.points[0]))
        elif lo > baselines.lower_row:
            q_hits.append(FeatureHit("Q", chain.points[0]))
    return p_hits, q_hits


def detect_loops(chains, word: BinaryRaster, baselines: Baselines, thresholds: FeatureThresholds):
    """Find loops: hole boundaries short enough that touch the body band.

    Each candidate passes an inclusion check before it counts: blank out the
    enclosing ink region and verify the candidate's boundary pixels vanish
    from the re-traced contours, proving the hole really lives inside that
    region. word must be the raster the chains were traced from.
    """
    labels, _ = ndimage.label(word.pixels, structure=_EIGHT)
    erased_points: dict[int, set] = {}
    hits = []
    for chain in chains:
        if chain.polarity != "inner" or not chain.closed:
            continue
        if chain.length >= thresholds.diacritic_max_contour:
            continue
        lo, hi = _zone_rows(chain)
        if hi < baselines.upper_row or lo > baselines.lower_row:
            continue
        enclosing = int(labels[chain.points[0]])
        if enclosing not in erased_points:
            remaining = BinaryRaster(word.pixels & (labels != enclosing))
            erased_points[enclosing] = {
                p for ch in trace_contours(remaining) for p in ch.points
            }
        if erased_points[enclosing].isdisjoint(chain.points):
            hits.append(FeatureHit("B", chain.points[0]))
    return hits


def _dot_component_labels(word: BinaryRaster, labels, objects, baselines, thresholds):
    """Labels of components that classify as detached dots.

    A component entirely above the upper baseline or entirely below the
    lower one whose closed outer contour stays under the cap is a dot and
    must not feed the pole/jamb detectors.
    """
    dots = set()
    for lab, sl in enumerate(objects, start=1):
        if sl is None:
            continue
        top, bottom = sl[0].start, sl[0].stop - 1
        if not (bottom < baselines.upper_row or top > baselines.lower_row):
            continue
        local = np.argwhere(labels[sl] == lab)[0]
        start = (int(local[0] + sl[0].start), int(local[1] + sl[1].start))
        boundary = _trace(word.pixels, start, (start[0], start[1] - 1))
        if len(boundary) < thresholds.diacritic_max_contour:
            dots.add(lab)
    return dots


def _extremum_hits(word, baselines, thresholds, kind):
    """Common pole/jamb scan over one outer zone.

    Each 8-connected ink region beyond the baseline becomes one hit when its
    extremal pixel clears the margin, with detached dots excluded.
    """
    labels, _ = ndimage.label(word.pixels, structure=_EIGHT)
    objects = ndimage.find_objects(labels)
    dots = _dot_component_labels(word, labels, objects, baselines, thresholds)

    if kind == "H":
        if baselines.upper_row == 0:
            return []
        zone = word.pixels[: baselines.upper_row]
        offset = 0
    else:
        if baselines.lower_row >= word.height - 1:
            return []
        zone = word.pixels[baselines.lower_row + 1 :]
        offset = baselines.lower_row + 1

    hits = []
    zone_labels, _ = ndimage.label(zone, structure=_EIGHT)
    for lab, sl in enumerate(ndimage.find_objects(zone_labels), start=1):
        if sl is None:
            continue
        region = np.argwhere(zone_labels[sl] == lab) + (sl[0].start, sl[1].start)
        anchor = (int(region[0][0] + offset), int(region[0][1]))
        if int(labels[anchor]) in dots:
            continue
        if kind == "H":
            top = int(region[:, 0].min())
            extent = baselines.upper_row - top
            tip_rows = region[region[:, 0] == top]
            tip = (top, int(tip_rows[:, 1].min()))
            margin = thresholds.marge_h
        else:
            bottom = int(region[:, 0].max())
            extent = bottom + offset - baselines.lower_row
            tip_rows = region[region[:, 0] == bottom]
            tip = (bottom + offset, int(tip_rows[:, 1].min()))
            margin = thresholds.marge_j
        if extent > margin:
            hits.append(FeatureHit(kind, tip))
    hits.sort(key=lambda h: h.location)
    return hits


def detect_poles(word: BinaryRaster, baselines: Baselines, thresholds: FeatureThresholds):
    """Poles: ink regions whose top rises more than marge_h above the upper baseline."""
    return _extremum_hits(word, baselines, thresholds, "H")


def detect_jambs(word: BinaryRaster, baselines: Baselines, thresholds: FeatureThresholds):
    """Jambs: ink regions whose bottom drops more than marge_j below the lower baseline."""
    return _extremum_hits(word, baselines, thresholds, "J")


def feature_zones(word: BinaryRaster) -> list[tuple[int, int]]:
    """Column intervals of letter zones, delimited by vertical projection minima.

    Blank columns split zones outright; inside an inked run, every strict
    local-minimum plateau marks a boundary at its center column, which
    belongs to neither neighboring zone.
    """
    counts = word.pixels.sum(axis=0)
    inked = np.flatnonzero(counts > 0)
    if inked.size == 0:
        return []
    runs = np.split(inked, np.flatnonzero(np.diff(inked) > 1) + 1)

    zones = []
    for run in runs:
        start, end = int(run[0]), int(run[-1])
        boundaries = []
        i = start + 1
        while i <= end - 1:
            j = i
            while j + 1 <= end - 1 and counts[j + 1] == counts[i]:
                j += 1
            if counts[i - 1] > counts[i] and counts[j + 1] > counts[j]:
                boundaries.append((i + j) // 2)
            i = j + 1
        cursor = start
        for boundary in boundaries:
            if cursor <= boundary - 1:
                zones.append((cursor, boundary - 1))
            cursor = boundary + 1
        if cursor <= end:
            zones.append((cursor, end))
    return zones


def detect_positions(
    word: BinaryRaster,
    baselines: Baselines,
    zone_bounds,
    neighborhood: int = 2,
) -> list[str]:
    """Tag each letter zone as start D, middle M, final F, or isolated I.

    Ink is counted in the body band within neighborhood columns just outside
    each zone edge. Reading right to left, a letter that continues leftward
    but not rightward starts a word part: left > 0 and right = 0 gives D,
    both sides inked gives M, right only gives F, neither gives I.
    """
    band = word.pixels[baselines.upper_row : baselines.lower_row + 1]
    width = word.width
    tags = []
    for c0, c1 in zone_bounds:
        left = bool(band[:, max(0, c0 - neighborhood) : c0].any()) if c0 > 0 else False
        right = bool(band[:, c1 + 1 : min(width, c1 + 1 + neighborhood)].any())
        tags.append({(True, False): "D", (True, True): "M", (False, True): "F", (False, False): "I"}[(left, right)])
    return tags


def _zone_of_column(zone_bounds, col: int) -> int:
    best, best_dist = 0, None
    for i, (c0, c1) in enumerate(zone_bounds):
        if c0 <= col <= c1:
            return i
        dist = c0 - col if col < c0 else col - c1
        if best_dist is None or dist < best_dist:
            best, best_dist = i, dist
    return best


def _nearest_paw(paw_of_pixel, location, max_radius: int) -> int:
    """Word-part index of the mapped pixel nearest to location.

    Contour hits live on the expanded stage, so their pixel can sit in the
    halo up to the expansion radius away from the original ink; the search
    widens one Chebyshev ring at a time and is deterministic by raster order.
    """
    if location in paw_of_pixel:
        return paw_of_pixel[location]
    r0, c0 = location
    for radius in range(1, max_radius + 1):
        ring = sorted(
            (r0 + dr, c0 + dc)
            for dr in range(-radius, radius + 1)
            for dc in range(-radius, radius + 1)
            if max(abs(dr), abs(dc)) == radius
        )
        for candidate in ring:
            if candidate in paw_of_pixel:
                return paw_of_pixel[candidate]
    raise KeyError(f"no word part within {max_radius} of {location}")


_KIND_ORDER = {k: i for i, k in enumerate(FEATURE_KINDS)}


def extract_features(
    word: BinaryRaster,
    baselines: Baselines,
    thresholds: FeatureThresholds | None = None,
    dilation_radius: int = 1,
    neighborhood: int = 2,
) -> FeatureSet:
    """Run the full per-word pipeline and consolidate the results.

    The ink is expanded so every contour closes, and the contour-bound
    primitives (dots and loops) are read off that expanded stage. Poles,
    jambs, word parts, and letter-zone positions measure the word exactly
    as given: expansion exists to close contours, and letting it thicken
    the body would smear one extra body row into the upper zone, fusing
    separate ascenders. Radius 0 skips the expansion entirely.
    """
    if word.ink_count() == 0:
        raise NoInkError("cannot extract features from a blank image")
    t = thresholds if thresholds is not None else FeatureThresholds.from_baselines(baselines)

    stage = dilate(word, dilation_radius)
    chains = trace_contours(stage)

    p_hits, q_hits = detect_diacritics(chains, baselines, t)
    b_hits = detect_loops(chains, stage, baselines, t)
    dropped = sum(
        1
        for ch in chains
        if ch.polarity == "inner"
        and ch.length >= t.diacritic_max_contour
        and not (
            max(p[0] for p in ch.points) < baselines.upper_row
            or min(p[0] for p in ch.points) > baselines.lower_row
        )
    )
    h_hits = detect_poles(word, baselines, t)
    j_hits = detect_jambs(word, baselines, t)

    paws = segment_paws(word, baselines=baselines)
    paw_of_pixel = {}
    for paw in paws:
        for r, c in paw.pixels:
            paw_of_pixel[(int(r), int(c))] = paw.order_index

    zones = feature_zones(word)
    tags = detect_positions(word, baselines, zones, neighborhood)

    hits = []
    for hit in (*h_hits, *j_hits, *p_hits, *q_hits, *b_hits):
        zone_idx = _zone_of_column(zones, hit.location[1])
        hits.append(
            replace(
                hit,
                paw_index=_nearest_paw(paw_of_pixel, hit.location, dilation_radius),
                position=tags[zone_idx],
            )
        )
    hits.sort(key=lambda h: (_KIND_ORDER[h.kind], h.location))

    counts = {k: sum(1 for h in hits if h.kind == k) for k in FEATURE_KINDS}
    return FeatureSet(
        counts=counts,
        nb_paws=len(paws),
        hits=tuple(hits),
        dropped_oversize_loops=dropped,
    )


def combine_feature_sets(sets) -> FeatureSet:
    """Sum counts, word-part counts, and hit lists of several feature sets."""
    counts = {k: 0 for k in FEATURE_KINDS}
    nb_paws = 0
    hits: list[FeatureHit] = []
    dropped = 0
    for fs in sets:
        for k in FEATURE_KINDS:
            counts[k] += fs.counts[k]
        nb_paws += fs.nb_paws
        hits.extend(fs.hits)
        dropped += fs.dropped_oversize_loops
    return FeatureSet(counts=counts, nb_paws=nb_paws, hits=tuple(hits), dropped_oversize_loops=dropped)
