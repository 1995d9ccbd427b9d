import numpy as np
import pytest

from scriptid.features import (
    FeatureThresholds,
    detect_diacritics,
    detect_jambs,
    detect_loops,
    detect_poles,
    detect_positions,
    extract_features,
    feature_zones,
)
from scriptid.geometry import trace_contours
from scriptid.layout import Baselines, NoInkError
from scriptid.raster import BinaryRaster


def paint(canvas, r0, r1, c0, c1, value=True):
    """Fill rows r0..r1 and cols c0..c1 inclusive."""
    canvas[r0 : r1 + 1, c0 : c1 + 1] = value


def word(height, width):
    return np.zeros((height, width), dtype=bool)


# Band of height 8 spanning rows 24..32: pole margin 16, jamb margin 8.
B8 = Baselines(24, 32)
T8 = FeatureThresholds.from_baselines(B8)


class TestPoles:
    def test_tall_stroke_is_pole(self):
        img = word(56, 30)
        paint(img, 24, 32, 4, 25)          # body
        paint(img, 24 - 20, 23, 8, 10)     # rises 2.5x the band height
        hits = detect_poles(BinaryRaster(img), B8, T8)
        assert [h.kind for h in hits] == ["H"]
        assert hits[0].location == (4, 8)

    def test_band_height_stroke_is_not_pole(self):
        img = word(56, 30)
        paint(img, 24, 32, 4, 25)
        paint(img, 24 - 8, 23, 8, 10)      # rises exactly 1.0x the band height
        assert detect_poles(BinaryRaster(img), B8, T8) == []

    def test_margin_is_strict(self):
        for height, expect in [(17, 1), (16, 0)]:
            img = word(56, 30)
            paint(img, 24, 32, 4, 25)
            paint(img, 24 - height, 23, 8, 10)
            assert len(detect_poles(BinaryRaster(img), B8, T8)) == expect

    def test_two_separated_strokes_give_two_poles(self):
        img = word(56, 40)
        paint(img, 24, 32, 4, 35)
        paint(img, 4, 23, 8, 10)
        paint(img, 4, 23, 20, 22)
        assert len(detect_poles(BinaryRaster(img), B8, T8)) == 2

    def test_detached_dot_is_not_a_pole(self):
        img = word(56, 30)
        paint(img, 24, 32, 4, 25)
        # 4x4 dot high above a shallow band would clear a small margin
        shallow = Baselines(24, 26)
        t = FeatureThresholds.from_baselines(shallow)
        paint(img, 10, 13, 8, 11)
        assert detect_poles(BinaryRaster(img), shallow, t) == []


class TestJambs:
    def test_deep_tail_is_jamb(self):
        img = word(56, 30)
        paint(img, 24, 32, 4, 25)
        paint(img, 33, 32 + 12, 8, 10)     # drops 1.5x the band height
        hits = detect_jambs(BinaryRaster(img), B8, T8)
        assert [h.kind for h in hits] == ["J"]
        assert hits[0].location == (44, 8)

    def test_half_band_descender_is_not_jamb(self):
        img = word(56, 30)
        paint(img, 24, 32, 4, 25)
        paint(img, 33, 32 + 4, 8, 10)
        assert detect_jambs(BinaryRaster(img), B8, T8) == []

    def test_margin_is_strict(self):
        for depth, expect in [(9, 1), (8, 0)]:
            img = word(56, 30)
            paint(img, 24, 32, 4, 25)
            paint(img, 33, 32 + depth, 8, 10)
            assert len(detect_jambs(BinaryRaster(img), B8, T8)) == expect

    def test_two_tails_on_one_part(self):
        img = word(56, 40)
        paint(img, 24, 32, 4, 35)
        paint(img, 33, 44, 8, 10)
        paint(img, 33, 44, 20, 22)
        assert len(detect_jambs(BinaryRaster(img), B8, T8)) == 2


class TestDiacritics:
    def run(self, img):
        chains = trace_contours(BinaryRaster(img))
        return detect_diacritics(chains, B8, T8)

    def test_small_closed_chain_above_is_p(self):
        img = word(56, 30)
        paint(img, 24, 32, 4, 25)
        paint(img, 10, 15, 8, 13)  # 6x6 solid: boundary walk has 20 points
        p, q = self.run(img)
        assert len(p) == 1 and q == []

    def test_eighty_point_chain_is_too_long(self):
        img = word(80, 80)
        paint(img, 60, 68, 4, 75)
        paint(img, 10, 30, 8, 28)  # 21x21 solid: boundary walk has 80 points
        b = Baselines(60, 68)
        chains = trace_contours(BinaryRaster(img))
        p, q = detect_diacritics(chains, b, FeatureThresholds.from_baselines(b))
        assert p == [] and q == []

    def test_exact_cap_is_excluded(self):
        # 16x16 solid yields exactly 60 boundary points; 15x16 yields 58
        for side_r, expect in [(16, 0), (15, 1)]:
            img = word(80, 80)
            paint(img, 60, 68, 4, 75)
            paint(img, 10, 10 + side_r - 1, 8, 23)
            b = Baselines(60, 68)
            chains = trace_contours(BinaryRaster(img))
            p, _ = detect_diacritics(chains, b, FeatureThresholds.from_baselines(b))
            assert len(p) == expect

    def test_chain_straddling_upper_baseline_is_not_a_dot(self):
        img = word(56, 30)
        paint(img, 20, 27, 8, 13)  # crosses row 24
        p, q = self.run(img)
        assert p == [] and q == []

    def test_small_closed_chain_below_is_q(self):
        img = word(56, 30)
        paint(img, 24, 32, 4, 25)
        paint(img, 40, 45, 8, 13)
        p, q = self.run(img)
        assert p == [] and len(q) == 1


class TestLoops:
    def test_solid_square_has_no_loop(self):
        img = word(56, 30)
        paint(img, 24, 32, 8, 16)
        raster = BinaryRaster(img)
        hits = detect_loops(trace_contours(raster), raster, B8, T8)
        assert hits == []

    def test_ring_in_band_is_loop(self):
        img = word(56, 30)
        paint(img, 24, 32, 8, 16)
        paint(img, 26, 30, 10, 14, value=False)  # carve a 5x5 hole
        raster = BinaryRaster(img)
        hits = detect_loops(trace_contours(raster), raster, B8, T8)
        assert [h.kind for h in hits] == ["B"]

    def test_ring_above_band_is_dot_not_loop(self):
        img = word(56, 30)
        paint(img, 24, 32, 4, 25)
        paint(img, 8, 15, 10, 17)
        paint(img, 9, 14, 11, 16, value=False)  # hollow square above the band
        raster = BinaryRaster(img)
        chains = trace_contours(raster)
        assert detect_loops(chains, raster, B8, T8) == []
        p, q = detect_diacritics(chains, B8, T8)
        assert len(p) == 1 and q == []

    def test_oversize_hole_is_dropped_but_tallied(self):
        img = word(80, 40)
        paint(img, 20, 38, 10, 28)
        paint(img, 21, 37, 11, 27, value=False)  # 17x17 hole: 64-point boundary
        b = Baselines(24, 32)
        raster = BinaryRaster(img)
        t = FeatureThresholds.from_baselines(b)
        assert detect_loops(trace_contours(raster), raster, b, t) == []
        fs = extract_features(raster, b, thresholds=t, dilation_radius=0)
        assert fs.counts["B"] == 0
        assert fs.dropped_oversize_loops == 1


class TestPositions:
    def test_isolated_block(self):
        img = word(40, 30)
        paint(img, 24, 32, 10, 20)
        raster = BinaryRaster(img)
        zones = feature_zones(raster)
        assert detect_positions(raster, B8, zones) == ["I"]

    def test_connected_run_tags_f_m_d(self):
        # three thick letters joined by thin connectors, read right to left
        img = word(24, 41)
        b = Baselines(14, 18)
        for c in (4, 18, 32):
            paint(img, 14, 18, c, c + 4)
        for c in (9, 23):
            paint(img, 18, 18, c, c + 8)
        raster = BinaryRaster(img)
        zones = feature_zones(raster)
        tags = detect_positions(raster, b, zones)
        assert tags[0] == "F" and tags[-1] == "D"
        assert "M" in tags
        assert set(tags) == {"F", "M", "D"}


def build_fig_word():
    """Four word parts encoding the canonical position pattern.

    Left to right on the canvas (right to left in reading order):
    part 3: ring+dot letter then dot letter -> P@F, B@F, P@D
    part 2: lone letter with an ascender -> H@I
    part 1: ring+ascender letter, ascender letter, ascender letter
            -> H@F, B@F, H@M, H@D
    part 0: lone letter with an ascender -> H@I
    """
    img = word(24, 104)
    b = Baselines(14, 18)

    def letter(c):
        paint(img, 14, 18, c, c + 6)

    def connector(c):
        paint(img, 18, 18, c, c + 2)

    def ascender(c):
        paint(img, 4, 13, c, c + 2)

    def dot(c):
        paint(img, 9, 11, c, c + 2)

    def hole(c):
        paint(img, 15, 17, c + 2, c + 4, value=False)

    x = 4
    letter(x); hole(x); dot(x)          # part 3, left letter: B@F, P@F
    connector(x + 7)
    letter(x + 10); dot(x + 10)         # part 3, right letter: P@D
    x += 23  # 17 wide + 6 gap
    letter(x); ascender(x)              # part 2: H@I
    x += 13
    letter(x); hole(x); ascender(x)     # part 1, left letter: B@F, H@F
    connector(x + 7)
    letter(x + 10); ascender(x + 10)    # part 1, middle letter: H@M
    connector(x + 17)
    letter(x + 20); ascender(x + 20)    # part 1, right letter: H@D
    x += 33
    letter(x); ascender(x)              # part 0: H@I
    return BinaryRaster(img), b


class TestFigurePattern:
    def test_position_tokens_per_part(self):
        raster, b = build_fig_word()
        fs = extract_features(raster, b, dilation_radius=0)
        by_paw = {}
        for hit in fs.hits:
            by_paw.setdefault(hit.paw_index, set()).add((hit.kind, hit.position))
        assert fs.nb_paws == 4
        assert by_paw[0] == {("H", "I")}
        assert by_paw[1] == {("H", "D"), ("H", "M"), ("H", "F"), ("B", "F")}
        assert by_paw[2] == {("H", "I")}
        assert by_paw[3] == {("P", "D"), ("P", "F"), ("B", "F")}


def build_kitchen_sink():
    """One part firing every rule exactly once or twice, by construction."""
    img = word(56, 60)
    paint(img, 24, 32, 4, 55)            # body
    paint(img, 4, 23, 6, 8)              # pole 1: height 20 > 16
    paint(img, 4, 23, 14, 16)            # pole 2
    paint(img, 33, 44, 22, 24)           # jamb: depth 12 > 8
    paint(img, 13, 16, 30, 33)           # upper dot
    paint(img, 40, 43, 38, 41)           # lower dot, depth 11 would fake a jamb
    paint(img, 26, 30, 46, 50, value=False)  # loop hole
    return BinaryRaster(img)


class TestExtractFeatures:
    def test_blank_image_raises(self):
        with pytest.raises(NoInkError):
            extract_features(BinaryRaster.blank(10, 10), B8)

    def test_single_ring_in_band(self):
        img = word(56, 30)
        paint(img, 24, 32, 8, 16)
        paint(img, 26, 30, 10, 14, value=False)
        fs = extract_features(BinaryRaster(img), B8, dilation_radius=0)
        assert fs.counts == {"H": 0, "J": 0, "P": 0, "Q": 0, "B": 1}
        assert fs.nb_paws == 1

    @pytest.mark.parametrize("radius", [0, 1])
    def test_kitchen_sink_counts(self, radius):
        fs = extract_features(build_kitchen_sink(), B8, dilation_radius=radius)
        assert fs.counts == {"H": 2, "J": 1, "P": 1, "Q": 1, "B": 1}
        assert fs.nb_paws == 1

    def test_counts_match_hits(self):
        fs = extract_features(build_kitchen_sink(), B8)
        for kind, count in fs.counts.items():
            assert count == sum(1 for h in fs.hits if h.kind == kind)

    def test_one_chain_one_kind(self):
        # the lower dot must be Q only, never also J; the hole B only
        fs = extract_features(build_kitchen_sink(), B8, dilation_radius=0)
        assert fs.counts["J"] == 1
        assert fs.counts["Q"] == 1

    def test_raising_cap_never_loses_dots(self):
        raster = build_kitchen_sink()
        low = FeatureThresholds(16, 8, diacritic_max_contour=10)
        high = FeatureThresholds(16, 8, diacritic_max_contour=120)
        fs_low = extract_features(raster, B8, thresholds=low, dilation_radius=0)
        fs_high = extract_features(raster, B8, thresholds=high, dilation_radius=0)
        assert (
            fs_high.counts["P"] + fs_high.counts["Q"]
            >= fs_low.counts["P"] + fs_low.counts["Q"]
        )

    def test_raising_pole_margin_never_adds_poles(self):
        raster = build_kitchen_sink()
        t_low = FeatureThresholds(10, 8)
        t_high = FeatureThresholds(30, 8)
        fs_low = extract_features(raster, B8, thresholds=t_low, dilation_radius=0)
        fs_high = extract_features(raster, B8, thresholds=t_high, dilation_radius=0)
        assert fs_high.counts["H"] <= fs_low.counts["H"]

    def test_hit_zone_constraints(self):
        fs = extract_features(build_kitchen_sink(), B8, dilation_radius=0)
        for hit in fs.hits:
            r = hit.location[0]
            if hit.kind == "P":
                assert r < B8.upper_row
            elif hit.kind == "Q":
                assert r > B8.lower_row
            elif hit.kind == "B":
                assert B8.upper_row <= r <= B8.lower_row
