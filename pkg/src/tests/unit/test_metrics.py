"""
Unit Tests for Layout Metrics

Usage:
    pytest src/tests/unit/test_metrics.py -v
"""

import math

import pytest

from facreg.core.geometry import make_params
from facreg.errors import UnmatchedComponent
from facreg.evaluation.metrics import (
    category_stats,
    clip_polygon,
    component_rect,
    f_measure,
    polygon_area,
    prf,
    rect_intersection_area,
)
from facreg.models.layout import Component, ComponentKind, Layout


def window(ident, p, z, w=1.0, h=1.0, n=(0.0, -1.0, 0.0)):
    return Component(ident, ComponentKind.WINDOW, "window", make_params(p, z, w, h, n))


# ============ Polygon Tests ============

class TestPolygons:
    """Tests for clipping and area"""

    def test_shoelace(self):
        """Test area of a 2 x 3 rectangle"""
        assert polygon_area([(0, 0), (2, 0), (2, 3), (0, 3)]) == 6.0

    def test_degenerate(self):
        """Test fewer than three points have no area"""
        assert polygon_area([(0, 0), (1, 1)]) == 0.0

    def test_clip_overlapping_squares(self):
        """Test two unit squares offset by half a side"""
        square = [(0, 0), (1, 0), (1, 1), (0, 1)]
        shifted = [(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)]
        assert polygon_area(clip_polygon(shifted, square)) == pytest.approx(0.25)

    def test_clip_disjoint(self):
        """Test disjoint polygons clip to nothing"""
        square = [(0, 0), (1, 0), (1, 1), (0, 1)]
        far = [(5, 5), (6, 5), (6, 6), (5, 6)]
        assert polygon_area(clip_polygon(far, square)) == 0.0


# ============ Rectangle Tests ============

class TestRectIntersection:
    """Tests for rect_intersection_area"""

    def test_identical(self):
        """Test a rectangle overlaps itself fully"""
        r = component_rect(window("a", (0, 0), 0, w=1.2, h=1.5))
        assert rect_intersection_area(r, r) == pytest.approx(1.8)

    def test_half_width_shift(self):
        """Test a shift of half the width halves the overlap"""
        a = component_rect(window("a", (0.5, 0.0), 0.0))
        b = component_rect(window("b", (0.0, 0.0), 0.0))
        assert rect_intersection_area(a, b) == pytest.approx(0.5)

    def test_diagonal_shift(self):
        """Test unit squares shifted a quarter along both in-plane axes"""
        a = component_rect(window("a", (0.25, 0.0), 0.25))
        b = component_rect(window("b", (0.0, 0.0), 0.0))
        assert rect_intersection_area(a, b) == pytest.approx(0.5625)

    def test_perpendicular(self):
        """Test normals more than 60 degrees apart do not overlap"""
        a = component_rect(window("a", (0, 0), 0, n=(0.0, -1.0, 0.0)))
        b = component_rect(window("b", (0, 0), 0, n=(1.0, 0.0, 0.0)))
        assert rect_intersection_area(a, b) == 0.0

    def test_small_tilt(self):
        """Test a slightly tilted copy still overlaps almost fully"""
        tilt = 0.05
        a = component_rect(window("a", (0, 0), 0, n=(math.sin(tilt), -math.cos(tilt), 0.0)))
        b = component_rect(window("b", (0, 0), 0))
        assert rect_intersection_area(a, b) == pytest.approx(math.cos(tilt), rel=1e-9)

    def test_base_elevation(self):
        """Test rectangles sit at base_elevation + z"""
        r = component_rect(window("a", (0, 0), 2.0), base_elevation=10.0)
        assert r.center[2] == 12.0


# ============ P/R/F Tests ============

class TestPrf:
    """Tests for prf"""

    def test_identity(self, truth):
        """Test a layout scored against itself"""
        report = prf(truth, truth)
        assert report.precision == pytest.approx(1.0)
        assert report.recall == pytest.approx(1.0)
        assert report.f_score == pytest.approx(1.0)

    def test_shifted(self, truth):
        """Test half-width shifts give P = R = F = 0.5"""
        shifted = truth.with_components(
            [
                c.with_params(c.params.with_values(p=(c.params.p[0] + 0.5, c.params.p[1])))
                for c in truth.components
            ]
        )
        report = prf(shifted, truth)
        assert report.precision == pytest.approx(0.5)
        assert report.recall == pytest.approx(0.5)
        assert report.f_score == pytest.approx(0.5)

    def test_unmatched(self, truth):
        """Test extra ids count as zero overlap and are listed"""
        extra = truth.with_components(list(truth.components) + [window("x", (9, 0), 0)])
        report = prf(extra, truth)
        assert report.unmatched == ["x"]
        assert report.precision == pytest.approx(2.0 / 3.0)
        assert report.recall == pytest.approx(1.0)

    def test_unmatched_strict(self, truth):
        """Test strict mode raises on extra ids"""
        extra = truth.with_components([window("x", (9, 0), 0)])
        with pytest.raises(UnmatchedComponent):
            prf(extra, truth, strict=True)

    def test_missing_truth_lowers_recall(self, truth):
        """Test truth components without a counterpart count in recall"""
        partial = truth.with_components([truth.components[0]])
        report = prf(partial, truth)
        assert report.precision == pytest.approx(1.0)
        assert report.recall == pytest.approx(0.5)

    def test_different_base_elevation(self, truth):
        """Test layouts are compared at absolute elevation"""
        raised = Layout(truth.components, truth.building_id, base_elevation=5.0)
        assert prf(raised, truth).f_score == 0.0

    def test_to_dict(self, truth):
        """Test report serialization"""
        data = prf(truth, truth).to_dict()
        assert [o["id"] for o in data["per_component_overlap"]] == ["a", "b"]

    def test_f_measure_zero(self):
        """Test F is 0 when P and R are 0"""
        assert f_measure(0.0, 0.0) == 0.0


class TestCategoryStats:
    """Tests for category_stats"""

    def test_counts(self, truth):
        """Test two windows side by side"""
        assert category_stats(truth) == (1, 1, 1, 1, 1)


@pytest.fixture
def truth():
    """Two unit windows facing -Y, 3 m apart"""
    return Layout((window("a", (0.0, 0.0), 1.0), window("b", (3.0, 0.0), 1.0)), "truth")
