"""
Unit Tests for Component Geometry

Purpose:
    Angle derivation, transform composition/decomposition and layout
    validation.

Usage:
    pytest src/tests/unit/test_geometry.py -v
"""

import math

import numpy as np
import pytest

from facreg.core.geometry import (
    derive_angles,
    frame_axes,
    make_params,
    normal_from_angles,
    params_to_transform,
    transform_to_params,
    validate_layout,
)
from facreg.errors import InvalidNormal, InvalidSize, InvalidTransform
from facreg.models.layout import (
    Component,
    ComponentKind,
    GeomParams,
    IssueKind,
    Layout,
    Transform,
)


def _angle_gap(a, b):
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


# ============ Angle Tests ============

class TestDeriveAngles:
    """Tests for derive_angles"""

    def test_axis_normals(self):
        """Test lambda/theta of the horizontal axes"""
        assert derive_angles((1.0, 0.0, 0.0)) == (0.0, 0.0)
        lam, theta = derive_angles((0.0, 1.0, 0.0))
        assert lam == pytest.approx(math.pi / 2)
        assert theta == 0.0

    def test_diagonal_normal(self):
        """Test a normal at 45 degrees in both angles"""
        lam, theta = derive_angles((0.5, 0.5, math.sqrt(0.5)))
        assert lam == pytest.approx(math.pi / 4)
        assert theta == pytest.approx(math.pi / 4)

    def test_negative_x_is_plus_pi(self):
        """Test lambda is in (-pi, pi] for the -X normal"""
        lam, _ = derive_angles((-1.0, -0.0, 0.0))
        assert lam == pytest.approx(math.pi)
        assert lam > 0

    def test_pole_has_zero_lambda(self):
        """Test lambda = 0 convention at the poles"""
        assert derive_angles((0.0, 0.0, 1.0)) == (0.0, pytest.approx(math.pi / 2))
        assert derive_angles((0.0, 0.0, -1.0)) == (0.0, pytest.approx(-math.pi / 2))

    def test_zero_normal_rejected(self):
        """Test zero-length normal raises"""
        with pytest.raises(InvalidNormal):
            derive_angles((0.0, 0.0, 0.0))

    def test_non_finite_rejected(self):
        """Test nan entries raise"""
        with pytest.raises(InvalidNormal):
            derive_angles((float("nan"), 1.0, 0.0))

    def test_normal_from_angles_inverts(self):
        """Test normal_from_angles(derive_angles(n)) == n"""
        n = np.array([0.6, -0.48, 0.64])
        n = n / np.linalg.norm(n)
        np.testing.assert_allclose(normal_from_angles(*derive_angles(n)), n, atol=1e-12)


# ============ Transform Tests ============

class TestTransform:
    """Tests for params_to_transform / transform_to_params"""

    def test_canonical_component_is_identity(self):
        """Test the unit rectangle facing +Y maps to the identity"""
        t = params_to_transform(make_params((0, 0), 0, 1, 1, (0, 1, 0)))
        np.testing.assert_array_equal(t.m, np.eye(4))

    def test_scale_and_translation(self):
        """Test w scales the width axis and h the up axis"""
        t = params_to_transform(make_params((2.0, 3.0), 5.0, 1.2, 1.5, (0, 1, 0)))
        np.testing.assert_allclose(t.m[:3, 0], [1.2, 0, 0])
        np.testing.assert_allclose(t.m[:3, 1], [0, 1, 0])
        np.testing.assert_allclose(t.m[:3, 2], [0, 0, 1.5])
        np.testing.assert_allclose(t.m[:3, 3], [2.0, 3.0, 5.0])

    def test_rotation_about_z(self):
        """Test an +X normal composes a -90 degree turn with the size scale"""
        t = params_to_transform(make_params((0, 0), 0, 2.0, 3.0, (1, 0, 0)))
        rz = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        np.testing.assert_allclose(t.m[:3, :3], rz @ np.diag([2.0, 1.0, 3.0]), atol=1e-12)
        np.testing.assert_allclose(t.m[:3, 3], 0.0)

    def test_frame_axes_at_pole(self):
        """Test width axis is -Y for a vertical normal"""
        u, n, v = frame_axes((0.0, 0.0, 1.0))
        np.testing.assert_array_equal(u, [0.0, -1.0, 0.0])
        np.testing.assert_allclose(v, np.cross(u, n))

    def test_round_trip_random(self, rng):
        """Test decompose(compose(params)) == params within 1e-9"""
        for _ in range(1000):
            n = rng.normal(size=3)
            n = n / np.linalg.norm(n)
            params = make_params(
                rng.uniform(-50, 50, size=2),
                rng.uniform(-10, 40),
                rng.uniform(0.1, 5),
                rng.uniform(0.1, 5),
                n,
            )
            back = transform_to_params(params_to_transform(params))
            np.testing.assert_allclose(back.p, params.p, atol=1e-9)
            assert back.z == pytest.approx(params.z, abs=1e-9)
            assert back.w == pytest.approx(params.w, abs=1e-9)
            assert back.h == pytest.approx(params.h, abs=1e-9)
            np.testing.assert_allclose(back.n, params.n, atol=1e-9)
            assert _angle_gap(back.lam, params.lam) <= 1e-9
            assert back.theta == pytest.approx(params.theta, abs=1e-9)

    def test_invalid_size_rejected(self):
        """Test non-positive width raises"""
        params = make_params((0, 0), 0, 1, 1, (0, 1, 0)).with_values(w=0.0)
        with pytest.raises(InvalidSize):
            params_to_transform(params)

    def test_non_unit_normal_rejected(self):
        """Test non-unit normal raises"""
        params = make_params((0, 0), 0, 1, 1, (0, 2, 0))
        with pytest.raises(InvalidNormal):
            params_to_transform(params)

    def test_depth_scale_rejected(self):
        """Test a depth scale other than 1 does not decompose"""
        m = np.eye(4)
        m[1, 1] = 2.0
        with pytest.raises(InvalidTransform):
            transform_to_params(Transform(m))

    def test_roll_rejected(self):
        """Test a rotation about the normal does not decompose"""
        c, s = math.cos(0.3), math.sin(0.3)
        m = np.eye(4)
        m[0, 0], m[0, 2], m[2, 0], m[2, 2] = c, s, -s, c
        with pytest.raises(InvalidTransform):
            transform_to_params(Transform(m))

    def test_bad_last_row_rejected(self):
        """Test projective last row raises"""
        m = np.eye(4)
        m[3, 0] = 0.5
        with pytest.raises(InvalidTransform):
            transform_to_params(Transform(m))


# ============ Validation Tests ============

class TestValidateLayout:
    """Tests for validate_layout"""

    def test_valid_layout(self, window):
        """Test a well-formed layout has no issues"""
        assert validate_layout(Layout((window,))).ok

    def test_empty_layout(self):
        """Test an empty layout is reported"""
        report = validate_layout(Layout(()))
        assert report.of_kind(IssueKind.EMPTY_LAYOUT)

    def test_duplicate_id(self, window):
        """Test duplicate ids are reported"""
        report = validate_layout(Layout((window, window)))
        assert [i.component_id for i in report.of_kind(IssueKind.DUPLICATE_ID)] == ["w1"]

    def test_invalid_size(self, window):
        """Test negative height is located by field"""
        bad = window.with_params(window.params.with_values(h=-1.0))
        issues = validate_layout(Layout((bad,))).of_kind(IssueKind.INVALID_SIZE)
        assert issues[0].field == "h"

    def test_invalid_normal(self, window):
        """Test non-unit normal is reported"""
        bad = window.with_params(window.params.with_values(n=(0.0, -2.0, 0.0)))
        assert validate_layout(Layout((bad,))).of_kind(IssueKind.INVALID_NORMAL)

    def test_angle_inconsistency(self, window):
        """Test lambda that disagrees with n is reported"""
        bad = window.with_params(window.params.with_values(lam=0.5))
        issues = validate_layout(Layout((bad,))).of_kind(IssueKind.ANGLE_INCONSISTENCY)
        assert issues[0].field == "lambda"

    def test_report_serialization(self, window):
        """Test report to dict"""
        data = validate_layout(Layout((window, window))).to_dict()
        assert data["ok"] is False
        assert data["issues"][0]["kind"] == "DuplicateId"


@pytest.fixture
def rng():
    """Seeded numpy generator"""
    return np.random.default_rng(0)


@pytest.fixture
def window():
    """One window facing -Y"""
    return Component(
        id="w1",
        kind=ComponentKind.WINDOW,
        instance_ref="window_1.2x1.5",
        params=make_params((1.0, 0.0), 1.5, 1.2, 1.5, (0.0, -1.0, 0.0)),
    )
