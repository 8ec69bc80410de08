"""Chart evaluation, surface frames and the finite-difference validator."""

import numpy as np
import pytest

from shellvi import (
    CapabilityError,
    DomainError,
    GeometryError,
    eval_chart,
    frame_at,
    load_tabulated_chart,
    make_chart,
    validate_chart,
    write_tabulated_chart,
)
from shellvi.geometry import Rect, TabulatedChart

CYL_DOMAIN = (-0.5, 2.0, -1.0, 1.0)
SPH_DOMAIN = (-0.6, 0.6, -0.6, 0.6)


def fd_first(chart, y, h=1e-5):
    """Central-difference oracle for the tangents, realized-span denominator."""
    y1, y2 = y
    p = lambda a, b: eval_chart(chart, (a, b)).position
    d1 = (p(y1 + h, y2) - p(y1 - h, y2)) / ((y1 + h) - (y1 - h))
    d2 = (p(y1, y2 + h) - p(y1, y2 - h)) / ((y2 + h) - (y2 - h))
    return d1, d2


def fd_second(chart, y, h=1e-5):
    """Central differences of the closed-form tangent fields."""
    y1, y2 = y
    t = lambda k, a, b: eval_chart(chart, (a, b))[1 + k]
    s1 = (y1 + h) - (y1 - h)
    s2 = (y2 + h) - (y2 - h)
    d11 = (t(0, y1 + h, y2) - t(0, y1 - h, y2)) / s1
    d12 = (t(0, y1, y2 + h) - t(0, y1, y2 - h)) / s2
    d21 = (t(1, y1 + h, y2) - t(1, y1 - h, y2)) / s1
    d22 = (t(1, y1, y2 + h) - t(1, y1, y2 - h)) / s2
    return d11, d12, d21, d22


def fd_curvature(chart, y, h=1e-6):
    """Oracle for b_ab = a3 . d_b a_a from tangent differencing."""
    jet = eval_chart(chart, y)
    cross = np.cross(jet.d1, jet.d2)
    a3 = cross / np.linalg.norm(cross)
    b = np.zeros((2, 2))
    for a in range(2):
        for beta in range(2):
            e = np.array([1.0, 0.0]) if beta == 0 else np.array([0.0, 1.0])
            yp = (y[0] + h * e[0], y[1] + h * e[1])
            ym = (y[0] - h * e[0], y[1] - h * e[1])
            d = (eval_chart(chart, yp)[1 + a] - eval_chart(chart, ym)[1 + a]) / (2 * h)
            b[a, beta] = a3 @ d
    return b


class TestEvalChart:
    def test_plane_affine(self):
        jet = eval_chart(make_chart("plane"), (0.3, 0.7))
        assert np.allclose(jet.position, [0.3, 0.7, 0.0])
        assert np.array_equal(jet.d1, [1.0, 0.0, 0.0])
        assert np.array_equal(jet.d2, [0.0, 1.0, 0.0])
        for second in (jet.d11, jet.d12, jet.d22):
            assert np.array_equal(second, np.zeros(3))

    def test_unit_cylinder_closed_form(self):
        chart = make_chart("cylinder", {"radius": 1.0}, CYL_DOMAIN)
        jet = eval_chart(chart, (0.0, 0.0))
        assert np.allclose(jet.d1, [0.0, 1.0, 0.0], atol=1e-14)
        assert np.allclose(jet.d2, [0.0, 0.0, 1.0], atol=1e-14)
        assert np.allclose(jet.d11, [-1.0, 0.0, 0.0], atol=1e-14)
        assert np.allclose(jet.d12, 0.0, atol=1e-14)
        assert np.allclose(jet.d22, 0.0, atol=1e-14)

    def test_sphere_graph_closed_form(self):
        chart = make_chart("sphere_graph", {"radius": 2.0}, SPH_DOMAIN)
        jet = eval_chart(chart, (0.0, 0.0))
        assert np.allclose(jet.d1, [1.0, 0.0, 0.0], atol=1e-14)
        assert np.allclose(jet.d2, [0.0, 1.0, 0.0], atol=1e-14)
        assert np.allclose(jet.d11, [0.0, 0.0, -0.5], atol=1e-14)
        assert np.allclose(jet.d22, [0.0, 0.0, -0.5], atol=1e-14)
        assert np.allclose(jet.d12, 0.0, atol=1e-14)

    @pytest.mark.parametrize(
        "kind,params,domain,y",
        [
            ("cylinder", {"radius": 1.0}, CYL_DOMAIN, (0.4, 0.2)),
            ("sphere_graph", {"radius": 2.0}, SPH_DOMAIN, (0.25, -0.31)),
            ("paraboloid", {"c1": 0.8, "c2": 1.3}, None, (0.4, 0.6)),
        ],
    )
    def test_closed_form_matches_fd(self, kind, params, domain, y):
        chart = make_chart(kind, params, domain)
        jet = eval_chart(chart, y)
        d1, d2 = fd_first(chart, y)
        assert np.max(np.abs(d1 - jet.d1)) <= 1e-8
        assert np.max(np.abs(d2 - jet.d2)) <= 1e-8
        d11, d12, d21, d22 = fd_second(chart, y)
        assert np.max(np.abs(d11 - jet.d11)) <= 1e-8
        assert np.max(np.abs(d12 - jet.d12)) <= 1e-8
        assert np.max(np.abs(d21 - jet.d12)) <= 1e-8
        assert np.max(np.abs(d22 - jet.d22)) <= 1e-8

    def test_outside_domain_rejected(self):
        chart = make_chart("plane")
        with pytest.raises(DomainError):
            eval_chart(chart, (1.5, 0.5))

    def test_outside_sphere_support_rejected(self):
        chart = make_chart("sphere_graph", {"radius": 0.6}, (-0.5, 0.5, -0.5, 0.5))
        with pytest.raises(DomainError):
            eval_chart(chart, (0.5, 0.5))


class TestFrameAt:
    def test_plane_is_flat(self):
        frame = frame_at(make_chart("plane"), (0.37, 0.52))
        assert np.max(np.abs(frame.b_cov)) <= 1e-14
        assert np.max(np.abs(frame.christoffel)) <= 1e-14
        assert np.max(np.abs(frame.b_covdev)) <= 1e-14
        assert frame.sqrt_a == pytest.approx(1.0, abs=1e-14)

    def test_unit_cylinder_frame(self):
        chart = make_chart("cylinder", {"radius": 1.0}, CYL_DOMAIN)
        frame = frame_at(chart, (0.0, 0.0))
        assert np.allclose(frame.a_cov, np.eye(2), atol=1e-12)
        assert np.allclose(frame.b_cov, [[-1.0, 0.0], [0.0, 0.0]], atol=1e-12)
        assert np.max(np.abs(frame.christoffel)) <= 1e-12
        # oracle cross-check of the curvature entries
        assert np.max(np.abs(fd_curvature(chart, (0.0, 0.0)) - frame.b_cov)) <= 1e-9

    def test_sphere_graph_frame(self):
        chart = make_chart("sphere_graph", {"radius": 2.0}, SPH_DOMAIN)
        frame = frame_at(chart, (0.0, 0.0))
        assert np.allclose(frame.a_cov, np.eye(2), atol=1e-12)
        assert np.allclose(frame.b_cov, -0.5 * np.eye(2), atol=1e-12)
        assert np.max(np.abs(fd_curvature(chart, (0.0, 0.0)) - frame.b_cov)) <= 1e-9

    def test_mixed_curvature_is_metric_contraction(self):
        chart = make_chart("sphere_graph", {"radius": 2.0}, SPH_DOMAIN)
        frame = frame_at(chart, (0.21, -0.34))
        assert np.allclose(frame.b_mix, frame.a_con @ frame.b_cov, atol=1e-14)

    def test_degenerate_tangents_rejected(self):
        grid = np.linspace(0.0, 1.0, 4)
        theta = np.zeros((4, 4, 3))
        same = np.zeros((4, 4, 3))
        same[:, :, 0] = 1.0  # d1 parallel to d2
        fields = {
            "theta": theta,
            "d1": same,
            "d2": same,
            "d11": np.zeros((4, 4, 3)),
            "d12": np.zeros((4, 4, 3)),
            "d22": np.zeros((4, 4, 3)),
        }
        chart = TabulatedChart(grid, grid, fields)
        with pytest.raises(GeometryError):
            frame_at(chart, (0.5, 0.5))


PRESETS = [
    ("plane", None, None),
    ("cylinder", {"radius": 1.0}, CYL_DOMAIN),
    ("sphere_graph", {"radius": 2.0}, SPH_DOMAIN),
    ("paraboloid", {"c1": 0.8, "c2": 1.3}, None),
]


class TestFrameInvariants:
    @pytest.mark.parametrize("kind,params,domain", PRESETS)
    def test_metric_normal_identities(self, kind, params, domain):
        chart = make_chart(kind, params, domain)
        rect = chart.domain
        for y1 in np.linspace(rect.y1_min + 0.01, rect.y1_max - 0.01, 5):
            for y2 in np.linspace(rect.y2_min + 0.01, rect.y2_max - 0.01, 5):
                frame = frame_at(chart, (y1, y2))
                assert np.max(np.abs(frame.a_cov @ frame.a_con - np.eye(2))) <= 1e-12
                assert abs(np.linalg.norm(frame.a3) - 1.0) <= 1e-12
                assert abs(frame.a3 @ frame.a1) <= 1e-12
                assert abs(frame.a3 @ frame.a2) <= 1e-12
                assert np.max(np.abs(frame.b_cov - frame.b_cov.T)) <= 1e-14
                assert np.max(
                    np.abs(frame.christoffel - frame.christoffel.transpose(0, 2, 1))
                ) <= 1e-14
                assert frame.sqrt_a > 0.0

    @pytest.mark.parametrize("kind,params,domain", PRESETS[:3])
    def test_curvature_integration_by_parts(self, kind, params, domain):
        # b_ab from a3 . d_b a_a must equal -(d_b a3) . a_a
        chart = make_chart(kind, params, domain)
        rect = chart.domain
        h = 1e-5
        for y1 in np.linspace(rect.y1_min + 0.05, rect.y1_max - 0.05, 4):
            for y2 in np.linspace(rect.y2_min + 0.05, rect.y2_max - 0.05, 4):
                frame = frame_at(chart, (y1, y2))

                def normal(a, b):
                    jet = eval_chart(chart, (a, b))
                    cross = np.cross(jet.d1, jet.d2)
                    return cross / np.linalg.norm(cross)

                dn1 = (normal(y1 + h, y2) - normal(y1 - h, y2)) / (2 * h)
                dn2 = (normal(y1, y2 + h) - normal(y1, y2 - h)) / (2 * h)
                tangents = (frame.a1, frame.a2)
                for a in range(2):
                    assert abs(-(dn1 @ tangents[a]) - frame.b_cov[a, 0]) <= 1e-10
                    assert abs(-(dn2 @ tangents[a]) - frame.b_cov[a, 1]) <= 1e-10

    @pytest.mark.parametrize("kind,params,domain", PRESETS)
    def test_codazzi_symmetry(self, kind, params, domain):
        chart = make_chart(kind, params, domain)
        rect = chart.domain
        for y1 in np.linspace(rect.y1_min + 0.05, rect.y1_max - 0.05, 4):
            for y2 in np.linspace(rect.y2_min + 0.05, rect.y2_max - 0.05, 4):
                frame = frame_at(chart, (y1, y2))
                asym = np.max(np.abs(frame.b_covdev - frame.b_covdev.transpose(0, 2, 1)))
                assert asym <= 1e-6


class TestValidateChart:
    def test_plane_exact(self):
        report = validate_chart(make_chart("plane"), samples=10)
        assert report.max_first_deriv_error == 0.0
        assert report.max_second_deriv_error == 0.0
        assert report.ok

    def test_cylinder_truncation_bound(self):
        chart = make_chart("cylinder", {"radius": 1.0}, CYL_DOMAIN)
        report = validate_chart(chart, samples=10, step=1e-5)
        assert report.max_first_deriv_error <= 1e-8
        assert report.max_second_deriv_error <= 1e-8
        assert report.ok

    def test_corrupted_tabulated_chart_flagged(self, tmp_path):
        chart = make_chart("cylinder", {"radius": 1.0}, CYL_DOMAIN)
        path = tmp_path / "cyl.dat"
        write_tabulated_chart(path, chart, 25, 25)
        lines = path.read_text().splitlines()
        # corrupt one d11 entry (column 11) in an interior row
        row = lines[300].split()
        row[11] = repr(float(row[11]) + 0.5)
        lines[300] = " ".join(row)
        path.write_text("\n".join(lines) + "\n")
        tab = load_tabulated_chart(path)
        report = validate_chart(tab, samples=12, tol=1e-3)
        assert not report.ok
        assert report.max_second_deriv_error > 1e-3


class TestTabulatedChart:
    def test_round_trip_matches_preset(self, tmp_path):
        chart = make_chart("cylinder", {"radius": 1.0}, CYL_DOMAIN)
        path = tmp_path / "cyl.dat"
        write_tabulated_chart(path, chart, 40, 40)
        tab = load_tabulated_chart(path)
        assert tab.has_second_derivatives
        for y in ((0.2, 0.1), (1.3, -0.4), (0.77, 0.66)):
            ref = eval_chart(chart, y)
            got = eval_chart(tab, y)
            for a, b in zip(ref, got):
                assert np.max(np.abs(a - b)) <= 1e-5
        report = validate_chart(tab, samples=8, tol=1e-3)
        assert report.ok

    def test_grid_points_reproduced_exactly(self, tmp_path):
        chart = make_chart("sphere_graph", {"radius": 2.0}, SPH_DOMAIN)
        path = tmp_path / "sph.dat"
        write_tabulated_chart(path, chart, 12, 12)
        tab = load_tabulated_chart(path)
        y = (SPH_DOMAIN[0] + (SPH_DOMAIN[1] - SPH_DOMAIN[0]) * 3 / 11, SPH_DOMAIN[2])
        ref = eval_chart(chart, y)
        got = eval_chart(tab, y)
        assert np.max(np.abs(ref.position - got.position)) <= 1e-12

    def test_first_order_file_lacks_curvature(self, tmp_path):
        chart = make_chart("plane")
        path = tmp_path / "plane.dat"
        write_tabulated_chart(path, chart, 6, 6, include_second=False)
        tab = load_tabulated_chart(path)
        assert not tab.has_second_derivatives
        with pytest.raises(CapabilityError):
            eval_chart(tab, (0.5, 0.5))

    def test_malformed_rows_rejected(self, tmp_path):
        path = tmp_path / "bad.dat"
        path.write_text("2 2 0 1 0 1\n0 0 1 2 3\n")
        with pytest.raises(ValueError):
            load_tabulated_chart(path)


class TestRect:
    def test_contains_and_clamp(self):
        rect = Rect(0.0, 2.0, -1.0, 1.0)
        assert rect.contains(1.0, 0.0)
        assert not rect.contains(2.5, 0.0)
        assert rect.clamp(2.5, -3.0) == (2.0, -1.0)
        assert rect.diameter == pytest.approx(np.hypot(2.0, 2.0))
