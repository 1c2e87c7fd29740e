"""Tests for the shell validity measures and the acceptance rule.

Cluster density and relative shell thickness are checked against literal
one-line evaluations of their defining formulas, computed independently in
this file.
"""

import dataclasses

import numpy as np
import pytest

from mammocad.errors import DegenerateFitError
from mammocad.shell_clustering import (FcsConfig, ShellFit, ShellPrototype,
                                       fit_shell)
from mammocad.validity import (Detection, ValidityConfig, classify,
                               cluster_density, reclassify,
                               relative_shell_thickness)

PITCH = 0.0435


def circle(n, r=5.0, cx=0.0, cy=0.0):
    ang = np.arange(n) * (2.0 * np.pi / n)
    return np.column_stack([cx + r * np.cos(ang), cy + r * np.sin(ang)])


def manual_fit(points, center, radius, memberships):
    """ShellFit assembled by hand so the measures can be probed directly."""
    pts = np.asarray(points, dtype=np.float64)
    u = np.asarray(memberships, dtype=np.float64)
    return ShellFit(ShellPrototype(center, radius), u, 0.0, 1, True, pts)


class TestClusterDensity:
    def test_full_circle_matches_count_over_circumference(self):
        fit = manual_fit(circle(40), (0, 0), 5.0, np.ones(40))
        expected = 40 / (2.0 * np.pi * 5.0)  # ~1.273
        assert cluster_density(fit) == pytest.approx(expected, rel=1e-12)

    def test_memberships_at_or_below_cutoff_do_not_count(self):
        fit = manual_fit(circle(10), (0, 0), 5.0, np.full(10, 0.5))
        assert cluster_density(fit) == 0.0

    def test_sparse_circle_fails_the_default_gate(self):
        fit = manual_fit(circle(30), (0, 0), 5.0, np.ones(30))
        cd = cluster_density(fit)
        assert cd == pytest.approx(30 / (10 * np.pi), rel=1e-12)
        assert cd < 1.15

    def test_matches_literal_formula_on_mixed_memberships(self):
        g = np.random.default_rng(0)
        u = g.uniform(0, 1, 25)
        fit = manual_fit(circle(25), (0, 0), 5.0, u)
        literal = u[u > 0.5].sum() / (2.0 * np.pi * 5.0)
        assert cluster_density(fit) == pytest.approx(literal, rel=1e-12)


class TestRelativeShellThickness:
    def test_zero_for_points_exactly_on_the_shell(self):
        fit = manual_fit(circle(20), (0, 0), 5.0, np.ones(20))
        assert relative_shell_thickness(fit) == pytest.approx(0.0, abs=1e-28)

    def test_constant_offset_gives_squared_offset_over_radius(self):
        # all points at shell distance d with equal weight: RST = d^2 / r
        r, d = 5.0, 1.5
        fit = manual_fit(circle(24, r=r + d), (0, 0), r, np.full(24, 0.7))
        assert relative_shell_thickness(fit) == pytest.approx(d * d / r,
                                                              rel=1e-12)

    def test_matches_literal_formula(self):
        g = np.random.default_rng(1)
        pts = g.uniform(-10, 10, (30, 2))
        u = g.uniform(0.01, 1, 30)
        fit = manual_fit(pts, (1.0, -2.0), 4.0, u)
        cfg = FcsConfig(m=2.0)
        dd = np.abs(np.hypot(pts[:, 0] - 1.0, pts[:, 1] + 2.0) - 4.0)
        literal = (u**2 * dd**2).sum() / (4.0 * (u**2).sum())
        assert relative_shell_thickness(fit, cfg) == pytest.approx(literal,
                                                                   rel=1e-12)

    def test_zero_membership_mass_rejected(self):
        fit = manual_fit(circle(10), (0, 0), 5.0, np.zeros(10))
        with pytest.raises(DegenerateFitError):
            relative_shell_thickness(fit)


class TestClassify:
    def test_dense_circle_accepted(self):
        # radius 5 px at 0.0435 mm/px is 0.2175 mm, inside the size gate
        det = classify(fit_shell(circle(40)), pixel_pitch_mm=PITCH)
        assert det.accepted
        assert det.cluster_density > 1.15
        assert det.shell_thickness < 0.01

    def test_segment_rejected_by_density_and_thickness_rule(self):
        # near-collinear 20-point segment: the best circle through it is
        # sparsely populated, so the density gate rejects it
        t = np.linspace(-10.0, 10.0, 20)
        jitter = 0.01 * np.where(np.arange(20) % 2 == 0, 1.0, -1.0)
        pts = np.column_stack([t, 0.4 * t + jitter])
        det = classify(fit_shell(pts), pixel_pitch_mm=PITCH)
        assert not det.accepted
        cfg = ValidityConfig()
        assert (det.cluster_density <= cfg.cd_threshold
                or det.shell_thickness >= cfg.rst_threshold)

    def test_large_circle_rejected_by_radius_gate(self):
        # dense enough to pass both shape gates: 240 / (60 pi) ~ 1.27
        det = classify(fit_shell(circle(240, r=30.0)), pixel_pitch_mm=PITCH)
        assert det.cluster_density > 1.15
        assert det.shell_thickness < 0.2
        assert not det.accepted  # 30 px = 1.305 mm radius, above 0.5 mm

    def test_small_circle_rejected_by_radius_gate(self):
        det = classify(fit_shell(circle(40, r=2.0)), pixel_pitch_mm=PITCH)
        assert not det.accepted  # 2 px = 0.087 mm radius, below 0.15 mm

    def test_group_id_is_recorded(self):
        det = classify(fit_shell(circle(40)), pixel_pitch_mm=PITCH,
                       group_id=7)
        assert det.group_id == 7

    def test_tightening_thresholds_never_accepts_a_rejection(self):
        fits = [fit_shell(circle(40)), fit_shell(circle(18, r=4.0))]
        grid = [ValidityConfig(cd_threshold=cd, rst_threshold=rst)
                for cd in (0.5, 1.15, 2.0) for rst in (0.05, 0.2, 1.0)]
        for fit in fits:
            for loose in grid:
                for tight in grid:
                    if (tight.cd_threshold >= loose.cd_threshold
                            and tight.rst_threshold <= loose.rst_threshold):
                        la = classify(fit, loose, PITCH).accepted
                        ta = classify(fit, tight, PITCH).accepted
                        assert la or not ta

    def test_measures_invariant_under_rigid_motion(self):
        g = np.random.default_rng(2)
        pts = circle(35) + g.normal(0, 0.3, (35, 2))
        base = classify(fit_shell(pts), pixel_pitch_mm=PITCH)
        theta = 0.83
        rot = np.array([[np.cos(theta), -np.sin(theta)],
                        [np.sin(theta), np.cos(theta)]])
        moved = pts @ rot.T + np.array([12.0, -7.0])
        other = classify(fit_shell(moved), pixel_pitch_mm=PITCH)
        assert other.cluster_density == pytest.approx(base.cluster_density,
                                                      rel=1e-6)
        assert other.shell_thickness == pytest.approx(base.shell_thickness,
                                                      rel=1e-4)

    def test_thickness_scales_linearly_with_uniform_scaling(self):
        pts = circle(24, r=6.5)  # points at constant offset from r=5 shell
        u = np.full(24, 0.8)
        s = 2.5
        rst1 = relative_shell_thickness(manual_fit(pts, (0, 0), 5.0, u))
        rst2 = relative_shell_thickness(manual_fit(pts * s, (0, 0), 5.0 * s,
                                                   u))
        assert rst2 == pytest.approx(s * rst1, rel=1e-12)


class TestReclassify:
    def test_matches_classify_decision(self):
        fit = fit_shell(circle(40))
        det = classify(fit, pixel_pitch_mm=PITCH)
        again = reclassify(det, ValidityConfig(), pixel_pitch_mm=PITCH)
        assert again == det

    def test_rethresholding_flips_acceptance(self):
        fit = fit_shell(circle(40))
        det = classify(fit, pixel_pitch_mm=PITCH)
        assert det.accepted
        strict = ValidityConfig(cd_threshold=5.0, rst_threshold=0.2)
        assert not reclassify(det, strict, PITCH).accepted

    def test_preserves_measured_values(self):
        det = Detection((1.0, 2.0), 5.0, 1.3, 0.05, False, 3)
        out = reclassify(det, ValidityConfig(), PITCH)
        assert (out.center, out.radius, out.cluster_density,
                out.shell_thickness, out.group_id) == \
            ((1.0, 2.0), 5.0, 1.3, 0.05, 3)
        assert out.accepted  # 1.3 > 1.15, 0.05 < 0.2, 0.2175 mm in gate


class TestValidityConfig:
    def test_zero_density_threshold_allowed_for_sweeps(self):
        assert ValidityConfig(cd_threshold=0.0).cd_threshold == 0.0

    @pytest.mark.parametrize("kwargs", [
        {"cd_threshold": -0.1},
        {"rst_threshold": 0.0},
        {"min_radius_mm": 0.0},
        {"min_radius_mm": 0.6, "max_radius_mm": 0.5},
    ])
    def test_rejected(self, kwargs):
        with pytest.raises(ValueError):
            ValidityConfig(**kwargs)


def test_detection_record_is_immutable():
    det = Detection((0.0, 0.0), 5.0, 1.3, 0.1, True, 1)
    with pytest.raises(dataclasses.FrozenInstanceError):
        det.accepted = False
