"""Tests for gradients, edge thresholding, grouping, and ROI filtering.

Gradient oracles use affine images, where central and one-sided differences
are both exact, so every pixel (borders included) has a known closed-form
gradient.
"""

import numpy as np
import pytest

from mammocad.errors import StructureError
from mammocad.image_io import GrayImage
from mammocad.edges import (EdgeGroup, connected_groups, edge_image, edge_map,
                            gaussian_blur, gradient_magnitude,
                            isotropic_gradient_magnitude, restrict_to_roi)
from mammocad.roi import RoiMask


def plane(b, c, shape=(8, 10), a=5.0):
    yy, xx = np.mgrid[0:shape[0], 0:shape[1]].astype(np.float64)
    return a + b * xx + c * yy


class TestGradients:
    def test_constant_image_has_zero_gradient(self):
        assert np.array_equal(gradient_magnitude(np.full((5, 5), 3.0)),
                              np.zeros((5, 5)))
        assert np.array_equal(isotropic_gradient_magnitude(np.full((5, 5), 3.)),
                              np.zeros((5, 5)))

    @pytest.mark.parametrize("b,c", [(1.0, 2.0), (-3.0, 0.5), (0.0, -2.0)])
    def test_affine_image_everywhere_including_borders(self, b, c):
        img = plane(b, c)
        np.testing.assert_allclose(gradient_magnitude(img),
                                   np.full(img.shape, abs(b) + abs(c)),
                                   atol=1e-12)
        np.testing.assert_allclose(isotropic_gradient_magnitude(img),
                                   np.full(img.shape, np.hypot(b, c)),
                                   atol=1e-12)

    def test_absolute_sum_overreads_diagonal_edges(self):
        # same slope magnitude along an axis vs along the diagonal:
        # the absolute-sum form reads the diagonal sqrt(2) times stronger,
        # the Euclidean form reads both identically
        axis = plane(1.0, 0.0)
        diag = plane(2.0**-0.5, 2.0**-0.5)
        l1_axis = gradient_magnitude(axis)[3, 3]
        l1_diag = gradient_magnitude(diag)[3, 3]
        assert l1_diag == pytest.approx(np.sqrt(2.0) * l1_axis, rel=1e-12)
        l2_axis = isotropic_gradient_magnitude(axis)[3, 3]
        l2_diag = isotropic_gradient_magnitude(diag)[3, 3]
        assert l2_diag == pytest.approx(l2_axis, rel=1e-12)

    def test_accepts_gray_image_wrapper(self):
        img = GrayImage(plane(1.0, 1.0))
        assert np.array_equal(gradient_magnitude(img),
                              gradient_magnitude(img.pixels))

    @pytest.mark.parametrize("shape", [(2, 5), (5, 2), (1, 1)])
    def test_rejects_images_smaller_than_3x3(self, shape):
        with pytest.raises(ValueError):
            gradient_magnitude(np.zeros(shape))
        with pytest.raises(ValueError):
            isotropic_gradient_magnitude(np.zeros(shape))


class TestEdgeMap:
    def test_constant_field_has_no_edges_even_at_k_zero(self):
        # threshold is strictly exceeded, so a flat field never fires
        assert not edge_map(np.full((6, 6), 4.0), k=0.0).any()

    def test_spike_is_the_only_edge(self):
        gm = np.zeros((10, 10))
        gm[4, 7] = 1.0
        edges = edge_map(gm, k=2.0)
        assert edges[4, 7]
        assert edges.sum() == 1

    def test_threshold_is_mean_plus_k_std(self):
        g = np.random.default_rng(0)
        gm = g.uniform(0.0, 10.0, (20, 20))
        k = 1.5
        expected = gm > gm.mean() + k * gm.std()
        assert np.array_equal(edge_map(gm, k), expected)

    def test_larger_k_selects_a_subset(self):
        g = np.random.default_rng(1)
        gm = g.uniform(0.0, 10.0, (20, 20))
        loose = edge_map(gm, 0.5)
        tight = edge_map(gm, 2.0)
        assert (loose | tight == loose).all()

    def test_rejects_non_finite_input(self):
        gm = np.zeros((5, 5))
        gm[0, 0] = np.nan
        with pytest.raises(ValueError):
            edge_map(gm)


def mask_from(points, shape=(12, 12)):
    grid = np.zeros(shape, dtype=bool)
    for x, y in points:
        grid[y, x] = True
    return grid


class TestConnectedGroups:
    def test_isolated_pixels_below_minimum_are_discarded(self):
        edges = mask_from([(1, 1), (5, 5), (9, 2), (3, 8)])
        assert connected_groups(edges) == []

    def test_five_pixel_diagonal_is_one_group(self):
        pts = [(i, i) for i in range(5)]
        groups = connected_groups(mask_from(pts))
        assert len(groups) == 1
        assert groups[0].size == 5
        assert groups[0].id == 1
        assert sorted(map(tuple, groups[0].points)) == sorted(pts)

    def test_separated_blobs_are_distinct_groups(self):
        left = [(x, y) for x in (1, 2) for y in (1, 2, 3)]   # 6 px
        right = [(x, y) for x in (6, 7) for y in (5, 6, 7)]  # 6 px, gap >= 2
        groups = connected_groups(mask_from(left + right))
        assert [g.id for g in groups] == [1, 2]
        assert {tuple(p) for p in groups[0].points} == set(left)
        assert {tuple(p) for p in groups[1].points} == set(right)

    def test_ids_follow_raster_discovery_order(self):
        later = [(x, 6) for x in range(5)]   # lower rows -> discovered second
        first = [(x, 1) for x in range(5)]
        groups = connected_groups(mask_from(first + later))
        assert [tuple(g.points[0]) for g in groups] == [(0, 1), (0, 6)]

    def test_points_are_in_raster_order(self):
        pts = [(2, 2), (3, 2), (1, 3), (2, 3), (3, 4)]
        groups = connected_groups(mask_from(pts))
        got = [tuple(p) for p in groups[0].points]
        assert got == sorted(pts, key=lambda p: (p[1], p[0]))

    def test_coords_returns_float_copy(self):
        groups = connected_groups(mask_from([(i, i) for i in range(5)]))
        coords = groups[0].coords()
        assert coords.dtype == np.float64
        coords[0, 0] = 99.0
        assert groups[0].points[0, 0] != 99


def roi_of(flags):
    return RoiMask(np.asarray(flags, dtype=bool), window=32, stride=16)


class TestRestrictToRoi:
    def setup_method(self):
        self.pts = [(x, 2) for x in range(2, 9)]  # 7-px horizontal run
        self.groups = connected_groups(mask_from(self.pts))

    def test_full_mask_keeps_everything(self):
        kept = restrict_to_roi(self.groups, roi_of(np.ones((12, 12))))
        assert len(kept) == 1
        assert {tuple(p) for p in kept[0].points} == set(self.pts)

    def test_empty_mask_drops_everything(self):
        kept = restrict_to_roi(self.groups, roi_of(np.zeros((12, 12))))
        assert kept == []

    def test_partial_mask_below_minimum_drops_group(self):
        flags = np.zeros((12, 12), dtype=bool)
        flags[:, :6] = True  # keeps only 4 of the 7 pixels
        assert restrict_to_roi(self.groups, roi_of(flags)) == []

    def test_mask_can_split_one_group_into_two(self):
        pts = [(x, 2) for x in range(11)]  # 11-px run
        groups = connected_groups(mask_from(pts))
        flags = np.ones((12, 12), dtype=bool)
        flags[:, 5] = False  # cut the run into 5 + 5
        kept = restrict_to_roi(groups, roi_of(flags))
        assert [g.size for g in kept] == [5, 5]
        assert [g.id for g in kept] == [1, 2]

    def test_group_outside_mask_dimensions_rejected(self):
        big = [EdgeGroup(1, np.array([(x, 20) for x in range(5)]))]
        with pytest.raises(StructureError):
            restrict_to_roi(big, roi_of(np.ones((12, 12))))


class TestGaussianBlur:
    def test_nonpositive_sigma_is_identity(self):
        x = np.arange(16.0).reshape(4, 4)
        assert gaussian_blur(x, 0.0) is x
        assert gaussian_blur(x, -1.0) is x

    def test_constant_image_unchanged(self):
        x = np.full((10, 10), 6.0)
        np.testing.assert_allclose(gaussian_blur(x, 1.5), x, atol=1e-12)

    def test_impulse_response_is_symmetric_and_normalized(self):
        x = np.zeros((21, 21))
        x[10, 10] = 1.0
        out = gaussian_blur(x, 1.2)
        assert out.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(out, out[::-1, :], atol=1e-15)
        np.testing.assert_allclose(out, out[:, ::-1], atol=1e-15)
        np.testing.assert_allclose(out, out.T, atol=1e-15)

    def test_smoothing_reduces_noise_variance(self):
        g = np.random.default_rng(2)
        x = g.normal(0.0, 1.0, (64, 64))
        assert gaussian_blur(x, 1.5).std() < 0.5 * x.std()

    def test_accepts_gray_image(self):
        img = GrayImage(np.arange(25.0).reshape(5, 5))
        assert np.array_equal(gaussian_blur(img, 1.0),
                              gaussian_blur(img.pixels, 1.0))


def test_edge_image_renders_binary():
    edges = mask_from([(1, 1), (2, 2)])
    img = edge_image(edges)
    assert set(np.unique(img.pixels)) == {0.0, 255.0}
