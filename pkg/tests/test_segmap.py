import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from roadnav.segmap import (
    ClassMap,
    ClassTable,
    NoRoad,
    apply_roi_mask,
    binarize,
    cross_entropy,
    downsample_labels,
    extract_road_roi,
)

from oracles import bfs_components, border_flood_outside

TABLE = ClassTable.from_lists(road=[1], obstacle=[2], others=[0, 3])


class TestClassTable:
    def test_from_json(self):
        table = ClassTable.from_json('{"road": [1, 4], "obstacle": [2], "others": [0]}')
        assert table.ids("road") == [1, 4]
        assert ClassTable.from_json(table.to_json()) == table

    def test_needs_a_road_label(self):
        with pytest.raises(ValueError, match="road"):
            ClassTable.from_json('{"obstacle": [2]}')

    def test_rejects_duplicate_and_unknown_keys(self):
        with pytest.raises(ValueError, match="both"):
            ClassTable.from_lists(road=[1], obstacle=[1])
        with pytest.raises(ValueError, match="unknown"):
            ClassTable.from_json('{"road": [1], "sky": [5]}')

    def test_class_map_rejects_unlisted_label(self):
        with pytest.raises(ValueError, match="missing"):
            ClassMap(np.array([[1, 7]]), TABLE)


def test_binarize_all_road():
    assert np.all(binarize(ClassMap(np.ones((3, 4), int), TABLE)) == 1)


def test_binarize_checkerboard():
    labels = np.indices((4, 4)).sum(axis=0) % 2 + 1  # 1/2 checkerboard
    assert np.array_equal(binarize(ClassMap(labels, TABLE)), (labels == 1).astype(np.uint8))


@settings(max_examples=50, deadline=None)
@given(hnp.arrays(np.int64, (6, 7), elements=st.integers(0, 3)))
def test_binarize_counts_road_pixels(labels):
    out = binarize(ClassMap(labels, TABLE))
    assert out.sum() == sum(TABLE.categories[int(v)] == "road" for v in labels.ravel())


class TestRoi:
    def test_all_road(self):
        assert np.all(extract_road_roi(np.ones((5, 5), np.uint8)) == 1)

    def test_donut_includes_enclosed_blob(self):
        img = np.zeros((9, 9), np.uint8)
        img[1:8, 1:8] = 1
        img[3:6, 3:6] = 0  # enclosed non-road
        roi = extract_road_roi(img, 0.0)
        expected = ~border_flood_outside(img)
        assert np.array_equal(roi.astype(bool), expected)
        assert roi[4, 4] == 1 and roi[0, 0] == 0

    def test_small_blob_dropped(self):
        img = np.zeros((20, 20), np.uint8)
        img[2:12, 2:12] = 1  # 100 px = 25 %
        img[15:17, 15:17] = 1  # 4 px = 1 %
        roi = extract_road_roi(img, 0.02)
        assert roi.sum() == 100 and roi[15, 15] == 0

    def test_no_road(self):
        with pytest.raises(NoRoad):
            extract_road_roi(np.zeros((4, 4), np.uint8))
        img = np.zeros((10, 10), np.uint8)
        img[0, 0] = 1
        with pytest.raises(NoRoad):
            extract_road_roi(img, 0.05)

    @settings(max_examples=60, deadline=None)
    @given(hnp.arrays(np.uint8, (12, 12), elements=st.integers(0, 1)))
    def test_matches_component_and_flood_oracle(self, img):
        comps = [c for c in bfs_components(img, eight=False) if len(c) >= 0.01 * img.size]
        if not comps:
            with pytest.raises(NoRoad):
                extract_road_roi(img, 0.01)
            return
        expected = np.zeros(img.shape, bool)
        for comp in comps:
            mask = np.zeros(img.shape, bool)
            mask[tuple(np.array(comp).T)] = True
            expected |= ~border_flood_outside(mask)
        roi = extract_road_roi(img, 0.01).astype(bool)
        assert np.array_equal(roi, expected)
        # never marks a border-connected non-road pixel of the whole image
        assert not np.any(roi & border_flood_outside(img))


class TestMask:
    def test_identity_and_annihilator(self):
        t = np.random.default_rng(1).normal(size=(3, 4, 5))
        assert np.array_equal(apply_roi_mask(t, np.ones((4, 5))), t)
        assert np.all(apply_roi_mask(t, np.zeros((4, 5))) == 0)

    def test_single_pixel(self):
        t = np.random.default_rng(2).normal(size=(2, 3, 3))
        roi = np.zeros((3, 3))
        roi[0, 0] = 1
        out = apply_roi_mask(t, roi)
        assert np.array_equal(out[:, 0, 0], t[:, 0, 0])
        out[:, 0, 0] = 0
        assert np.all(out == 0)

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        t = rng.normal(size=(2, 6, 6))
        roi = rng.integers(0, 2, size=(6, 6))
        once = apply_roi_mask(t, roi)
        assert np.array_equal(apply_roi_mask(once, roi), once)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            apply_roi_mask(np.zeros((1, 3, 3)), np.ones((3, 4)))


class TestCrossEntropy:
    def test_saturated(self):
        gt = np.array([[0, 1], [2, 1]])
        scores = np.zeros((3, 2, 2))
        for (r, c), g in np.ndenumerate(gt):
            scores[g, r, c] = 1000.0
        assert cross_entropy(scores, gt) < 1e-6

    def test_uniform_three_classes(self):
        assert cross_entropy(np.zeros((3, 4, 4)), np.zeros((4, 4), int)) == pytest.approx(math.log(3), abs=1e-12)

    def test_single_pixel_two_classes(self):
        scores = np.array([[[1.0]], [[0.0]]])
        assert cross_entropy(scores, np.array([[0]])) == pytest.approx(math.log(1 + math.exp(-1)), abs=1e-12)
        assert cross_entropy(scores, np.array([[0]])) == pytest.approx(0.31326, abs=1e-5)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            cross_entropy(np.array([[[np.nan]], [[0.0]]]), np.array([[0]]))

    @settings(max_examples=60, deadline=None)
    @given(
        scores=hnp.arrays(np.float64, (4, 3, 3), elements=st.floats(-50, 50)),
        gt=hnp.arrays(np.int64, (3, 3), elements=st.integers(0, 3)),
        shift=hnp.arrays(np.float64, (3, 3), elements=st.floats(-100, 100)),
    )
    def test_non_negative_and_shift_invariant(self, scores, gt, shift):
        base = cross_entropy(scores, gt)
        assert base >= 0
        assert cross_entropy(scores + shift, gt) == pytest.approx(base, rel=1e-9, abs=1e-9)


class TestDownsample:
    def test_identity(self):
        g = np.arange(12).reshape(3, 4)
        assert np.array_equal(downsample_labels(g, 1), g)

    def test_factor_two(self):
        g = np.arange(16).reshape(4, 4)
        assert downsample_labels(g, 2).tolist() == [[g[0, 0], g[0, 2]], [g[2, 0], g[2, 2]]]

    def test_ceil_dims(self):
        assert downsample_labels(np.zeros((5, 5), int), 2).shape == (3, 3)

    def test_bad_factor(self):
        with pytest.raises(ValueError):
            downsample_labels(np.zeros((2, 2), int), 0)
