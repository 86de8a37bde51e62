import numpy as np
import pytest

from fieldbench.channels import (
    CHANNEL_NAMES,
    build_channel_stack,
    minmax_normalize,
    otsu_threshold,
    otsu_vegetation_mask,
    rgb_to_hsv,
    vegetation_indices,
)


class TestHsv:
    def test_pure_red(self):
        assert rgb_to_hsv(np.array([255, 0, 0])) == pytest.approx([0.0, 1.0, 1.0])

    def test_pure_green(self):
        assert rgb_to_hsv(np.array([0, 255, 0])) == pytest.approx([1 / 3, 1.0, 1.0])

    def test_gray_has_zero_saturation(self):
        h, s, v = rgb_to_hsv(np.array([128, 128, 128]))
        assert (h, s) == (0.0, 0.0)
        assert v == pytest.approx(128 / 255)

    def test_matches_stdlib_on_random_pixels(self):
        import colorsys

        rng = np.random.default_rng(0)
        for _ in range(200):
            pix = rng.integers(0, 256, size=3)
            ours = rgb_to_hsv(pix)
            ref = colorsys.rgb_to_hsv(*(pix / 255.0))
            assert ours == pytest.approx(ref, abs=1e-12)

    def test_vectorized_matches_per_pixel(self):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, size=(6, 7, 3))
        full = rgb_to_hsv(img)
        for i in range(6):
            for j in range(7):
                assert full[i, j] == pytest.approx(rgb_to_hsv(img[i, j]))


class TestVegetationIndices:
    def test_gray_pixel_is_neutral(self):
        exg, _, _, ndi = vegetation_indices(np.array([100, 100, 100]))
        assert exg == pytest.approx(0.0)
        assert ndi == pytest.approx(0.0)

    def test_pure_green_oracles(self):
        exg, exr, cive, ndi = vegetation_indices(np.array([0, 255, 0]))
        assert exg == pytest.approx(2.0, abs=1e-6)
        assert exr == pytest.approx(-1.0, abs=1e-6)
        assert cive == pytest.approx(17.97645, abs=1e-6)
        assert ndi == pytest.approx(1.0, abs=1e-6)

    def test_black_pixel_convention(self):
        exg, _, cive, ndi = vegetation_indices(np.array([0, 0, 0]))
        assert exg == pytest.approx(0.0, abs=1e-6)
        assert cive == pytest.approx(18.79245, abs=1e-6)
        assert ndi == pytest.approx(0.0)

    def test_exg_invariant_to_intensity_scaling(self):
        base = np.array([40.0, 180.0, 20.0])
        exg1, *_ = vegetation_indices(base)
        exg2, *_ = vegetation_indices(0.3 * base)
        assert exg1 == pytest.approx(exg2, abs=1e-12)

    def test_greener_pixel_moves_exg_up_and_cive_down(self):
        lo = vegetation_indices(np.array([80, 90, 60]))
        hi = vegetation_indices(np.array([80, 140, 60]))
        assert hi[0] > lo[0]  # ExG strictly up
        assert hi[2] < lo[2]  # CIVE strictly down


class TestChannelStack:
    def test_shape_and_order(self):
        rng = np.random.default_rng(2)
        img = rng.integers(0, 256, size=(384, 512, 3), dtype=np.uint8)
        stack = build_channel_stack(img)
        assert stack.shape == (10, 384, 512)
        assert len(CHANNEL_NAMES) == 10
        np.testing.assert_allclose(stack[0], img[..., 0] / 255.0)

    def test_all_values_unit_interval(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            img = rng.integers(0, 256, size=(16, 24, 3), dtype=np.uint8)
            stack = build_channel_stack(img)
            assert stack.min() >= 0.0
            assert stack.max() <= 1.0

    def test_constant_plane_rule(self):
        img = np.full((8, 8, 3), 77, dtype=np.uint8)
        stack = build_channel_stack(img)
        assert np.all(stack[6] == 0.0)  # ExG plane of an all-gray image

    def test_minmax_two_values(self):
        assert minmax_normalize(np.array([0.0, 2.0])).tolist() == [0.0, 1.0]

    def test_empty_image_rejected(self):
        with pytest.raises(ValueError):
            build_channel_stack(np.zeros((0, 4, 3), dtype=np.uint8))
        with pytest.raises(ValueError):
            build_channel_stack(np.zeros((4, 4), dtype=np.uint8))


def otsu_brute_force(plane: np.ndarray) -> int | None:
    """Independent oracle: try every threshold, recompute class stats directly."""
    levels = np.rint(np.asarray(plane, dtype=np.float64) * 255.0).astype(np.int64).ravel()
    best_t, best_var = None, 0.0
    n = levels.size
    for t in range(256):
        lo = levels[levels < t]
        hi = levels[levels >= t]
        if lo.size == 0 or hi.size == 0:
            continue
        w0 = lo.size / n
        w1 = hi.size / n
        var = w0 * w1 * (lo.mean() - hi.mean()) ** 2
        if var > best_var:
            best_var, best_t = var, t
    return best_t


class TestOtsu:
    def test_constant_plane_empty_mask(self):
        mask = otsu_vegetation_mask(np.full((5, 5), 0.4))
        assert mask.sum() == 0

    def test_bimodal_selects_bright_mode(self):
        plane = np.full((10, 10), 0.2)
        plane.ravel()[:30] = 0.8
        mask = otsu_vegetation_mask(plane)
        np.testing.assert_array_equal(mask, (plane == 0.8).astype(np.uint8))

    def test_single_bright_pixel(self):
        plane = np.zeros((9, 9))
        plane[4, 4] = 1.0
        mask = otsu_vegetation_mask(plane)
        assert mask.sum() == 1
        assert mask[4, 4] == 1

    def test_incremental_equals_brute_force(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            kind = rng.integers(0, 3)
            if kind == 0:
                plane = rng.uniform(0, 1, size=(12, 12))
            elif kind == 1:  # two clusters
                plane = np.where(
                    rng.uniform(size=(12, 12)) < 0.6,
                    rng.uniform(0.0, 0.3, size=(12, 12)),
                    rng.uniform(0.6, 1.0, size=(12, 12)),
                )
            else:  # quantized few-level plane
                plane = rng.integers(0, 5, size=(12, 12)) / 4.0
            assert otsu_threshold(plane) == otsu_brute_force(plane)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            otsu_threshold(np.array([0.0, 1.5]))
