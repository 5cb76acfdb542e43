import math

import numpy as np
import pytest

from ribbonhash import (
    InvalidImageError,
    ParameterError,
    RgbImage,
    gaussian_filter,
    gaussian_mask,
    preprocess,
    resize_bilinear,
    rgb_to_ycbcr,
)
from ribbonhash.imaging import YCBCR_MATRIX, YCBCR_OFFSET, load_image, luminance, save_png

from oracles import naive_convolve_replicate


def rgb(arr):
    return RgbImage(np.asarray(arr, dtype=np.float64))


def random_rgb(rng, h, w, lo=0, hi=255):
    return rgb(rng.uniform(lo, hi, size=(h, w, 3)))


class TestRgbImage:
    def test_rejects_bad_shapes(self):
        with pytest.raises(InvalidImageError):
            rgb(np.zeros((4, 4)))
        with pytest.raises(InvalidImageError):
            rgb(np.zeros((0, 4, 3)))

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidImageError):
            rgb(np.full((4, 4, 3), 256.0))
        with pytest.raises(InvalidImageError):
            rgb(np.full((4, 4, 3), -1.0))
        with pytest.raises(InvalidImageError):
            rgb(np.full((4, 4, 3), np.nan))


class TestResizeBilinear:
    def test_identity_is_pixel_exact(self, rng):
        img = random_rgb(rng, 16, 16)
        out = resize_bilinear(img, 16)
        np.testing.assert_array_equal(out.pixels, img.pixels)

    def test_constant_stays_constant(self):
        img = rgb(np.full((100, 300, 3), 37.0))
        out = resize_bilinear(img, 512)
        assert out.width == out.height == 512
        np.testing.assert_allclose(out.pixels, 37.0, atol=1e-12)

    def test_checkerboard_upscale_interior_values(self):
        board = np.zeros((2, 2, 3))
        board[0, 1] = board[1, 0] = 255.0
        out = resize_bilinear(rgb(board), 4).pixels
        # corners keep the source values, everything else interpolates
        assert out[0, 0, 0] == 0.0 and out[0, 3, 0] == 255.0
        interior = out[1:3, 1:3]
        assert np.all(interior > 0.0) and np.all(interior < 255.0)
        # hand evaluation at (1, 1): weights 0.75/0.25 on both axes
        assert out[1, 1, 0] == pytest.approx(95.625, abs=1e-12)

    def test_range_preserved(self, rng):
        img = random_rgb(rng, 9, 13)
        out = resize_bilinear(img, 21)
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 255.0

    def test_degenerate_input_rejected(self):
        with pytest.raises(InvalidImageError):
            resize_bilinear(rgb(np.zeros((1, 5, 3))), 8)


class TestGaussianMask:
    def test_size_one_is_unit(self):
        m = gaussian_mask(1, 2.7)
        np.testing.assert_array_equal(m.weights, [[1.0]])

    def test_size3_sigma_half_center_weight(self):
        m = gaussian_mask(3, 0.5)
        expected = 1.0 / (1.0 + 4.0 * math.exp(-2.0) + 4.0 * math.exp(-4.0))
        assert m.weights[1, 1] == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.6193, abs=1e-4)

    @pytest.mark.parametrize("size,sigma", [(1, 0.3), (3, 0.5), (5, 1.0), (7, 2.5), (9, 0.8)])
    def test_sums_to_one_and_symmetric(self, size, sigma):
        m = gaussian_mask(size, sigma)
        assert abs(m.weights.sum() - 1.0) <= 1e-12
        assert np.all(m.weights > 0.0)
        np.testing.assert_array_equal(m.weights, m.weights.T)
        np.testing.assert_array_equal(m.weights, np.rot90(m.weights))

    def test_parameter_errors(self):
        with pytest.raises(ParameterError):
            gaussian_mask(4, 1.0)
        with pytest.raises(ParameterError):
            gaussian_mask(3, 0.0)
        with pytest.raises(ParameterError):
            gaussian_mask(3, -1.0)


class TestGaussianFilter:
    def test_constant_image_unchanged(self):
        img = rgb(np.full((12, 12, 3), 128.0))
        out = gaussian_filter(img, gaussian_mask(3, 1.0))
        np.testing.assert_allclose(out.pixels, 128.0, atol=1e-9)

    def test_impulse_response_is_mask(self):
        px = np.zeros((9, 9, 3))
        px[4, 4] = 200.0
        out = gaussian_filter(rgb(px), gaussian_mask(3, 0.8))
        m = gaussian_mask(3, 0.8).weights
        np.testing.assert_allclose(out.pixels[3:6, 3:6, 0], 200.0 * m, atol=1e-9)
        assert np.all(out.pixels[0:2, 0:2] == 0.0)

    def test_matches_reference_convolution_and_reduces_variance(self, rng):
        img = random_rgb(rng, 12, 12)
        mask = gaussian_mask(3, 1.0)
        out = gaussian_filter(img, mask)
        for c in range(3):
            ref = naive_convolve_replicate(img.pixels[:, :, c], mask.weights)
            np.testing.assert_allclose(out.pixels[:, :, c], ref, atol=1e-10)
        assert out.pixels.var() < img.pixels.var()

    def test_mask_larger_than_image_rejected(self):
        with pytest.raises(ParameterError):
            gaussian_filter(rgb(np.zeros((2, 2, 3))), gaussian_mask(5, 1.0))


class TestYcbcr:
    def test_gray_maps_to_neutral_chroma(self):
        y, cb, cr = rgb_to_ycbcr(rgb(np.full((2, 2, 3), 128.0)))
        assert y.pixels[0, 0] == pytest.approx(128.0, abs=1e-9)
        assert cb.pixels[0, 0] == pytest.approx(128.0, abs=1e-9)
        assert cr.pixels[0, 0] == pytest.approx(128.0, abs=1e-9)

    def test_white(self):
        y, cb, cr = rgb_to_ycbcr(rgb(np.full((1, 1, 3), 255.0)))
        assert y.pixels[0, 0] == pytest.approx(255.0, abs=1e-9)
        assert cb.pixels[0, 0] == pytest.approx(128.0, abs=1e-9)
        assert cr.pixels[0, 0] == pytest.approx(128.0, abs=1e-9)

    def test_pure_red_rows(self):
        px = np.zeros((1, 1, 3))
        px[0, 0, 0] = 255.0
        y, cb, cr = rgb_to_ycbcr(rgb(px))
        assert y.pixels[0, 0] == pytest.approx(76.245, abs=1e-9)
        assert cb.pixels[0, 0] == pytest.approx(84.9815, abs=1e-4)
        assert cr.pixels[0, 0] == 255.0  # clamped from 255.5

    def test_inverse_recovers_unclamped_inputs(self, rng):
        img = random_rgb(rng, 6, 6, lo=50, hi=200)
        y, cb, cr = rgb_to_ycbcr(img)
        ycc = np.stack([y.pixels, cb.pixels, cr.pixels], axis=-1) - YCBCR_OFFSET
        back = ycc @ np.linalg.inv(YCBCR_MATRIX).T
        np.testing.assert_allclose(back, img.pixels, atol=1e-6)

    def test_luminance_matches_y_plane(self, rng):
        img = random_rgb(rng, 5, 7)
        y, _, _ = rgb_to_ycbcr(img)
        np.testing.assert_allclose(luminance(img).pixels, y.pixels, atol=1e-9)


class TestPreprocess:
    def test_constant_fixed_point(self):
        img = rgb(np.full((32, 32, 3), 77.0))
        out = preprocess(img, 32)
        np.testing.assert_allclose(out.pixels, 77.0, atol=1e-9)

    def test_output_shape(self, rng):
        out = preprocess(random_rgb(rng, 40, 90), 64)
        assert out.width == out.height == 64

    def test_smoothing_brings_noisy_pair_closer(self, rng):
        base = random_rgb(rng, 48, 48, lo=60, hi=190)
        noisy = base.pixels.copy()
        hits = rng.random(noisy.shape[:2]) < 0.04
        polarity = rng.random(noisy.shape[:2]) < 0.5
        noisy[hits & polarity] = 255.0
        noisy[hits & ~polarity] = 0.0
        noisy_img = rgb(noisy)
        raw_mad = np.abs(base.pixels - noisy_img.pixels).mean()
        a = preprocess(base, 48)
        b = preprocess(noisy_img, 48)
        assert np.abs(a.pixels - b.pixels).mean() < raw_mad

    def test_deterministic(self, rng):
        img = random_rgb(rng, 20, 30)
        one = preprocess(img, 16)
        two = preprocess(img, 16)
        np.testing.assert_array_equal(one.pixels, two.pixels)

    def test_too_small_rejected(self):
        with pytest.raises(InvalidImageError):
            preprocess(rgb(np.zeros((4, 4, 3))), 16)
        with pytest.raises(ParameterError):
            preprocess(rgb(np.zeros((16, 16, 3))), 4)


class TestIo:
    def test_png_roundtrip(self, tmp_path, rng):
        img = rgb(rng.integers(0, 256, size=(10, 12, 3)).astype(np.float64))
        path = tmp_path / "x.png"
        save_png(img, path)
        back = load_image(path)
        np.testing.assert_array_equal(back.pixels, img.pixels)

    def test_unreadable_file(self, tmp_path):
        bad = tmp_path / "bad.png"
        bad.write_bytes(b"not an image")
        with pytest.raises(InvalidImageError):
            load_image(bad)
