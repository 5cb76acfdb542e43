import numpy as np
import pytest

from ribbonhash import (
    InvalidImageError,
    ManipulationSpec,
    ParameterError,
    RgbImage,
    apply_manipulation,
    attack_specs,
    central_crop_for_large_rotation,
    full_attack_matrix,
    rotate_image,
)
from ribbonhash.attacks import (
    BLUR_RADII,
    GAUSSIAN_SIGMAS,
    JPEG_QUALITIES,
    LARGE_ROTATE_ANGLES,
    MOTION_LENGTHS,
    NOISE_DENSITIES,
    ROTATE_CROP_ANGLES,
    SCALING_RATIOS,
    disk_kernel,
    motion_kernel,
)


@pytest.fixture(scope="module")
def photo(desk5=None):
    from ribbonhash import synthetic

    return synthetic.desk_image(3)


class TestSpecs:
    def test_parameter_tables(self):
        assert len(SCALING_RATIOS) == 10 and 1.0 in SCALING_RATIOS
        assert len(NOISE_DENSITIES) == 10 and NOISE_DENSITIES[-1] == 0.01
        assert JPEG_QUALITIES == tuple(range(55, 101, 5))
        assert len(GAUSSIAN_SIGMAS) == 10 and GAUSSIAN_SIGMAS[0] == 0.1
        assert len(BLUR_RADII) == 10 and BLUR_RADII[-1] == 1.1
        assert MOTION_LENGTHS == tuple(range(1, 11))
        assert len(ROTATE_CROP_ANGLES) == 8
        assert sorted(abs(a) for a in LARGE_ROTATE_ANGLES) == sorted(
            [90, 90, 45, 45, 30, 30, 15, 15, 10, 10, 5, 5, 3, 3]
        )

    def test_full_matrix_has_82_entries(self):
        specs = attack_specs()
        assert len(specs) == 82
        kinds = {}
        for s in specs:
            kinds[s.kind] = kinds.get(s.kind, 0) + 1
        assert kinds == {
            "scaling": 10,
            "salt_pepper": 10,
            "jpeg": 10,
            "gaussian_filter": 10,
            "circular_blur": 10,
            "motion_blur": 10,
            "rotate_crop": 8,
            "large_rotate": 14,
        }

    def test_out_of_range_parameter_rejected(self):
        with pytest.raises(ParameterError):
            ManipulationSpec("scaling", 3.0)
        with pytest.raises(ParameterError):
            ManipulationSpec("jpeg", 10)
        with pytest.raises(ParameterError):
            ManipulationSpec("nonsense", 1.0)

    def test_labels(self):
        assert ManipulationSpec("jpeg", 55).label() == "jpeg__55"
        assert ManipulationSpec("large_rotate", -90).label() == "large_rotate__-90"


class TestIndividualManipulations:
    def test_identity_scaling(self, photo):
        out = apply_manipulation(photo, ManipulationSpec("scaling", 1.0))
        np.testing.assert_array_equal(out.pixels, photo.pixels)

    def test_scaling_changes_size(self, photo):
        out = apply_manipulation(photo, ManipulationSpec("scaling", 0.8))
        assert out.width == round(photo.width * 0.8)

    def test_salt_pepper_seeded_count(self):
        img = RgbImage(np.full((100, 100, 3), 128.0))
        spec = ManipulationSpec("salt_pepper", 0.01, seed=12)
        out = apply_manipulation(img, spec)
        corrupted = np.any(out.pixels != 128.0, axis=2)
        rng = np.random.Generator(np.random.PCG64(12))
        expected = (rng.random((100, 100)) < 0.01).sum()
        assert corrupted.sum() == expected
        assert 60 <= corrupted.sum() <= 140  # ~ density * pixels
        values = out.pixels[corrupted]
        assert set(np.unique(values)) <= {0.0, 255.0}

    def test_salt_pepper_deterministic(self, photo):
        spec = ManipulationSpec("salt_pepper", 0.005, seed=3)
        a = apply_manipulation(photo, spec)
        b = apply_manipulation(photo, spec)
        np.testing.assert_array_equal(a.pixels, b.pixels)

    def test_jpeg_roundtrip_close_at_q100(self, photo):
        out = apply_manipulation(photo, ManipulationSpec("jpeg", 100))
        assert out.width == photo.width
        mae = np.abs(out.pixels - photo.pixels).mean()
        assert mae < 3.0

    def test_rotate_crop_zero_identity(self, photo):
        out = apply_manipulation(photo, ManipulationSpec("rotate_crop", 0.0))
        np.testing.assert_array_equal(out.pixels, photo.pixels)

    def test_rotate_crop_keeps_size(self, photo):
        out = apply_manipulation(photo, ManipulationSpec("rotate_crop", 1.0))
        assert out.width == photo.width and out.height == photo.height

    def test_large_rotation_right_angle_is_permutation(self, photo):
        out = apply_manipulation(photo, ManipulationSpec("large_rotate", 90))
        np.testing.assert_array_equal(out.pixels, np.rot90(photo.pixels, 1))
        out = apply_manipulation(photo, ManipulationSpec("large_rotate", -90))
        np.testing.assert_array_equal(out.pixels, np.rot90(photo.pixels, 3))

    def test_large_rotation_expands_with_white_fill(self, photo):
        out = apply_manipulation(photo, ManipulationSpec("large_rotate", 45))
        assert out.width > photo.width
        assert np.all(out.pixels[0, 0] == 255.0)  # corner is pure fill

    def test_motion_blur_one_pixel_identity(self, photo):
        out = apply_manipulation(photo, ManipulationSpec("motion_blur", 1))
        np.testing.assert_allclose(out.pixels, photo.pixels, atol=1e-9)

    def test_blur_kernels_normalized(self):
        for r in BLUR_RADII:
            k = disk_kernel(r)
            assert k.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(k >= 0.0)
        for n in MOTION_LENGTHS:
            assert motion_kernel(n).sum() == pytest.approx(1.0, abs=1e-12)

    def test_gaussian_attack_smooths(self, photo):
        out = apply_manipulation(photo, ManipulationSpec("gaussian_filter", 1.0))
        assert out.pixels.var() < photo.pixels.var()


class TestRotate:
    def test_180_rotation_exact(self, photo):
        out = rotate_image(photo, 180.0, expand=False)
        np.testing.assert_array_equal(out.pixels, np.rot90(photo.pixels, 2))

    def test_expanded_size(self, photo):
        out = rotate_image(photo, 45.0, expand=True)
        expected = int(np.ceil(photo.width * np.sqrt(2)))
        assert abs(out.width - expected) <= 1

    def test_small_angle_keep_frame_retains_center_content(self, photo):
        out = rotate_image(photo, 0.5, expand=False)
        c = photo.width // 2
        center_mad = np.abs(
            out.pixels[c - 20 : c + 20, c - 20 : c + 20]
            - photo.pixels[c - 20 : c + 20, c - 20 : c + 20]
        ).mean()
        assert center_mad < 20.0


class TestCentralCrop:
    def test_512_to_361(self, photo):
        out = central_crop_for_large_rotation(photo)
        assert out.width == out.height == 361
        np.testing.assert_array_equal(out.pixels, photo.pixels[75:436, 75:436])

    def test_idempotent(self, photo):
        once = central_crop_for_large_rotation(photo)
        twice = central_crop_for_large_rotation(once)
        np.testing.assert_array_equal(once.pixels, twice.pixels)

    def test_constant_image(self):
        img = RgbImage(np.full((400, 400, 3), 9.0))
        out = central_crop_for_large_rotation(img)
        assert out.width == 361
        np.testing.assert_array_equal(out.pixels, 9.0 * np.ones((361, 361, 3)))

    def test_too_small_rejected(self):
        with pytest.raises(InvalidImageError):
            central_crop_for_large_rotation(RgbImage(np.zeros((100, 100, 3))))


class TestFullMatrix:
    def test_deterministic_and_valid(self, photo):
        first = {s.label(): img.pixels.copy() for s, img in full_attack_matrix(photo, 7)}
        assert len(first) == 82
        for spec, img in full_attack_matrix(photo, 7):
            np.testing.assert_array_equal(img.pixels, first[spec.label()])
