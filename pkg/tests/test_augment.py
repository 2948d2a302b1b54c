import numpy as np
import pytest

from src.data.augment import rotate_image, rotate_pixels
from src.data.dataset import LabeledImage
from src.utils.errors import DomainError


def gaussian_blob(size=28, sigma=4.0):
    coordinates = np.arange(size) - (size - 1) / 2
    rows, cols = np.meshgrid(coordinates, coordinates, indexing="ij")
    return np.exp(-(rows**2 + cols**2) / (2 * sigma**2))


def test_zero_angle_is_identity(rng):
    pixels = rng.uniform(size=(28, 28))
    rotated = rotate_pixels(pixels, 0.0)
    np.testing.assert_array_equal(rotated, pixels)
    assert rotated is not pixels


@pytest.mark.parametrize("angle", [-45.5, 45.01, 90.0])
def test_out_of_range_angle(angle):
    with pytest.raises(DomainError):
        rotate_pixels(np.zeros((28, 28)), angle)


def test_centered_block_stays_brightest():
    pixels = np.zeros((28, 28))
    pixels[13:15, 13:15] = 1.0
    rotated = rotate_pixels(pixels, 45.0)
    row, col = np.unravel_index(np.argmax(rotated), rotated.shape)
    assert row in (13, 14) and col in (13, 14)


@pytest.mark.parametrize("angle", [10.0, -30.0, 45.0])
def test_rotation_round_trip(angle):
    blob = gaussian_blob()
    restored = rotate_pixels(rotate_pixels(blob, angle), -angle)
    assert np.max(np.abs(restored - blob)) < 0.15


def test_rotation_keeps_range_and_shape(rng):
    pixels = rng.uniform(size=(28, 28))
    rotated = rotate_pixels(pixels, 33.0)
    assert rotated.shape == (28, 28)
    assert rotated.min() >= 0.0 and rotated.max() <= 1.0


def test_corners_fill_with_background():
    rotated = rotate_pixels(np.ones((28, 28)), 45.0)
    assert rotated[0, 0] == 0.0
    assert rotated[14, 14] == pytest.approx(1.0)


def test_rotate_image_keeps_label():
    image = LabeledImage(gaussian_blob(), 7)
    rotated = rotate_image(image, 20.0)
    assert isinstance(rotated, LabeledImage)
    assert rotated.label == 7
    assert rotated.pixels.shape == (28, 28)
