import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from freqfuse.imageio import (
    BadHeaderError,
    BadMagicError,
    PixelImage,
    TruncatedPayloadError,
    UnsupportedMaxvalError,
    from_unit_interval,
    load_pnm,
    read_pnm,
    save_pnm,
    to_grayscale,
    to_unit_interval,
    write_pnm,
)


class TestRead:

    def test_minimal_gray(self):
        img = read_pnm(b"P5 1 1 255\n\x00")
        assert (img.height, img.width, img.channels) == (1, 1, 1)
        assert img.samples[0, 0, 0] == 0

    def test_minimal_color(self):
        img = read_pnm(b"P6 2 1 255\n" + bytes([1, 2, 3, 4, 5, 6]))
        assert (img.height, img.width, img.channels) == (1, 2, 3)
        assert img.samples[0, 1].tolist() == [4, 5, 6]

    def test_comments_and_whitespace(self):
        plain = read_pnm(b"P5 2 2 255\n\x01\x02\x03\x04")
        commented = read_pnm(b"P5\n# foo\n2\t2 # trailing\n\n  255\n\x01\x02\x03\x04")
        assert plain == commented

    def test_payload_may_start_with_whitespace_byte(self):
        img = read_pnm(b"P5 2 1 255\n\n ")
        assert img.samples.ravel().tolist() == [10, 32]

    @pytest.mark.parametrize("data, error", [
        (b"P2 1 1 255\n0", BadMagicError),
        (b"", BadMagicError),
        (b"P5 1 1 65535\n\x00\x00", UnsupportedMaxvalError),
        (b"P5 1 1 15\n\x00", UnsupportedMaxvalError),
        (b"P6 2 2 255\n\x00\x00\x00", TruncatedPayloadError),
        (b"P5 1 1", BadHeaderError),
        (b"P5 a 1 255\n\x00", BadHeaderError),
        (b"P5 0 1 255\n", BadHeaderError),
    ])
    def test_distinct_errors(self, data, error):
        with pytest.raises(error):
            read_pnm(data)


class TestWrite:

    def test_canonical_gray_bytes(self):
        img = PixelImage(np.array([[255]], dtype=np.uint8))
        assert write_pnm(img) == b"P5 1 1 255\n\xff"

    def test_canonical_color_header(self):
        img = PixelImage(np.zeros((2, 3, 3), dtype=np.uint8))
        assert write_pnm(img).startswith(b"P6 3 2 255\n")
        assert len(write_pnm(img)) == len(b"P6 3 2 255\n") + 18

    def test_random_3x2_rgb_roundtrip(self, rng):
        img = PixelImage(rng.integers(0, 256, size=(2, 3, 3), dtype=np.uint8))
        assert read_pnm(write_pnm(img)) == img

    def test_file_roundtrip(self, tmp_path, rng):
        img = PixelImage(rng.integers(0, 256, size=(5, 4, 1), dtype=np.uint8))
        save_pnm(img, tmp_path / "a.pgm")
        assert load_pnm(tmp_path / "a.pgm") == img


pixel_images = st.tuples(st.integers(1, 12), st.integers(1, 12), st.sampled_from([1, 3])).flatmap(
    lambda s: arrays(np.uint8, s))


@settings(max_examples=100, deadline=None)
@given(pixel_images)
def test_serialize_roundtrip_is_bitwise(samples):
    img = PixelImage(samples)
    data = write_pnm(img)
    assert read_pnm(data) == img
    assert write_pnm(read_pnm(data)) == data


class TestUnitInterval:

    def test_128(self):
        img = PixelImage(np.array([[128]], dtype=np.uint8))
        (m,) = to_unit_interval(img)
        assert m[0, 0] == pytest.approx(0.50196078431, abs=1e-10)
        assert from_unit_interval([m]) == img

    def test_half_rounds_up(self):
        assert from_unit_interval([np.array([[0.5]])]).samples[0, 0, 0] == 128
        # 0.5/255 and 1.5/255 sit on half-steps
        vals = np.array([[0.5 / 255, 1.5 / 255, 254.5 / 255]])
        assert from_unit_interval([vals]).samples.ravel().tolist() == [1, 2, 255]

    def test_out_of_range_is_clamped(self):
        img = from_unit_interval([np.array([[-0.3, 1.7]])])
        assert img.samples.ravel().tolist() == [0, 255]

    def test_all_256_values_roundtrip(self):
        img = PixelImage(np.arange(256, dtype=np.uint8).reshape(16, 16))
        assert from_unit_interval(to_unit_interval(img)) == img

    def test_rgb_channels(self, rng):
        img = PixelImage(rng.integers(0, 256, size=(3, 4, 3), dtype=np.uint8))
        chans = to_unit_interval(img)
        assert len(chans) == 3
        assert from_unit_interval(chans) == img

    def test_grayscale_luma(self):
        img = PixelImage(np.array([[[255, 0, 0], [0, 255, 0], [0, 0, 255]]], dtype=np.uint8))
        np.testing.assert_allclose(to_grayscale(img), [[0.299, 0.587, 0.114]], atol=1e-15)


def test_pixel_image_validation():
    with pytest.raises(ValueError):
        PixelImage(np.zeros((2, 2, 2), dtype=np.uint8))
    with pytest.raises(ValueError):
        PixelImage(np.array([[300]]))
    assert PixelImage(np.array([[3, 4]])).samples.dtype == np.uint8
