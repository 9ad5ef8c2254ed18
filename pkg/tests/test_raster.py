import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fctklt.errors import DimensionError, FormatError, UnsupportedFormatError
from fctklt.raster import ImageRaster, clamp_to_raster, format_pgm, load_pgm, parse_pgm, save_pgm


def test_load_2x2(tmp_path):
    path = tmp_path / "tiny.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    img = load_pgm(path)
    assert (img.rows, img.cols, img.bit_depth) == (2, 2, 8)
    assert img.samples.ravel().tolist() == [0, 255, 128, 64]


def test_load_512_header(tmp_path):
    path = tmp_path / "big.pgm"
    path.write_bytes(b"P5 512 512 255 " + bytes(512 * 512))
    img = load_pgm(path)
    assert (img.rows, img.cols) == (512, 512)


def test_rectangular_dims_order():
    img = parse_pgm(b"P5\n3 2\n255\n" + bytes(range(6)))
    assert (img.rows, img.cols) == (2, 3)
    assert img.samples.tolist() == [[0, 1, 2], [3, 4, 5]]


def test_header_comments():
    img = parse_pgm(b"P5\n# made by hand\n1 1\n255\n\x07")
    assert img.samples.tolist() == [[7]]


@pytest.mark.parametrize(
    "data, error",
    [
        (b"P6\n1 1\n255\n\x00\x00\x00", UnsupportedFormatError),
        (b"P5\n1 1\n65535\n\x00\x00", UnsupportedFormatError),
        (b"P5\n1 x\n255\n\x00", FormatError),
        (b"P5\n2 2\n255\n\x00", FormatError),
        (b"GIF89a", FormatError),
        (b"P5\n1 1", FormatError),
    ],
)
def test_rejects_bad_files(data, error):
    with pytest.raises(error):
        parse_pgm(data)


def test_unsupported_message():
    with pytest.raises(UnsupportedFormatError, match="unsupported format"):
        parse_pgm(b"P6\n1 1\n255\n\x00\x00\x00")


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_pgm(tmp_path / "nope.pgm")


def test_single_pixel_layout(tmp_path):
    path = tmp_path / "one.pgm"
    save_pgm(ImageRaster([[7]]), path)
    data = path.read_bytes()
    assert data == b"P5\n1 1\n255\n\x07"
    assert data.split(b"\n")[:3] == [b"P5", b"1 1", b"255"]


def test_save_rejects_deep_raster(tmp_path):
    img = ImageRaster(np.full((2, 2), 4000), bit_depth=12)
    with pytest.raises(UnsupportedFormatError):
        save_pgm(img, tmp_path / "deep.pgm")


def test_raster_invariants():
    with pytest.raises(DimensionError):
        ImageRaster([[256]])
    with pytest.raises(DimensionError):
        ImageRaster(np.zeros((0, 3)))
    with pytest.raises(DimensionError):
        ImageRaster([[1.5]])
    img = ImageRaster([[1, 2]])
    with pytest.raises(ValueError):
        img.samples[0, 0] = 9


@settings(max_examples=60, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 17), st.integers(1, 17))))
def test_pgm_round_trip(samples):
    img = ImageRaster(samples)
    assert parse_pgm(format_pgm(img)) == img


@pytest.mark.parametrize("value, expected", [(254.6, 255), (-3.2, 0), (300.0, 255), (2.5, 3), (127.5, 128), (1.49, 1)])
def test_clamp_examples(value, expected):
    assert clamp_to_raster(np.array([[value]])).samples[0, 0] == expected


def test_clamp_idempotent_on_integer_planes(rng):
    plane = rng.integers(0, 256, size=(9, 7)).astype(float)
    img = clamp_to_raster(plane)
    assert np.array_equal(img.samples, plane)
    assert clamp_to_raster(img.to_float()) == img
