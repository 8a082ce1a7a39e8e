import numpy as np
import pytest

from smallprop.raster import PnmFormatError, RasterImage, read_pnm, write_pnm


def test_ppm_roundtrip_bytes(tmp_path):
    rng = np.random.default_rng(0)
    img = RasterImage(rng.integers(0, 256, (7, 5, 3), dtype=np.uint8))
    path = tmp_path / "a.ppm"
    write_pnm(img, path)
    again = read_pnm(path)
    assert np.array_equal(again.pixels, img.pixels)
    write_pnm(again, tmp_path / "b.ppm")
    assert (tmp_path / "a.ppm").read_bytes() == (tmp_path / "b.ppm").read_bytes()


def test_pgm8_roundtrip(tmp_path):
    img = RasterImage(np.arange(20, dtype=np.uint8).reshape(4, 5))
    write_pnm(img, tmp_path / "g.pgm")
    again = read_pnm(tmp_path / "g.pgm")
    assert again.depth == 8 and again.channels == 1
    assert np.array_equal(again.pixels, img.pixels)


def test_pgm16_big_endian_payload(tmp_path):
    img = RasterImage(np.array([[0x0102, 0xFFEE]], dtype=np.uint16), 16)
    path = tmp_path / "g16.pgm"
    write_pnm(img, path)
    data = path.read_bytes()
    assert data == b"P5 2 1 65535\n\x01\x02\xff\xee"
    assert np.array_equal(read_pnm(path).pixels, img.pixels)


def test_header_is_canonical(tmp_path):
    img = RasterImage(np.zeros((2, 3), dtype=np.uint8))
    write_pnm(img, tmp_path / "z.pgm")
    assert (tmp_path / "z.pgm").read_bytes().startswith(b"P5 3 2 255\n")


@pytest.mark.parametrize(
    "payload",
    [
        b"P4 2 2 255\n" + b"\x00" * 4,  # unsupported magic
        b"P5 2 2 254\n" + b"\x00" * 4,  # unsupported maxval
        b"P5 2 2 255\n" + b"\x00" * 3,  # short payload
        b"P5 2 2 255\n" + b"\x00" * 5,  # trailing bytes
        b"P5 2 2\n",  # truncated header
        b"P6 x 2 255\n" + b"\x00" * 12,  # non-numeric token
    ],
)
def test_malformed_files_rejected(tmp_path, payload):
    path = tmp_path / "bad.pnm"
    path.write_bytes(payload)
    with pytest.raises(PnmFormatError):
        read_pnm(path)


def test_image_validation():
    with pytest.raises(ValueError):
        RasterImage(np.zeros((2, 2, 3), dtype=np.uint16), 16)  # rgb must be 8-bit
    with pytest.raises(ValueError):
        RasterImage(np.zeros((2, 2), dtype=np.uint8), 16)  # dtype/depth mismatch
    with pytest.raises(ValueError):
        RasterImage(np.zeros((2, 2, 2), dtype=np.uint8))  # bad channel count


def test_samples_layout():
    img = RasterImage(np.arange(12, dtype=np.uint8).reshape(2, 2, 3))
    assert img.samples.tolist() == list(range(12))
    assert img.width == 2 and img.height == 2 and img.channels == 3
