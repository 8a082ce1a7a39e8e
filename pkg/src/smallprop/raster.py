"""Raster images and bit-exact PNM (PGM/PPM) input and output.

Only two formats are parsed: binary PGM ("P5", 8 or 16 bit gray, 16-bit
samples big-endian) and binary PPM ("P6", 8-bit RGB). The header is the four
whitespace-delimited tokens `magic width height maxval` followed by exactly
one whitespace byte, then the raw sample payload.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class PnmFormatError(ValueError):
    """Bytes that do not parse as one of the supported PNM dialects."""


_WHITESPACE = b" \t\n\r\x0b\x0c"


@dataclass(eq=False)
class RasterImage:
    """Gray or RGB sample grid; pixels has shape (h, w) or (h, w, 3)."""

    pixels: np.ndarray
    depth: int = 8

    def __post_init__(self) -> None:
        px = self.pixels
        if px.ndim == 2:
            pass
        elif px.ndim == 3 and px.shape[2] == 3:
            if self.depth != 8:
                raise ValueError("RGB images must be 8-bit")
        else:
            raise ValueError(f"unsupported pixel shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image dimensions must be positive")
        expected = {8: np.uint8, 16: np.uint16}.get(self.depth)
        if expected is None:
            raise ValueError(f"unsupported depth {self.depth}")
        if px.dtype != expected:
            raise ValueError(f"depth {self.depth} requires dtype {expected.__name__}, got {px.dtype}")
        self.pixels = np.ascontiguousarray(px)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3

    @property
    def samples(self) -> np.ndarray:
        """Row-major flat sample buffer of length width*height*channels."""
        return self.pixels.reshape(-1)


def _next_token(data: bytes, pos: int, skip_leading: bool) -> tuple[bytes, int]:
    n = len(data)
    if skip_leading:
        while pos < n and data[pos : pos + 1] in _WHITESPACE:
            pos += 1
    start = pos
    while pos < n and data[pos : pos + 1] not in _WHITESPACE:
        pos += 1
    if pos == start:
        raise PnmFormatError("truncated header")
    return data[start:pos], pos


def read_pnm(path) -> RasterImage:
    """Read a P5/P6 file; raises PnmFormatError on any deviation."""
    data = Path(path).read_bytes()
    magic, pos = _next_token(data, 0, skip_leading=False)
    if magic not in (b"P5", b"P6"):
        raise PnmFormatError(f"unsupported magic {magic!r}")
    fields = []
    for _ in range(3):
        token, pos = _next_token(data, pos, skip_leading=True)
        if not token.isdigit():
            raise PnmFormatError(f"non-numeric header token {token!r}")
        fields.append(int(token))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PnmFormatError("image dimensions must be positive")
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise PnmFormatError("missing whitespace after maxval")
    pos += 1
    payload = data[pos:]
    if magic == b"P6":
        if maxval != 255:
            raise PnmFormatError(f"unsupported P6 maxval {maxval}")
        expected = width * height * 3
        if len(payload) != expected:
            raise PnmFormatError(f"payload is {len(payload)} bytes, expected {expected}")
        px = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3)
        return RasterImage(px.copy(), 8)
    if maxval == 255:
        expected = width * height
        if len(payload) != expected:
            raise PnmFormatError(f"payload is {len(payload)} bytes, expected {expected}")
        px = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
        return RasterImage(px.copy(), 8)
    if maxval == 65535:
        expected = width * height * 2
        if len(payload) != expected:
            raise PnmFormatError(f"payload is {len(payload)} bytes, expected {expected}")
        px = np.frombuffer(payload, dtype=">u2").astype(np.uint16).reshape(height, width)
        return RasterImage(px, 16)
    raise PnmFormatError(f"unsupported P5 maxval {maxval}")


def write_pnm(image: RasterImage, path) -> None:
    """Write the canonical byte representation for the image's format."""
    if image.channels == 3:
        magic, maxval = b"P6", 255
        payload = image.pixels.tobytes()
    elif image.depth == 8:
        magic, maxval = b"P5", 255
        payload = image.pixels.tobytes()
    else:
        magic, maxval = b"P5", 65535
        payload = image.pixels.astype(">u2").tobytes()
    header = b"%s %d %d %d\n" % (magic, image.width, image.height, maxval)
    Path(path).write_bytes(header + payload)
