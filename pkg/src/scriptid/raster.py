"""Binary and grayscale raster images: portable-map I/O, thresholding, dilation.

Pixel (0, 0) is the top-left corner; rows grow downward. Ink follows the
scanned-document convention: dark pixels are foreground. Rasters are
immutable after construction and every operation returns a new value, so
distinct images can be processed concurrently without locking.

Supported file formats are the plain and raw portable bitmap (P1/P4) and
portable graymap (P2/P5). Payloads are row-major, top to bottom; P4 rows are
padded to a byte boundary with the most significant bit first. Decoding is
bit-exact and save/load round-trips losslessly.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

__all__ = [
    "BinaryRaster",
    "GrayRaster",
    "PnmError",
    "PnmHeaderError",
    "PnmPayloadError",
    "load",
    "save",
    "binarize",
    "dilate",
]

_WHITESPACE = b" \t\r\n\x0b\x0c"


class PnmError(ValueError):
    """Problem decoding or encoding a portable-map file."""


class PnmHeaderError(PnmError):
    """Missing, unsupported, or malformed portable-map header."""


class PnmPayloadError(PnmError):
    """Pixel payload shorter than the header promises, or carrying bad data."""


class _Raster:
    """Immutable 2-D pixel grid shared by both raster kinds."""

    __slots__ = ("pixels",)

    def __init__(self, pixels):
        arr = self._coerce(pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("raster needs a non-empty 2-D pixel grid")
        arr.flags.writeable = False
        self.pixels = arr

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other):
        return type(other) is type(self) and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"{type(self).__name__}({self.width}x{self.height})"


class BinaryRaster(_Raster):
    """Rectangular grid of ink (True) / background (False) pixels."""

    @staticmethod
    def _coerce(pixels):
        return np.array(pixels, dtype=bool, copy=True)

    def ink_count(self) -> int:
        return int(self.pixels.sum())

    def ink_coords(self) -> np.ndarray:
        """Ink pixel coordinates as an (n, 2) array of (row, col), raster order."""
        return np.argwhere(self.pixels)

    @classmethod
    def blank(cls, height: int, width: int) -> "BinaryRaster":
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def from_strings(cls, rows) -> "BinaryRaster":
        """Build a raster from equal-length strings, '#'/'1'/'X' marking ink."""
        grid = []
        for row in rows:
            line = []
            for ch in row:
                if ch in "#1X":
                    line.append(True)
                elif ch in ".0 ":
                    line.append(False)
                else:
                    raise ValueError(f"unknown pixel character {ch!r}")
            grid.append(line)
        return cls(grid)


class GrayRaster(_Raster):
    """Rectangular grid of intensities in [0, 255]."""

    @staticmethod
    def _coerce(pixels):
        arr = np.array(pixels, copy=True)
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("intensities must lie in [0, 255]")
        return arr.astype(np.uint8)


def _skip_header_space(data: bytes, pos: int) -> int:
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    return pos


def _read_header_ints(data: bytes, pos: int, count: int):
    values = []
    for _ in range(count):
        pos = _skip_header_space(data, pos)
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise PnmHeaderError("malformed header: expected an unsigned integer")
        values.append(int(data[start:pos]))
    return values, pos


def _decode_plain_bits(data: bytes, pos: int, width: int, height: int) -> np.ndarray:
    bits = np.empty(width * height, dtype=bool)
    filled = 0
    n = len(data)
    while filled < bits.size and pos < n:
        c = data[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        elif c in (ord("0"), ord("1")):
            bits[filled] = c == ord("1")
            filled += 1
            pos += 1
        else:
            raise PnmPayloadError(f"unexpected byte {bytes([c])!r} in plain bitmap payload")
    if filled < bits.size:
        raise PnmPayloadError(
            f"truncated payload: header promises {bits.size} cells, file carries {filled}"
        )
    return bits.reshape(height, width)


def _decode_plain_values(data: bytes, pos: int, count: int, maxval: int) -> np.ndarray:
    values = np.empty(count, dtype=np.uint8)
    filled = 0
    n = len(data)
    while filled < count:
        pos = _skip_header_space(data, pos)
        start = pos
        while pos < n and data[pos : pos + 1].isdigit():
            pos += 1
        if start == pos:
            if pos < n:
                raise PnmPayloadError(
                    f"unexpected byte {data[pos:pos + 1]!r} in plain graymap payload"
                )
            raise PnmPayloadError(
                f"truncated payload: header promises {count} samples, file carries {filled}"
            )
        v = int(data[start:pos])
        if v > maxval:
            raise PnmPayloadError(f"sample {v} exceeds declared maxval {maxval}")
        values[filled] = v
        filled += 1
    return values


def _decode(data: bytes):
    if len(data) < 2:
        raise PnmHeaderError("empty or truncated file: no magic number")
    magic = data[:2]
    if magic not in (b"P1", b"P2", b"P4", b"P5"):
        raise PnmHeaderError(f"unsupported magic {magic!r} (P1/P2/P4/P5 expected)")

    (width, height), pos = _read_header_ints(data, 2, 2)
    if width < 1 or height < 1:
        raise PnmHeaderError(f"invalid dimensions {width}x{height}")

    if magic == b"P1":
        return BinaryRaster(_decode_plain_bits(data, pos, width, height))

    if magic == b"P2":
        (maxval,), pos = _read_header_ints(data, pos, 1)
        if not 1 <= maxval <= 255:
            raise PnmHeaderError(f"unsupported maxval {maxval} (1..255 expected)")
        samples = _decode_plain_values(data, pos, width * height, maxval)
        return GrayRaster(samples.reshape(height, width))

    # Raw formats: exactly one whitespace byte separates header and payload.
    if magic == b"P4":
        payload_at = pos + 1
    else:
        (maxval,), pos = _read_header_ints(data, pos, 1)
        if not 1 <= maxval <= 255:
            raise PnmHeaderError(f"unsupported maxval {maxval} (1..255 expected)")
        payload_at = pos + 1
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise PnmHeaderError("malformed header: missing whitespace before raw payload")

    if magic == b"P4":
        row_bytes = (width + 7) // 8
        need = row_bytes * height
        payload = data[payload_at : payload_at + need]
        if len(payload) < need:
            raise PnmPayloadError(
                f"truncated payload: need {need} bytes, file carries {len(payload)}"
            )
        packed = np.frombuffer(payload, dtype=np.uint8).reshape(height, row_bytes)
        bits = np.unpackbits(packed, axis=1)[:, :width]
        return BinaryRaster(bits.astype(bool))

    need = width * height
    payload = data[payload_at : payload_at + need]
    if len(payload) < need:
        raise PnmPayloadError(
            f"truncated payload: need {need} bytes, file carries {len(payload)}"
        )
    samples = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayRaster(samples)


def load(path):
    """Load a portable bitmap/graymap file into the matching raster type.

    Raises OSError when the file cannot be read, PnmHeaderError for a bad
    header, and PnmPayloadError for a short or corrupt payload.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    return _decode(data)


def _encode(raster, fmt: str) -> bytes:
    if fmt in ("p1", "p4"):
        if not isinstance(raster, BinaryRaster):
            raise ValueError(f"format {fmt} stores binary rasters only")
        if fmt == "p1":
            digits = np.where(raster.pixels, ord("1"), ord("0")).astype(np.uint8)
            body = b"\n".join(row.tobytes() for row in digits)
            return b"P1\n%d %d\n" % (raster.width, raster.height) + body + b"\n"
        packed = np.packbits(raster.pixels, axis=1)
        return b"P4\n%d %d\n" % (raster.width, raster.height) + packed.tobytes()
    if fmt in ("p2", "p5"):
        if not isinstance(raster, GrayRaster):
            raise ValueError(f"format {fmt} stores grayscale rasters only")
        if fmt == "p2":
            body = b"\n".join(
                b" ".join(b"%d" % v for v in row) for row in raster.pixels
            )
            return b"P2\n%d %d\n255\n" % (raster.width, raster.height) + body + b"\n"
        return b"P5\n%d %d\n255\n" % (raster.width, raster.height) + raster.pixels.tobytes()
    raise ValueError(f"unknown portable-map format {fmt!r}")


def save(raster, path, fmt: str | None = None):
    """Write a raster to disk; binary rasters default to raw P4, gray to P5."""
    if fmt is None:
        fmt = "p4" if isinstance(raster, BinaryRaster) else "p5"
    data = _encode(raster, fmt.lower())
    with open(path, "wb") as fh:
        fh.write(data)


def binarize(img: GrayRaster, threshold: int = 128) -> BinaryRaster:
    """Threshold a grayscale image; a cell is ink iff intensity < threshold."""
    if not isinstance(img, GrayRaster):
        raise TypeError("binarize expects a GrayRaster")
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold {threshold} outside [0, 255]")
    return BinaryRaster(img.pixels < threshold)


def dilate(img: BinaryRaster, radius: int = 1) -> BinaryRaster:
    """Expand ink by a square (Chebyshev) structuring element of given radius.

    The output is the union of the input ink with every cell at Chebyshev
    distance <= radius of an ink cell; dimensions are unchanged. Radius 0 is
    the identity. A single pass with the square element closes diagonal
    contour gaps, which is why it is the preprocessing default.
    """
    if not isinstance(img, BinaryRaster):
        raise TypeError("dilate expects a BinaryRaster")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0:
        return img
    side = 2 * radius + 1
    grown = ndimage.binary_dilation(img.pixels, structure=np.ones((side, side), dtype=bool))
    return BinaryRaster(grown)
