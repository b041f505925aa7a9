"""Grayscale/binary image primitives: PGM I/O, flips, padding, statistics.

Conventions used across the package:

* grayscale image: 2-D ``uint8`` array, row-major, intensities in 0..255
* binary image: 2-D ``bool`` array, ``True`` marks foreground
* histogram: length-256 ``int64`` array of intensity counts

All functions are pure and return freshly allocated arrays, so results can
be shared between threads without copying.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "PgmError",
    "as_gray",
    "read_pgm",
    "write_pgm",
    "flip_vertical",
    "flip_horizontal",
    "pad_to_multiple",
    "crop",
    "histogram",
    "variance",
]

_WHITESPACE = b" \t\n\r\x0b\x0c"


class PgmError(ValueError):
    """Raised for malformed PGM data."""


def as_gray(img) -> np.ndarray:
    """Validate and coerce an array-like into a 2-D uint8 grayscale image."""
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("expected a non-empty 2-D grayscale image")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"grayscale pixels must be integers, got {arr.dtype}")
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError("grayscale pixel values must lie in 0..255")
        arr = arr.astype(np.uint8)
    return arr


def read_pgm(data: bytes) -> np.ndarray:
    """Parse binary (P5) or ASCII (P2) PGM bytes into a grayscale image.

    Header comments (``#`` to end of line) are skipped. Only maxval <= 255
    is accepted; samples are kept as stored, without rescaling.
    """
    buf = bytes(data)
    pos = 0

    def skip_separators() -> None:
        nonlocal pos
        while pos < len(buf):
            if buf[pos] in _WHITESPACE:
                pos += 1
            elif buf[pos : pos + 1] == b"#":
                while pos < len(buf) and buf[pos] not in b"\r\n":
                    pos += 1
            else:
                return

    def token(what: str) -> bytes:
        nonlocal pos
        skip_separators()
        start = pos
        while pos < len(buf) and buf[pos] not in _WHITESPACE and buf[pos : pos + 1] != b"#":
            pos += 1
        if pos == start:
            raise PgmError(f"truncated header: missing {what}")
        return buf[start:pos]

    def integer(what: str) -> int:
        tok = token(what)
        if not tok.isdigit():
            raise PgmError(f"non-numeric {what} token {tok!r}")
        return int(tok)

    magic = token("magic number")
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"malformed magic number {magic!r}")
    width = integer("width")
    height = integer("height")
    maxval = integer("maxval")
    if width < 1 or height < 1:
        raise PgmError(f"image dimensions must be positive, got {width}x{height}")
    if maxval > 255:
        raise PgmError(f"maxval {maxval} exceeds the 8-bit limit of 255")
    if maxval < 1:
        raise PgmError(f"maxval must be positive, got {maxval}")

    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the maxval from the payload
        if pos >= len(buf) or buf[pos] not in _WHITESPACE:
            raise PgmError("missing whitespace between maxval and pixel payload")
        pos += 1
        payload = buf[pos : pos + count]
        if len(payload) < count:
            raise PgmError(
                f"truncated payload: expected {count} bytes, got {len(payload)}"
            )
        return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()

    samples = np.empty(count, dtype=np.uint8)
    for i in range(count):
        try:
            tok = token("sample")
        except PgmError:
            raise PgmError(
                f"truncated payload: expected {count} samples, got {i}"
            ) from None
        if not tok.isdigit():
            raise PgmError(f"non-numeric sample token {tok!r}")
        value = int(tok)
        if value > maxval:
            raise PgmError(f"sample value {value} exceeds maxval {maxval}")
        samples[i] = value
    return samples.reshape(height, width)


def write_pgm(img) -> bytes:
    """Serialize a grayscale or binary image as binary (P5) PGM bytes.

    Binary images map background to 0 and foreground to 255. The output is
    bit-exact: ``P5\\n{width} {height}\\n255\\n`` followed by the raw
    row-major payload, so ``read_pgm(write_pgm(x))`` reproduces ``x``.
    """
    arr = np.asarray(img)
    if arr.dtype == np.bool_:
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("expected a non-empty 2-D binary image")
        arr = np.where(arr, np.uint8(255), np.uint8(0))
    else:
        arr = as_gray(arr)
    height, width = arr.shape
    return b"P5\n%d %d\n255\n" % (width, height) + arr.tobytes()


def flip_vertical(img) -> np.ndarray:
    """Reverse row order (row r becomes row height-1-r)."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D image")
    return arr[::-1].copy()


def flip_horizontal(img) -> np.ndarray:
    """Reverse column order (column c becomes column width-1-c)."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D image")
    return arr[:, ::-1].copy()


def pad_to_multiple(
    img, block_w: int, block_h: int
) -> tuple[np.ndarray, tuple[int, int]]:
    """Grow an image to the next multiple of the block size by edge replication.

    Returns ``(padded, (width, height))`` where the second item records the
    original dimensions for a later :func:`crop`.
    """
    arr = as_gray(img)
    if block_w < 1 or block_h < 1:
        raise ValueError("block dimensions must be positive")
    height, width = arr.shape
    extra_h = -height % block_h
    extra_w = -width % block_w
    if extra_h or extra_w:
        padded = np.pad(arr, ((0, extra_h), (0, extra_w)), mode="edge")
    else:
        padded = arr.copy()
    return padded, (width, height)


def crop(img, width: int, height: int) -> np.ndarray:
    """Return the top-left width x height sub-rectangle."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D image")
    if not (1 <= width <= arr.shape[1] and 1 <= height <= arr.shape[0]):
        raise ValueError(
            f"crop {width}x{height} out of bounds for "
            f"{arr.shape[1]}x{arr.shape[0]} image"
        )
    return arr[:height, :width].copy()


def histogram(img) -> np.ndarray:
    """Count pixels per intensity; returns a length-256 int64 array."""
    arr = as_gray(img)
    return np.bincount(arr.ravel(), minlength=256).astype(np.int64)


def variance(img) -> float:
    """Population variance of the intensities (mean squared deviation)."""
    arr = as_gray(img)
    return float(np.var(arr.astype(np.float64)))
