"""Noise-free grayscale rendering of QR matrices and PGM (P5) serialization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import QrMatrix

DEFAULT_MODULE_PX = 8
DEFAULT_QUIET_ZONE = 4


@dataclass
class QrBitmap:
    width: int
    height: int
    pixels: np.ndarray  # uint8, 0 = dark, 255 = light, row-major
    module_px: int
    quiet_zone: int

    def __post_init__(self):
        assert self.pixels.shape == (self.height, self.width)


def qr_render(matrix: QrMatrix, module_px: int = DEFAULT_MODULE_PX,
              quiet_zone: int = DEFAULT_QUIET_ZONE) -> QrBitmap:
    """Axis-aligned rendering with a light quiet zone; deterministic."""
    if module_px < 1:
        raise ValueError("module_px must be >= 1")
    if quiet_zone < 0:
        raise ValueError("quiet_zone must be >= 0")
    total = (matrix.size + 2 * quiet_zone) * module_px
    pixels = np.full((total, total), 255, dtype=np.uint8)
    dark = np.kron(matrix.modules, np.ones((module_px, module_px), dtype=bool))
    offset = quiet_zone * module_px
    span = matrix.size * module_px
    region = pixels[offset:offset + span, offset:offset + span]
    region[dark] = 0
    return QrBitmap(total, total, pixels, module_px, quiet_zone)


def to_pgm(bitmap: QrBitmap) -> bytes:
    header = f"P5\n{bitmap.width} {bitmap.height}\n255\n".encode("ascii")
    return header + bitmap.pixels.tobytes()


def from_pgm(data: bytes) -> QrBitmap:
    """Parse binary PGM (P5). Comments and arbitrary whitespace allowed in
    the header; module_px/quiet_zone are unknown and set to 0."""
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM (P5) file")
    pos = 2
    fields = []
    while len(fields) < 3:
        # skip whitespace and comments
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            pos = len(data) if eol < 0 else eol + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        fields.append(data[start:pos])
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError:
        raise ValueError("malformed PGM header") from None
    if maxval != 255:
        raise ValueError("only 8-bit PGM supported")
    pos += 1  # single whitespace byte after maxval
    raw = data[pos:pos + width * height]
    if len(raw) != width * height:
        raise ValueError("truncated PGM pixel data")
    pixels = np.frombuffer(raw, dtype=np.uint8).reshape(height, width)
    return QrBitmap(width, height, pixels.copy(), 0, 0)
