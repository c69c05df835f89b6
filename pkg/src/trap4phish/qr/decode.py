"""QR decoding for clean, axis-aligned bitmaps (as produced by qr_render,
possibly with bounded module corruption).

Finder patterns are located by the 1:1:3:1:1 run-ratio test in rows and
columns, the grid is sampled at module centers, format information is
BCH-corrected by nearest-codeword search, and each Reed-Solomon block is
corrected independently. The byte-mode bitstream is parsed strictly: pad
bytes after the terminator must alternate 0xEC/0x11, which turns nearly all
beyond-capacity miscorrections into loud failures.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import BadBitmap, FormatUnrecoverable, NoFinderPatterns, RsFailure, UnsupportedMode
from .gf256 import RsDecodeError, rs_decode
from .matrix import read_data_bits, read_format_words
from .render import QrBitmap
from .tables import (
    ALL_FORMAT_WORDS,
    BLOCK_STRUCTURE,
    MAX_VERSION,
    MIN_VERSION,
    blocks_of,
    count_indicator_bits,
    matrix_size,
)

_RATIOS = (1, 1, 3, 1, 1)


def qr_decode(bitmap: QrBitmap) -> bytes:
    """Decode a rendered QR bitmap back to its byte-mode payload."""
    binary = bitmap.pixels < 128
    clusters = _find_finder_centers(binary)
    tl, tr, bl, unit = _select_finders(clusters)
    refined = [_refine_center(binary, y, x, unit) for y, x in (tl, tr, bl)]
    tl, tr, bl = [(y, x) for y, x, _u in refined]
    unit = sum(u for _y, _x, u in refined) / 3.0
    modules, version = _sample_grid(binary, tl, tr, bl, unit)
    level, mask_id = _decode_format(modules)
    bits = read_data_bits(modules, mask_id, version)
    codewords = np.packbits(bits[: (len(bits) // 8) * 8]).tolist()
    data = _deinterleave_and_correct(codewords, version, level)
    return _parse_byte_mode(data, version)


_RATIO_ARR = np.array(_RATIOS, dtype=np.float64)


def _ratio_candidates(line: np.ndarray) -> list[tuple[float, float]]:
    """Centers of 1:1:3:1:1 dark/light/dark/light/dark run windows."""
    boundaries = np.flatnonzero(np.concatenate(([True], line[1:] != line[:-1], [True])))
    lengths = np.diff(boundaries)
    if len(lengths) < 5:
        return []
    starts = boundaries[:-1]
    dark_first = bool(line[0])
    windows = sliding_window_view(lengths, 5)
    units = windows.sum(axis=1) / 7.0
    tolerance = np.maximum(units * 0.75, 1.5)
    ok = (np.abs(windows - units[:, None] * _RATIO_ARR) <= tolerance[:, None]).all(axis=1)
    ok &= units >= 1.0
    # runs alternate, so window k starts dark iff k parity matches line[0]
    parity = np.arange(len(windows)) % 2
    ok &= parity == (0 if dark_first else 1)
    out = []
    for k in np.flatnonzero(ok):
        center = starts[k + 2] + lengths[k + 2] / 2.0
        out.append((float(center), float(units[k])))
    return out


def _find_finder_centers(binary: np.ndarray):
    """Cluster row/column ratio hits into candidate finder centers."""
    row_hits = []  # (y, x, unit)
    for y in range(binary.shape[0]):
        for x, unit in _ratio_candidates(binary[y]):
            row_hits.append((float(y), x, unit))
    col_hits = []
    for x in range(binary.shape[1]):
        for y, unit in _ratio_candidates(binary[:, x]):
            col_hits.append((y, float(x), unit))
    if not row_hits or not col_hits:
        raise NoFinderPatterns("no 1:1:3:1:1 run pattern found")

    # a candidate needs a perpendicular hit with matching center and unit
    col_arr = np.array(col_hits)
    points = []
    for y, x, unit in row_hits:
        dy = np.abs(col_arr[:, 0] - y)
        dx = np.abs(col_arr[:, 1] - x)
        du = np.maximum(col_arr[:, 2], unit) / np.minimum(col_arr[:, 2], unit)
        close = (dy <= unit) & (dx <= unit) & (du <= 1.5)
        if close.any():
            points.append((y, x, unit))
    if not points:
        raise NoFinderPatterns("row and column patterns never intersect")

    clusters: list[dict] = []
    for y, x, unit in points:
        for cluster in clusters:
            if abs(cluster["y"] - y) <= 1.5 * unit and abs(cluster["x"] - x) <= 1.5 * unit:
                w = cluster["weight"]
                cluster["y"] = (cluster["y"] * w + y) / (w + 1)
                cluster["x"] = (cluster["x"] * w + x) / (w + 1)
                cluster["unit"] = (cluster["unit"] * w + unit) / (w + 1)
                cluster["weight"] = w + 1
                break
        else:
            clusters.append({"y": y, "x": x, "unit": unit, "weight": 1})
    if len(clusters) < 3:
        raise NoFinderPatterns(f"found {len(clusters)} finder pattern(s), need 3")
    clusters.sort(key=lambda c: -c["weight"])
    return clusters[:12]


def _refine_center(binary: np.ndarray, y: float, x: float, unit: float):
    """Snap a cluster mean to the exact run-ratio center near it."""
    height, width = binary.shape
    for dy in sorted(range(-int(unit) - 1, int(unit) + 2), key=abs):
        row_idx = int(round(y)) + dy
        if not 0 <= row_idx < height:
            continue
        candidates = [(cx, u) for cx, u in _ratio_candidates(binary[row_idx])
                      if abs(cx - x) <= 2 * unit]
        if not candidates:
            continue
        x2, u2 = min(candidates, key=lambda c: abs(c[0] - x))
        col_idx = int(round(x2))
        if not 0 <= col_idx < width:
            continue
        vertical = [(cy, u) for cy, u in _ratio_candidates(binary[:, col_idx])
                    if abs(cy - y) <= 2 * unit]
        if not vertical:
            continue
        y2, u3 = min(vertical, key=lambda c: abs(c[0] - y))
        return y2, x2, (u2 + u3) / 2.0
    return y, x, unit


def _select_finders(clusters: list[dict]):
    """Pick the (top-left, top-right, bottom-left) triple: the heaviest
    cluster triple forming an upright L with equal arms."""
    import itertools

    best = None
    for combo in itertools.combinations(clusters, 3):
        for tl, tr, bl in itertools.permutations(combo, 3):
            v1x = tr["x"] - tl["x"]
            v1y = tr["y"] - tl["y"]
            v2x = bl["x"] - tl["x"]
            v2y = bl["y"] - tl["y"]
            if v1x <= 0 or v2y <= 0:
                continue
            if abs(v1y) > 0.15 * v1x or abs(v2x) > 0.15 * v2y:
                continue
            if abs(v1x - v2y) > 0.15 * max(v1x, v2y):
                continue
            weight = tl["weight"] + tr["weight"] + bl["weight"]
            asym = abs(v1y) + abs(v2x) + abs(v1x - v2y)
            key = (weight, -asym)
            if best is None or key > best[0]:
                best = (key, tl, tr, bl)
    if best is None:
        raise NoFinderPatterns("no upright finder triple found")
    _key, tl, tr, bl = best
    unit = (tl["unit"] + tr["unit"] + bl["unit"]) / 3.0
    return (tl["y"], tl["x"]), (tr["y"], tr["x"]), (bl["y"], bl["x"]), unit


def _sample_grid(binary: np.ndarray, tl, tr, bl, unit: float) -> tuple[np.ndarray, int]:
    span_h = tr[1] - tl[1]
    span_v = bl[0] - tl[0]
    if span_h <= 0 or span_v <= 0:
        raise NoFinderPatterns("degenerate finder geometry")
    size_est = (span_h + span_v) / 2.0 / unit + 7.0
    version = int(round((size_est - 17.0) / 4.0))
    version = min(max(version, MIN_VERSION), MAX_VERSION)
    size = matrix_size(version)
    if abs(size_est - size) > 2.5:
        raise BadBitmap(f"grid size estimate {size_est:.1f} does not match a supported version")
    m_h = span_h / (size - 7)
    m_v = span_v / (size - 7)
    rr = np.arange(size)
    # round half up: half-to-even would alternate across module boundaries
    ys = np.floor(tl[0] + (rr - 3) * m_v + 0.5).astype(int)
    xs = np.floor(tl[1] + (rr - 3) * m_h + 0.5).astype(int)
    if ys.min() < 0 or xs.min() < 0 or ys.max() >= binary.shape[0] or xs.max() >= binary.shape[1]:
        raise BadBitmap("sampling grid escapes the bitmap (missing quiet zone?)")
    modules = binary[np.ix_(ys, xs)]
    return modules, version


def _decode_format(modules: np.ndarray) -> tuple[str, int]:
    word_a, word_b = read_format_words(modules)
    best = None
    for (level, mask_id), codeword in ALL_FORMAT_WORDS.items():
        dist = min(
            bin(word_a ^ codeword).count("1"),
            bin(word_b ^ codeword).count("1"),
        )
        if best is None or dist < best[0]:
            best = (dist, level, mask_id)
    dist, level, mask_id = best
    if dist > 3:
        raise FormatUnrecoverable(f"format word distance {dist} exceeds BCH capacity")
    return level, mask_id


def _deinterleave_and_correct(codewords: list[int], version: int, level: str) -> list[int]:
    ec_per_block, _ = BLOCK_STRUCTURE[(version, level)]
    lens = blocks_of(version, level)
    n_blocks = len(lens)
    total_data = sum(lens)
    expected = total_data + n_blocks * ec_per_block
    if len(codewords) < expected:
        raise RsFailure(f"read {len(codewords)} codewords, expected {expected}")

    data_blocks: list[list[int]] = [[] for _ in lens]
    idx = 0
    for i in range(max(lens)):
        for b, dlen in enumerate(lens):
            if i < dlen:
                data_blocks[b].append(codewords[idx])
                idx += 1
    ec_blocks: list[list[int]] = [[] for _ in lens]
    for _i in range(ec_per_block):
        for b in range(n_blocks):
            ec_blocks[b].append(codewords[idx])
            idx += 1

    data: list[int] = []
    for b in range(n_blocks):
        try:
            data.extend(rs_decode(data_blocks[b] + ec_blocks[b], ec_per_block))
        except RsDecodeError as exc:
            raise RsFailure(f"block {b}: {exc}") from None
    return data


class _BitReader:
    def __init__(self, data: list[int]):
        self.data = data
        self.pos = 0  # bit position

    def take(self, width: int) -> int:
        if self.pos + width > len(self.data) * 8:
            raise UnsupportedMode("bitstream truncated")
        value = 0
        for _ in range(width):
            byte = self.data[self.pos // 8]
            value = (value << 1) | ((byte >> (7 - self.pos % 8)) & 1)
            self.pos += 1
        return value

    def remaining_bits(self) -> int:
        return len(self.data) * 8 - self.pos


def _parse_byte_mode(data: list[int], version: int) -> bytes:
    reader = _BitReader(data)
    payload = bytearray()
    while True:
        if reader.remaining_bits() < 4:
            break  # implicit terminator at capacity
        mode = reader.take(4)
        if mode == 0b0000:
            break
        if mode != 0b0100:
            raise UnsupportedMode(f"segment mode {mode:04b} not supported (byte mode only)")
        count = reader.take(count_indicator_bits(version))
        for _ in range(count):
            payload.append(reader.take(8))
    # strict padding: skip to byte boundary, then 0xEC/0x11 alternation
    if reader.pos % 8:
        if reader.take(8 - reader.pos % 8) != 0:
            raise UnsupportedMode("nonzero padding bits after terminator")
    expected = 0xEC
    while reader.remaining_bits() >= 8:
        if reader.take(8) != expected:
            raise UnsupportedMode("pad bytes do not alternate 0xEC/0x11")
        expected = 0x11 if expected == 0xEC else 0xEC
    return bytes(payload)
