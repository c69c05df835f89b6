"""QR module-matrix construction: function patterns, format/version words,
zigzag data placement, the eight masks, and penalty scoring for mask choice.

Layouts, placement orders and mask grids are cached per version; callers must
treat the cached arrays as read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .tables import ALIGNMENT_CENTERS, format_info_bits, matrix_size, version_info_bits

MASK_FUNCTIONS = (
    lambda r, c: (r + c) % 2 == 0,
    lambda r, c: r % 2 == 0,
    lambda r, c: c % 3 == 0,
    lambda r, c: (r + c) % 3 == 0,
    lambda r, c: (r // 2 + c // 3) % 2 == 0,
    lambda r, c: (r * c) % 2 + (r * c) % 3 == 0,
    lambda r, c: ((r * c) % 2 + (r * c) % 3) % 2 == 0,
    lambda r, c: ((r * c) % 3 + (r + c) % 2) % 2 == 0,
)


@dataclass
class QrMatrix:
    version: int
    size: int
    ec_level: str
    mask_id: int
    modules: np.ndarray  # size x size bool grid, True = dark

    def __post_init__(self):
        assert self.size == matrix_size(self.version)
        assert self.modules.shape == (self.size, self.size)


@lru_cache(maxsize=None)
def function_layout(version: int) -> tuple[np.ndarray, np.ndarray]:
    """(reserved, base) for a version: `reserved` marks every function module
    (including format/version areas), `base` holds their dark/light values
    except the format/version words themselves."""
    n = matrix_size(version)
    reserved = np.zeros((n, n), dtype=bool)
    base = np.zeros((n, n), dtype=bool)

    def set_module(r: int, c: int, dark: bool):
        reserved[r, c] = True
        base[r, c] = dark

    def finder(r0: int, c0: int):
        for dr in range(-1, 8):
            for dc in range(-1, 8):
                r, c = r0 + dr, c0 + dc
                if not (0 <= r < n and 0 <= c < n):
                    continue
                dark = (
                    0 <= dr <= 6 and 0 <= dc <= 6
                    and (dr in (0, 6) or dc in (0, 6) or (2 <= dr <= 4 and 2 <= dc <= 4))
                )
                set_module(r, c, dark)

    finder(0, 0)
    finder(0, n - 7)
    finder(n - 7, 0)

    # alignment patterns (skip the three that would overlap a finder)
    centers = ALIGNMENT_CENTERS[version]
    for rc in centers:
        for cc in centers:
            if reserved[rc, cc]:
                continue
            for dr in range(-2, 3):
                for dc in range(-2, 3):
                    dark = max(abs(dr), abs(dc)) != 1
                    set_module(rc + dr, cc + dc, dark)

    # timing patterns (alignment modules on row/col 6 carry the same values)
    for i in range(8, n - 8):
        dark = i % 2 == 0
        if not reserved[6, i]:
            set_module(6, i, dark)
        if not reserved[i, 6]:
            set_module(i, 6, dark)

    # dark module
    set_module(n - 8, 8, True)

    # format info areas (values set later per mask)
    for r, c in _format_positions_a(n) + _format_positions_b(n):
        reserved[r, c] = True

    # version info areas
    if version >= 7:
        for i in range(18):
            reserved[i // 3, n - 11 + i % 3] = True
            reserved[n - 11 + i % 3, i // 3] = True

    reserved.setflags(write=False)
    base.setflags(write=False)
    return reserved, base


def _format_positions_a(n: int) -> list[tuple[int, int]]:
    """Positions of format bits 0..14, copy A (top-left column + row)."""
    positions = []
    for i in range(15):
        if i < 6:
            positions.append((i, 8))
        elif i < 8:
            positions.append((i + 1, 8))
        elif i == 8:
            positions.append((8, 7))
        else:
            positions.append((8, 14 - i))
    return positions


def _format_positions_b(n: int) -> list[tuple[int, int]]:
    """Positions of format bits 0..14, copy B (top-right row + bottom-left column)."""
    positions = []
    for i in range(15):
        if i < 8:
            positions.append((8, n - 1 - i))
        else:
            positions.append((n - 15 + i, 8))
    return positions


def place_format_info(modules: np.ndarray, level: str, mask_id: int) -> None:
    n = modules.shape[0]
    bits = format_info_bits(level, mask_id)
    for positions in (_format_positions_a(n), _format_positions_b(n)):
        for i, (r, c) in enumerate(positions):
            modules[r, c] = bool((bits >> i) & 1)


def read_format_words(modules: np.ndarray) -> tuple[int, int]:
    """Raw 15-bit words from both format copies (LSB = bit index 0)."""
    n = modules.shape[0]
    words = []
    for positions in (_format_positions_a(n), _format_positions_b(n)):
        w = 0
        for i, (r, c) in enumerate(positions):
            if modules[r, c]:
                w |= 1 << i
        words.append(w)
    return words[0], words[1]


def place_version_info(modules: np.ndarray, version: int) -> None:
    if version < 7:
        return
    n = modules.shape[0]
    bits = version_info_bits(version)
    for i in range(18):
        dark = bool((bits >> i) & 1)
        modules[i // 3, n - 11 + i % 3] = dark
        modules[n - 11 + i % 3, i // 3] = dark


@lru_cache(maxsize=None)
def data_positions(version: int) -> tuple[np.ndarray, np.ndarray]:
    """Zigzag order of the non-function modules: column pairs right to left
    (skipping the timing column), alternating upward and downward. Returned
    as (row_indices, col_indices) arrays."""
    reserved, _ = function_layout(version)
    n = reserved.shape[0]
    rows: list[int] = []
    cols: list[int] = []
    upward = True
    col = n - 1
    while col > 0:
        if col == 6:
            col -= 1
        row_iter = range(n - 1, -1, -1) if upward else range(n)
        for r in row_iter:
            for c in (col, col - 1):
                if not reserved[r, c]:
                    rows.append(r)
                    cols.append(c)
        upward = not upward
        col -= 2
    r_arr = np.array(rows, dtype=np.intp)
    c_arr = np.array(cols, dtype=np.intp)
    r_arr.setflags(write=False)
    c_arr.setflags(write=False)
    return r_arr, c_arr


@lru_cache(maxsize=None)
def mask_grid(version: int, mask_id: int) -> np.ndarray:
    n = matrix_size(version)
    grid = np.fromfunction(MASK_FUNCTIONS[mask_id], (n, n), dtype=np.int64)
    grid = grid.astype(bool)
    grid.setflags(write=False)
    return grid


def place_data(modules: np.ndarray, bits: np.ndarray, mask_id: int, version: int) -> None:
    rows, cols = data_positions(version)
    flips = mask_grid(version, mask_id)[rows, cols]
    modules[rows, cols] = bits.astype(bool) ^ flips


def read_data_bits(modules: np.ndarray, mask_id: int, version: int) -> np.ndarray:
    rows, cols = data_positions(version)
    flips = mask_grid(version, mask_id)[rows, cols]
    return (modules[rows, cols] ^ flips).astype(np.uint8)


_PATTERN_A = np.array([1, 0, 1, 1, 1, 0, 1, 0, 0, 0, 0], dtype=np.int8)
_PATTERN_B = _PATTERN_A[::-1].copy()


def penalty_score(modules: np.ndarray) -> int:
    """Mask evaluation penalty: runs, 2x2 blocks, finder-like patterns, and
    dark-ratio deviation."""
    n = modules.shape[0]
    score = 0
    m = modules.astype(np.int8)

    for grid in (m, m.T):
        # rule 1: each run of length L >= 5 scores 3 + (L - 5) = L - 2.
        # With W5/W6 = counts of all-equal windows of widths 5/6, the number
        # of long runs is W5 - W6 and sum(L - 4) over them is W5, so the rule
        # totals 3*W5 - 2*W6.
        same = grid[:, 1:] == grid[:, :-1]
        w5 = int(sliding_window_view(same, 4, axis=1).all(axis=2).sum())
        w6 = int(sliding_window_view(same, 5, axis=1).all(axis=2).sum()) if n >= 6 else 0
        score += 3 * w5 - 2 * w6
        # rule 3: finder-like 1:1:3:1:1 pattern flanked by a light quiet run
        if n >= 11:
            windows = sliding_window_view(grid, 11, axis=1)
            hits = (windows == _PATTERN_A).all(axis=2) | (windows == _PATTERN_B).all(axis=2)
            score += 40 * int(hits.sum())

    # rule 2: 2x2 blocks of one color
    same_block = (
        (modules[:-1, :-1] == modules[1:, :-1])
        & (modules[:-1, :-1] == modules[:-1, 1:])
        & (modules[:-1, :-1] == modules[1:, 1:])
    )
    score += 3 * int(same_block.sum())

    # rule 4: dark module proportion
    dark = int(modules.sum())
    percent = dark * 100 / (n * n)
    score += 10 * int(abs(percent - 50) // 5)
    return score
