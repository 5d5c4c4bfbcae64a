# systems/symbolic.py

"""
The block point omega of the shift and its orbit.

omega concatenates blocks of the given lengths; even-indexed blocks are all
zeros and odd-indexed blocks alternate 0101...; after the last block its
pattern continues indefinitely. The k-th orbit point is the window
omega[k : k + depth], encoded with its first symbol as the most significant bit.
"""

import logging
from typing import List, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def block_symbols(blocks: Sequence[int], length: int) -> np.ndarray:
    """First ``length`` symbols of omega as a uint8 array"""
    symbols = np.zeros(length, dtype=np.uint8)
    position = 0
    for index, size in enumerate(blocks):
        if position >= length:
            break
        end = min(position + size, length) if index < len(blocks) - 1 else length
        if index % 2 == 1:
            symbols[position:end] = np.arange(end - position) % 2
        position = end
    return symbols


def window_codes(symbols: np.ndarray, depth: int, count: int) -> np.ndarray:
    """Integer codes of the first ``count`` windows of width depth"""
    windows = np.lib.stride_tricks.sliding_window_view(symbols[:count + depth - 1], depth)
    weights = np.left_shift(np.int64(1), np.arange(depth - 1, -1, -1, dtype=np.int64))
    return windows.astype(np.int64) @ weights


def omega_orbit_codes(blocks: Sequence[int], depth: int, n: int) -> np.ndarray:
    return window_codes(block_symbols(blocks, n + depth - 1), depth, n)


def omega_prefix(blocks: Sequence[int], depth: int) -> str:
    """The depth-symbol word omega starts with (the shift orbit's initial point)"""
    return ''.join(str(s) for s in block_symbols(blocks, depth))


def block_end_frequencies(blocks: Sequence[int]) -> List[float]:
    """
    Frequency of symbol 1 in omega[0 : n_1 + ... + n_i] for every i, counted
    exactly from the block structure.
    """
    frequencies = []
    ones = 0
    total = 0
    for index, size in enumerate(blocks):
        if index % 2 == 1:
            ones += size // 2
        total += size
        frequencies.append(ones / total)
    return frequencies
