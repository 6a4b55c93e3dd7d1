"""
Size, ranking and unranking of the pyramid codebook {y in Z^N : |y|_1 = K}.

Codewords are ordered by their first component (0, +1, -1, +2, -2, ...) and then
recursively by the rest, which gives a bijection onto [0, V(N, K)).
"""

import threading
from typing import List, Sequence

import numpy as np

from ..exceptions import CorruptStreamError


class _CodebookTable:
    """
    Grows the V(n, k) table on demand. Row n holds V(n, 0..k_max).

    Growth happens under a lock and entries are only appended once final, so a lookup that
    fits the row it reads needs no lock.
    """

    def __init__(self):
        self.rows: List[List[int]] = [[1]]
        self._lock = threading.Lock()

    def ensure(self, n: int, k: int) -> None:
        with self._lock:
            width = len(self.rows[0])
            if k >= width:
                self.rows[0].extend([0] * (k + 1 - width))
                for row_index in range(1, len(self.rows)):
                    previous, row = self.rows[row_index - 1], self.rows[row_index]
                    for j in range(width, k + 1):
                        row.append(previous[j] + row[j - 1] + previous[j - 1])
            while len(self.rows) <= n:
                previous = self.rows[-1]
                row = [1]
                for j in range(1, len(previous)):
                    row.append(previous[j] + row[j - 1] + previous[j - 1])
                self.rows.append(row)

    def get(self, n: int, k: int) -> int:
        rows = self.rows
        if n < len(rows):
            row = rows[n]
            if k < len(row):
                return row[k]
        self.ensure(n, k)
        return self.rows[n][k]


_TABLE = _CodebookTable()


def codebook_size(n: int, k: int) -> int:
    """
    Number of integer vectors of dimension n with L1 norm k.

    V(n, 0) = 1, V(0, k > 0) = 0 and V(n, k) = V(n-1, k) + V(n, k-1) + V(n-1, k-1).

    Args:
        n (int): Dimension.
        k (int): Number of pulses.

    Returns:
        int: V(n, k), arbitrary precision.
    """
    if n < 0 or k < 0:
        raise ValueError(f"Invalid codebook <V({n}, {k})>.")
    return _TABLE.get(n, k)


def rank(y: Sequence[int]) -> int:
    """
    Index of a pulse vector in its codebook.

    Args:
        y (Sequence[int]): The vector.

    Returns:
        int: Rank in [0, V(len(y), |y|_1)).
    """
    values = [int(value) for value in y]
    k = sum(abs(value) for value in values)
    n = len(values)
    index = 0
    for position, value in enumerate(values):
        rest = n - position - 1
        magnitude = abs(value)
        if magnitude:
            index += codebook_size(rest, k)
            for j in range(1, magnitude):
                index += 2 * codebook_size(rest, k - j)
            if value < 0:
                index += codebook_size(rest, k - magnitude)
            k -= magnitude
    return index


def unrank(n: int, k: int, index: int) -> np.ndarray:
    """
    Pulse vector with a given rank.

    Args:
        n (int): Dimension.
        k (int): Number of pulses.
        index (int): Rank, below V(n, k).

    Returns:
        np.ndarray: The int64 vector.
    """
    if not 0 <= index < codebook_size(n, k):
        raise CorruptStreamError(f"Rank <{index}> is outside the codebook V({n}, {k}).")
    y = np.zeros(n, dtype=np.int64)
    for position in range(n):
        rest = n - position - 1
        if k == 0:
            break
        zero_block = codebook_size(rest, k)
        if index < zero_block:
            continue
        index -= zero_block
        magnitude = 1
        while True:
            block = codebook_size(rest, k - magnitude)
            if index < block:
                y[position] = magnitude
                break
            index -= block
            if index < block:
                y[position] = -magnitude
                break
            index -= block
            magnitude += 1
        k -= magnitude
    return y
