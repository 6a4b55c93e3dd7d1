"""
Integer DCT-II for 4x4 up to 64x64 blocks and the 4-point lapping pre/post filter pair.

All arithmetic is int64 numpy with round-half-away shifts so that the encoder and
decoder produce the same coefficients on every platform.
"""

import logging
import math
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .transformModels import BLOCK_SIZES, COEFF_SHIFT, CoeffBlock, LappedFilterParams
from ..util import round_shift

logger = logging.getLogger(__name__)

BASIS_BITS = 20
DEFAULT_LAPPING = LappedFilterParams()

Block = Tuple[int, int, int]


@lru_cache(maxsize=None)
def dct_basis(size: int) -> np.ndarray:
    """
    Returns the orthonormal DCT-II basis of a size, scaled by 2**20 and rounded.

    Args:
        size (int): Block size.

    Returns:
        np.ndarray: int64 matrix, row k holds basis function k.
    """
    if size not in BLOCK_SIZES:
        raise ValueError(f"Unsupported transform size <{size}>.")
    k = np.arange(size).reshape(-1, 1)
    n = np.arange(size).reshape(1, -1)
    scale = np.where(k == 0, math.sqrt(1.0 / size), math.sqrt(2.0 / size))
    basis = scale * np.cos(np.pi * (2 * n + 1) * k / (2 * size)) * (1 << BASIS_BITS)
    basis = np.sign(basis) * np.floor(np.abs(basis) + 0.5)
    basis = basis.astype(np.int64)
    basis.setflags(write=False)
    return basis


def dct2d(samples: np.ndarray) -> np.ndarray:
    """
    Orthonormal 2-D DCT of an integer block, no change of precision.
    """
    basis = dct_basis(samples.shape[0])
    rows = round_shift(basis @ samples.astype(np.int64), BASIS_BITS)
    return round_shift(rows @ basis.T, BASIS_BITS)


def idct2d(coeffs: np.ndarray) -> np.ndarray:
    """
    Inverse of dct2d.
    """
    basis = dct_basis(coeffs.shape[0])
    rows = round_shift(basis.T @ coeffs.astype(np.int64), BASIS_BITS)
    return round_shift(rows @ basis, BASIS_BITS)


def dct_forward(block: np.ndarray) -> CoeffBlock:
    """
    Transforms a block of samples, adding COEFF_SHIFT fractional bits.

    Args:
        block (np.ndarray): N x N integer samples.

    Returns:
        CoeffBlock: The coefficients.
    """
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise ValueError(f"Block of shape <{block.shape}> is not square.")
    coeffs = dct2d(block.astype(np.int64) << COEFF_SHIFT)
    return CoeffBlock(size=block.shape[0], coeffs=coeffs)


def dct_inverse(block: CoeffBlock) -> np.ndarray:
    """
    Inverse transform back to samples, dropping the COEFF_SHIFT fractional bits.

    Args:
        block (CoeffBlock): The coefficients.

    Returns:
        np.ndarray: N x N int64 samples.
    """
    return round_shift(idct2d(block.coeffs), COEFF_SHIFT)


def _lift_forward(x0, x1, x2, x3, params: LappedFilterParams):
    t3 = x0 - x3
    t2 = x1 - x2
    t0 = x0 - (t3 >> 1)
    t1 = x1 - (t2 >> 1)
    t2 = (t2 * params.scale_num) // params.scale_den
    t3 = t3 + ((t2 * params.shear_outer + 32) >> 6)
    t2 = t2 + ((t3 * params.shear_inner + 32) >> 6)
    x0 = t0 + (t3 >> 1)
    x1 = t1 + (t2 >> 1)
    return x0, x1, x1 - t2, x0 - t3


def _lift_inverse(x0, x1, x2, x3, params: LappedFilterParams):
    t3 = x0 - x3
    t2 = x1 - x2
    t0 = x0 - (t3 >> 1)
    t1 = x1 - (t2 >> 1)
    t2 = t2 - ((t3 * params.shear_inner + 32) >> 6)
    t3 = t3 - ((t2 * params.shear_outer + 32) >> 6)
    # ceil(t2 * den / num) is the exact left inverse of the floor scaling when num >= den
    t2 = -((-t2 * params.scale_den) // params.scale_num)
    x0 = t0 + (t3 >> 1)
    x1 = t1 + (t2 >> 1)
    return x0, x1, x1 - t2, x0 - t3


def lift_forward_float(x0, x1, x2, x3, params: LappedFilterParams):
    """
    Real-valued version of the prefilter lifting, used for coding gain analysis.
    """
    t3 = x0 - x3
    t2 = x1 - x2
    t0 = x0 - t3 / 2
    t1 = x1 - t2 / 2
    t2 = t2 * params.scale_num / params.scale_den
    t3 = t3 + t2 * params.shear_outer / 64
    t2 = t2 + t3 * params.shear_inner / 64
    x0 = t0 + t3 / 2
    x1 = t1 + t2 / 2
    return x0, x1, x1 - t2, x0 - t3


def block_id_map(layout: Iterable[Block], shape: Tuple[int, int]) -> np.ndarray:
    """
    Labels every pixel with the index of the transform block covering it.

    Args:
        layout (Iterable[Block]): (y, x, size) of every block.
        shape (Tuple[int, int]): Plane shape.

    Returns:
        np.ndarray: int32 map of block indices.
    """
    ids = np.full(shape, -1, dtype=np.int32)
    for index, (y, x, size) in enumerate(layout):
        ids[y:y + size, x:x + size] = index
    if (ids < 0).any():
        raise ValueError(f"Block layout does not cover the plane of shape <{shape}>.")
    return ids


def lapping_edge_map(layout: Iterable[Block], shape: Tuple[int, int]) -> Tuple[List[Tuple[int, np.ndarray]],
                                                                              List[Tuple[int, np.ndarray]]]:
    """
    Finds the interior transform-block edges of a plane.

    Args:
        layout (Iterable[Block]): (y, x, size) of every block.
        shape (Tuple[int, int]): Plane shape, multiples of 4.

    Returns:
        Tuple: (vertical, horizontal) edges. A vertical edge is (x, rows) with the boundary
        between columns x - 1 and x; a horizontal edge is (y, cols).
    """
    ids = block_id_map(layout, shape)
    height, width = shape
    vertical = []
    for x in range(4, width, 4):
        rows = np.nonzero(ids[:, x - 1] != ids[:, x])[0]
        if rows.size:
            vertical.append((x, rows))
    horizontal = []
    for y in range(4, height, 4):
        cols = np.nonzero(ids[y - 1, :] != ids[y, :])[0]
        if cols.size:
            horizontal.append((y, cols))
    return vertical, horizontal


def prefilter_plane(plane: np.ndarray, layout: Sequence[Block],
                    params: Optional[LappedFilterParams] = None) -> np.ndarray:
    """
    Applies the lapping prefilter across every interior block edge.

    Vertical edges are filtered first, then horizontal ones. Frame borders are never filtered.

    Args:
        plane (np.ndarray): Integer plane.
        layout (Sequence[Block]): Transform blocks tiling the plane.
        params (LappedFilterParams, optional): Lifting coefficients.

    Returns:
        np.ndarray: The filtered plane (int64 copy).
    """
    params = params or DEFAULT_LAPPING
    out = plane.astype(np.int64, copy=True)
    vertical, horizontal = lapping_edge_map(layout, out.shape)
    for x, rows in vertical:
        lanes = _lift_forward(*(out[rows, x + offset] for offset in (-2, -1, 0, 1)), params)
        for offset, lane in zip((-2, -1, 0, 1), lanes):
            out[rows, x + offset] = lane
    for y, cols in horizontal:
        lanes = _lift_forward(*(out[y + offset, cols] for offset in (-2, -1, 0, 1)), params)
        for offset, lane in zip((-2, -1, 0, 1), lanes):
            out[y + offset, cols] = lane
    return out


def postfilter_plane(plane: np.ndarray, layout: Sequence[Block],
                     params: Optional[LappedFilterParams] = None) -> np.ndarray:
    """
    Exact inverse of prefilter_plane: horizontal edges are undone first, then vertical ones.
    """
    params = params or DEFAULT_LAPPING
    out = plane.astype(np.int64, copy=True)
    vertical, horizontal = lapping_edge_map(layout, out.shape)
    for y, cols in reversed(horizontal):
        lanes = _lift_inverse(*(out[y + offset, cols] for offset in (-2, -1, 0, 1)), params)
        for offset, lane in zip((-2, -1, 0, 1), lanes):
            out[y + offset, cols] = lane
    for x, rows in reversed(vertical):
        lanes = _lift_inverse(*(out[rows, x + offset] for offset in (-2, -1, 0, 1)), params)
        for offset, lane in zip((-2, -1, 0, 1), lanes):
            out[rows, x + offset] = lane
    return out


def coding_gain(variances: Sequence[float]) -> float:
    """
    Coding gain in dB: ratio of the arithmetic to the geometric mean of coefficient variances.

    Args:
        variances (Sequence[float]): Positive variances.

    Returns:
        float: 10 * log10(AM / GM).
    """
    values = np.asarray(variances, dtype=np.float64)
    return float(10.0 * np.log10(values.mean() / np.exp(np.log(values).mean())))


def lapped_analysis_matrix(size: int, params: Optional[LappedFilterParams]) -> np.ndarray:
    """
    1-D analysis operator of one block with lapping on both edges.

    Args:
        size (int): Block size.
        params (LappedFilterParams, optional): Lifting coefficients, None for the plain DCT.

    Returns:
        np.ndarray: size x (size + 4) matrix mapping samples x[-2 .. size + 1] to coefficients.
    """
    basis = dct_basis(size).astype(np.float64) / (1 << BASIS_BITS)
    operator = np.zeros((size, size + 4))
    for j in range(size + 4):
        impulse = np.zeros(size + 4)
        impulse[j] = 1.0
        block = impulse[2:size + 2].copy()
        if params is not None:
            left = lift_forward_float(*impulse[0:4], params)
            right = lift_forward_float(*impulse[size:size + 4], params)
            block[0], block[1] = left[2], left[3]
            block[-2], block[-1] = right[0], right[1]
        operator[:, j] = basis @ block
    return operator


def ar1_coding_gain(size: int, rho: float, params: Optional[LappedFilterParams] = None) -> float:
    """
    Coding gain of a (lapped) 1-D DCT on a unit-variance AR(1) source.

    Args:
        size (int): Block size.
        rho (float): Correlation coefficient of the source.
        params (LappedFilterParams, optional): Lapping coefficients, None for the plain DCT.

    Returns:
        float: Coding gain in dB.
    """
    operator = lapped_analysis_matrix(size, params)
    lags = np.abs(np.subtract.outer(np.arange(size + 4), np.arange(size + 4)))
    covariance = rho ** lags
    variances = np.einsum("ki,ij,kj->k", operator, covariance, operator)
    return coding_gain(variances)


def synthesize_basis(size: int, row: int, col: int, amplitude: int = 1 << 12,
                     params: Optional[LappedFilterParams] = None) -> np.ndarray:
    """
    Synthesizes the spatial image of one coefficient of the centre block in a 3 x 3 block grid.

    Args:
        size (int): Block size.
        row (int): Vertical frequency index.
        col (int): Horizontal frequency index.
        amplitude (int): Value given to the coefficient.
        params (LappedFilterParams, optional): Lifting coefficients.

    Returns:
        np.ndarray: 3N x 3N int64 plane after inverse DCT and postfilter.
    """
    plane = np.zeros((3 * size, 3 * size), dtype=np.int64)
    coeffs = np.zeros((size, size), dtype=np.int64)
    coeffs[row, col] = amplitude
    plane[size:2 * size, size:2 * size] = idct2d(coeffs)
    layout = [(y, x, size) for y in range(0, 3 * size, size) for x in range(0, 3 * size, size)]
    return postfilter_plane(plane, layout, params)
