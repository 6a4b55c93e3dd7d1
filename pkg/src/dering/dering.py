"""
Directional deringing filter applied to decoded planes.

Every 8x8 block gets a direction (eight lines at 22.5 degree steps) from its decoded pixels.
A conditional replacement filter runs along that direction (stage 1, 7 taps) and then
across it on one axis (stage 2, 5 taps), rejecting every tap whose difference from the
centre pixel reaches the threshold. Stage 1 reads the unfiltered plane, stage 2 reads the
plane-wide stage-1 output. No side information besides the thresholds is coded.

Direction indices (angle measured counterclockwise from the horizontal, rows grow down):
0 = 45, 1 = 22.5, 2 = 0, 3 = -22.5, 4 = -45, 5 = -67.5, 6 = 90, 7 = 67.5 degrees.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .deringModels import LEVEL_FACTORS, DeringParams, DirectionMap
from ..util import round_shift

logger = logging.getLogger(__name__)

BLOCK = 8
PAD = 3
# Value of out-of-plane taps; far enough from any pixel to always be rejected.
SENTINEL = 1 << 14
# Common multiple of all line lengths, keeps the direction cost integral.
COST_SCALE = 840

_ROWS, _COLS = np.mgrid[0:BLOCK, 0:BLOCK]
LINE_INDEX = (
    _ROWS + _COLS,
    _ROWS + _COLS // 2,
    _ROWS,
    3 + _ROWS - _COLS // 2,
    7 + _ROWS - _COLS,
    3 - _ROWS // 2 + _COLS,
    _COLS,
    _ROWS // 2 + _COLS,
)
LINE_WEIGHTS = tuple(COST_SCALE // np.bincount(index.ravel()) for index in LINE_INDEX)

# (dy, dx) of the taps at distance 1, 2, 3 along each direction; the opposite taps are mirrored.
DIRECTION_TAPS = (
    ((-1, 1), (-2, 2), (-3, 3)),
    ((0, 1), (-1, 2), (-1, 3)),
    ((0, 1), (0, 2), (0, 3)),
    ((0, 1), (1, 2), (1, 3)),
    ((1, 1), (2, 2), (3, 3)),
    ((1, 0), (2, 1), (3, 1)),
    ((1, 0), (2, 0), (3, 0)),
    ((1, 0), (2, -1), (3, -1)),
)
STAGE1_WEIGHTS = (3, 2, 1)
STAGE1_SHIFT = 4
STAGE2_WEIGHTS = (2, 1)
STAGE2_SHIFT = 3
# Directions whose second stage runs vertically; all others run horizontally.
VERTICAL_SECOND_STAGE = (1, 2, 3)


def default_threshold(q: int) -> int:
    """
    Global threshold used when the encoder is not told otherwise: min(255, round(Q^0.7)).
    """
    return min(255, int(q ** 0.7 + 0.5))


def direction_costs(block: np.ndarray) -> np.ndarray:
    """
    Cost of every direction: 840 times the squared deviation of the pixels from the mean of
    their line, summed over the block.

    Args:
        block (np.ndarray): 8x8 pixels.

    Returns:
        np.ndarray: Eight int64 costs.
    """
    x = block.astype(np.int64)
    total = COST_SCALE * int((x * x).sum())
    flat = x.ravel()
    costs = np.empty(8, dtype=np.int64)
    for d, index in enumerate(LINE_INDEX):
        sums = np.bincount(index.ravel(), weights=flat).astype(np.int64)
        costs[d] = total - int((sums * sums * LINE_WEIGHTS[d]).sum())
    return costs


def detect_direction(block: np.ndarray) -> Tuple[int, int]:
    """
    Finds the direction whose lines best follow the block content.

    Args:
        block (np.ndarray): 8x8 decoded pixels.

    Returns:
        Tuple[int, int]: The direction (lowest index on ties) and its contrast, the cost of the
        orthogonal direction minus its own.
    """
    costs = direction_costs(block)
    d = int(np.argmin(costs))
    return d, int(costs[(d + 4) & 7] - costs[d])


def detect_directions(plane: np.ndarray) -> DirectionMap:
    """
    Runs detect_direction on every 8x8 block of a plane whose sides are multiples of 8.
    """
    rows, cols = plane.shape[0] // BLOCK, plane.shape[1] // BLOCK
    directions = np.zeros((rows, cols), dtype=np.int64)
    scores = np.zeros((rows, cols), dtype=np.int64)
    for by in range(rows):
        for bx in range(cols):
            directions[by, bx], scores[by, bx] = detect_direction(
                plane[by * BLOCK:(by + 1) * BLOCK, bx * BLOCK:(bx + 1) * BLOCK])
    return DirectionMap(directions=directions, scores=scores)


def conditional_replace(taps, center, weights, threshold, shift: int = STAGE1_SHIFT):
    """
    Conditional replacement filter: center + (sum_k w_k R(x_k - center, T)) / 2^shift, where
    R zeroes every difference with magnitude >= T. Rounded and clamped to 0..255.

    Args:
        taps: Tap values, shape (k, ...).
        center: Centre values, shape (...).
        weights: One positive weight per tap.
        threshold: T, scalar or shape (...).
        shift (int): log2 of the normalizer.

    Returns:
        The filtered values (int64 scalar or array).
    """
    taps = np.asarray(taps, dtype=np.int64)
    center = np.asarray(center, dtype=np.int64)
    diff = taps - center
    kept = np.where(np.abs(diff) < threshold, diff, 0)
    weights = np.asarray(weights, dtype=np.int64).reshape((-1,) + (1,) * center.ndim)
    total = (weights * kept).sum(axis=0)
    return np.clip(center + round_shift(np.asarray(total, dtype=np.int64), shift), 0, 255)


def _expand(block_values: np.ndarray) -> np.ndarray:
    return np.repeat(np.repeat(block_values, BLOCK, axis=0), BLOCK, axis=1)


def _shifted(padded: np.ndarray, shape: Tuple[int, int], dy: int, dx: int) -> np.ndarray:
    return padded[PAD + dy:PAD + dy + shape[0], PAD + dx:PAD + dx + shape[1]]


def _stage1(plane: np.ndarray, directions: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    padded = np.pad(plane, PAD, constant_values=SENTINEL)
    out = plane.copy()
    for d, taps in enumerate(DIRECTION_TAPS):
        mask = (directions == d) & (thresholds > 0)
        if not mask.any():
            continue
        values = [_shifted(padded, plane.shape, sy * dy, sx * dx) for dy, dx in taps for sy, sx in ((1, 1), (-1, -1))]
        weights = [w for w in STAGE1_WEIGHTS for _ in range(2)]
        filtered = conditional_replace(values, plane, weights, thresholds, STAGE1_SHIFT)
        out[mask] = filtered[mask]
    return out


def _stage2(plane: np.ndarray, directions: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    padded = np.pad(plane, PAD, constant_values=SENTINEL)
    out = plane.copy()
    vertical = np.isin(directions, VERTICAL_SECOND_STAGE)
    for axis_mask, (ay, ax) in ((vertical, (1, 0)), (~vertical, (0, 1))):
        mask = axis_mask & (thresholds > 0)
        if not mask.any():
            continue
        values = [_shifted(padded, plane.shape, sign * k * ay, sign * k * ax) for k in (1, 2) for sign in (1, -1)]
        weights = [w for w in STAGE2_WEIGHTS for _ in range(2)]
        filtered = conditional_replace(values, plane, weights, thresholds, STAGE2_SHIFT)
        out[mask] = filtered[mask]
    return out


def dering_plane(plane: np.ndarray, directions: np.ndarray, block_thresholds: np.ndarray) -> np.ndarray:
    """
    Filters a plane with one direction and threshold per 8x8 block (threshold 0 = untouched).

    Args:
        plane (np.ndarray): Decoded plane, sides multiples of 8.
        directions (np.ndarray): Block directions.
        block_thresholds (np.ndarray): Block thresholds.

    Returns:
        np.ndarray: The filtered int64 plane.
    """
    plane = plane.astype(np.int64)
    direction_map = _expand(directions)
    threshold_map = _expand(block_thresholds)
    return _stage2(_stage1(plane, direction_map, threshold_map), direction_map, threshold_map)


def dering_block(frame: np.ndarray, position: Tuple[int, int], d: int, threshold: int) -> np.ndarray:
    """
    Filters the single 8x8 block at position (top-left y, x) of a plane.

    Args:
        frame (np.ndarray): Decoded plane.
        position (Tuple[int, int]): Block origin, multiples of 8.
        d (int): Block direction.
        threshold (int): Threshold T.

    Returns:
        np.ndarray: The filtered 8x8 block.
    """
    y, x = position
    rows, cols = frame.shape[0] // BLOCK, frame.shape[1] // BLOCK
    directions = np.zeros((rows, cols), dtype=np.int64)
    thresholds = np.zeros((rows, cols), dtype=np.int64)
    directions[y // BLOCK, x // BLOCK] = d
    thresholds[y // BLOCK, x // BLOCK] = threshold
    return dering_plane(frame, directions, thresholds)[y:y + BLOCK, x:x + BLOCK]


def block_thresholds(params: DeringParams, sb_grid: Tuple[int, int], sb_size: int,
                     coded: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Expands per-superblock levels to per-8x8-block thresholds.

    Args:
        params (DeringParams): Global threshold and per-superblock levels (raster order).
        sb_grid (Tuple[int, int]): Superblock rows and columns.
        sb_size (int): Superblock size in this plane (64 luma, 32 for 4:2:0 chroma).
        coded (np.ndarray, optional): Per-block flags of blocks with coded coefficients; blocks
            without any are left alone. None filters every block.

    Returns:
        np.ndarray: int64 thresholds per 8x8 block.
    """
    per_sb = sb_size // BLOCK
    levels = np.asarray(params.levels, dtype=np.int64).reshape(sb_grid)
    factors = np.asarray(LEVEL_FACTORS, dtype=np.int64)[levels]
    thresholds = (params.t0 * factors + 2) >> 2
    thresholds = np.repeat(np.repeat(thresholds, per_sb, axis=0), per_sb, axis=1)
    if coded is not None:
        thresholds = np.where(coded, thresholds, 0)
    return thresholds


def dering_frame(planes: Sequence[np.ndarray], params: DeringParams, sb_grid: Tuple[int, int],
                 sb_sizes: Sequence[int], coded: Optional[Sequence[np.ndarray]] = None,
                 direction_maps: Optional[Sequence[DirectionMap]] = None) -> List[np.ndarray]:
    """
    Derings every plane of a decoded frame. Chroma planes detect their own directions and use
    the levels of the luma superblocks they belong to.

    Args:
        planes (Sequence[np.ndarray]): Decoded planes (padded to whole superblocks).
        params (DeringParams): Thresholds.
        sb_grid (Tuple[int, int]): Superblock rows and columns.
        sb_sizes (Sequence[int]): Superblock size of each plane.
        coded (Sequence[np.ndarray], optional): Per-plane coded-block flags.
        direction_maps (Sequence[DirectionMap], optional): Precomputed directions.

    Returns:
        List[np.ndarray]: Filtered planes, int64. Identity when T0 is 0 or every level is 0.
    """
    if params.t0 == 0 or not any(params.levels):
        return [plane.astype(np.int64) for plane in planes]
    out = []
    for index, (plane, sb_size) in enumerate(zip(planes, sb_sizes)):
        directions = (direction_maps[index] if direction_maps is not None else detect_directions(plane)).directions
        thresholds = block_thresholds(params, sb_grid, sb_size, coded[index] if coded is not None else None)
        out.append(dering_plane(plane, directions, thresholds))
    return out


def superblock_sse(a: np.ndarray, b: np.ndarray, sb_size: int, visible: Tuple[int, int]) -> np.ndarray:
    """
    Squared error of two planes per superblock, counting only the visible (uncropped) area.
    """
    diff = a.astype(np.int64) - b.astype(np.int64)
    diff[visible[0]:, :] = 0
    diff[:, visible[1]:] = 0
    rows, cols = a.shape[0] // sb_size, a.shape[1] // sb_size
    return (diff * diff).reshape(rows, sb_size, cols, sb_size).sum(axis=(1, 3))


def choose_dering_levels(sources: Sequence[np.ndarray], decoded: Sequence[np.ndarray], t0: int,
                         sb_grid: Tuple[int, int], sb_sizes: Sequence[int],
                         visible: Sequence[Tuple[int, int]]) -> Tuple[List[int], List[DirectionMap]]:
    """
    Picks the adjustment index of every superblock by trying all six against the source.

    Args:
        sources (Sequence[np.ndarray]): Source planes, padded like the decoded ones.
        decoded (Sequence[np.ndarray]): Decoded planes before deringing.
        t0 (int): Global threshold.
        sb_grid (Tuple[int, int]): Superblock rows and columns.
        sb_sizes (Sequence[int]): Superblock size of each plane.
        visible (Sequence[Tuple[int, int]]): Uncropped size of each plane.

    Returns:
        Tuple[List[int], List[DirectionMap]]: Levels in raster order (lowest index on ties) and the
        direction maps that were used.
    """
    direction_maps = [detect_directions(plane) for plane in decoded]
    count = sb_grid[0] * sb_grid[1]
    errors = np.zeros((len(LEVEL_FACTORS), count), dtype=np.int64)
    for level in range(len(LEVEL_FACTORS)):
        params = DeringParams(t0=t0, levels=[level] * count)
        filtered = dering_frame(decoded, params, sb_grid, sb_sizes, direction_maps=direction_maps)
        for plane, source, sb_size, shown in zip(filtered, sources, sb_sizes, visible):
            errors[level] += superblock_sse(plane, source, sb_size, shown).reshape(-1)
    levels = [int(level) for level in np.argmin(errors, axis=0)]
    logger.debug("dering levels %s at t0=%d", levels, t0)
    return levels, direction_maps
