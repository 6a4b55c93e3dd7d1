"""
Least-squares training of the superblock DC predictor on a folder of PGM images.

The weights of the left, top-left, top and top-right neighbours are constrained to sum to one
and rounded to sixteenths. Run from the repository root:
python -m scripts.train_dc_weights path/to/pgm/folder
"""

import glob
import logging
import os

import click
import numpy as np

from src.codec.codecModels import SUPERBLOCK_SIZE
from src.haar.haarModels import DcPredictorWeights
from src.media.media import read_pnm

logger = logging.getLogger(__name__)


def superblock_dcs(plane: np.ndarray) -> np.ndarray:
    """
    DC of every whole superblock of a plane, in the units of a 64x64 orthonormal DCT.
    """
    rows, cols = plane.shape[0] // SUPERBLOCK_SIZE, plane.shape[1] // SUPERBLOCK_SIZE
    blocks = plane[:rows * SUPERBLOCK_SIZE, :cols * SUPERBLOCK_SIZE].astype(np.float64) - 128.0
    return blocks.reshape(rows, SUPERBLOCK_SIZE, cols, SUPERBLOCK_SIZE).mean(axis=(1, 3)) * SUPERBLOCK_SIZE


def training_rows(dcs: np.ndarray):
    """
    Neighbour vectors (left, top-left, top, top-right) and targets of every interior superblock.
    """
    features, targets = [], []
    for y in range(1, dcs.shape[0]):
        for x in range(1, dcs.shape[1] - 1):
            features.append((dcs[y, x - 1], dcs[y - 1, x - 1], dcs[y - 1, x], dcs[y - 1, x + 1]))
            targets.append(dcs[y, x])
    return features, targets


def fit_weights(features: np.ndarray, targets: np.ndarray, denominator: int = 16) -> DcPredictorWeights:
    """
    Solves min |F w - t|^2 subject to sum(w) = 1 and rounds w to integers over the denominator.
    """
    anchor = features[:, 3]
    free, *_ = np.linalg.lstsq(features[:, :3] - anchor[:, None], targets - anchor, rcond=None)
    weights = np.append(free, 1.0 - free.sum())
    integers = np.floor(weights * denominator + 0.5).astype(int)
    integers[int(np.argmax(np.abs(weights)))] += denominator - int(integers.sum())
    left, top_left, top, top_right = (int(value) for value in integers)
    return DcPredictorWeights(left=left, top_left=top_left, top=top, top_right=top_right, denominator=denominator)


@click.command()
@click.argument("folder", type=click.Path(exists=True, file_okay=False))
def main(folder):
    logging.basicConfig(level=logging.INFO)
    features, targets = [], []
    for path in sorted(glob.glob(os.path.join(folder, "*.pgm"))):
        with open(path, "rb") as handle:
            frame = read_pnm(handle.read())
        rows, values = training_rows(superblock_dcs(frame.luma))
        features.extend(rows)
        targets.extend(values)
        logger.info("%s: %d superblocks", path, len(values))
    if not targets:
        raise click.ClickException("No interior superblocks found; images must be at least 192x128.")
    weights = fit_weights(np.asarray(features), np.asarray(targets))
    click.echo(weights.json())


if __name__ == "__main__":
    main()
