"""
Objective quality metrics: per-plane MSE and PSNR and a 4:1:1 weighted PSNR.
"""

import logging
import math
from typing import Sequence

import numpy as np

from .metricsModels import PsnrReport
from ..codec.codecModels import Frame
from ..exceptions import UnsupportedFormatError

logger = logging.getLogger(__name__)

PEAK = 255.0
# Weights of Y, Cb and Cr in the weighted PSNR.
PLANE_WEIGHTS = (4.0, 1.0, 1.0)


def mse_to_psnr(mse: float) -> float:
    """
    PSNR in dB of an 8-bit mean squared error; inf when the error is zero.
    """
    if mse <= 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / mse)


def compare_frames(reference: Sequence[Frame], distorted: Sequence[Frame]) -> PsnrReport:
    """
    Measures the distortion of a sequence against its reference.

    The squared errors of each plane are pooled over all frames. The weighted PSNR is the
    PSNR of the 4:1:1 weighted mean of the plane MSEs (luma only for mono sources).

    Args:
        reference (Sequence[Frame]): Source frames.
        distorted (Sequence[Frame]): Decoded frames.

    Returns:
        PsnrReport: The measurements.
    """
    if len(reference) != len(distorted) or not reference:
        raise UnsupportedFormatError(f"Frame counts differ: <{len(reference)}> vs <{len(distorted)}>.")
    planes = len(reference[0].planes)
    errors = np.zeros(planes)
    counts = np.zeros(planes)
    for index, (a, b) in enumerate(zip(reference, distorted)):
        if (a.width, a.height, a.chroma_mode) != (b.width, b.height, b.chroma_mode):
            raise UnsupportedFormatError(f"Frame <{index}> differs in geometry: <{a.width}x{a.height}, "
                                         f"{a.chroma_mode.name}> vs <{b.width}x{b.height}, {b.chroma_mode.name}>.")
        for plane, (x, y) in enumerate(zip(a.planes, b.planes)):
            diff = x.astype(np.int64) - y.astype(np.int64)
            errors[plane] += float(np.sum(diff * diff))
            counts[plane] += diff.size
    mse = errors / counts
    weights = np.asarray(PLANE_WEIGHTS[:planes])
    weighted_mse = float(np.sum(weights * mse) / np.sum(weights))
    report = PsnrReport(mse=mse.tolist(), psnr=[mse_to_psnr(value) for value in mse],
                        weighted=mse_to_psnr(weighted_mse))
    logger.debug("psnr %s", report.psnr)
    return report
