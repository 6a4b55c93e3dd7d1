"""
Chroma-from-luma prediction in the transform domain.
"""

import logging
from typing import Optional

import numpy as np

from .cflModels import CflPredictor
from ..codec.codecModels import ChromaMode

logger = logging.getLogger(__name__)


def make_chroma_predictor(luma_recon_coeffs: Optional[np.ndarray], chroma_size: int, chroma_mode: ChromaMode,
                          sign: int = 1) -> CflPredictor:
    """
    Builds the chroma prediction vector from the co-located reconstructed luma block.

    For 4:4:4 the luma block has the chroma block's size and is used as is. For 4:2:0 the
    luma block covers 2N x 2N and its N x N low-frequency corner is used. Only the shape is
    predicted: the chroma gain is coded on its own and the sign is chosen per band.

    Args:
        luma_recon_coeffs (np.ndarray, optional): Reconstructed coefficients of the co-located luma
            block, None when the co-located area is not a single luma block.
        chroma_size (int): Size N of the chroma block.
        chroma_mode (ChromaMode): Subsampling of the frame.
        sign (int): Sign applied to the prediction.

    Returns:
        CflPredictor: The predictor; available is False when no single co-located luma block exists.
    """
    expected = 2 * chroma_size if chroma_mode == ChromaMode.YUV420 else chroma_size
    if chroma_mode == ChromaMode.MONO or luma_recon_coeffs is None or luma_recon_coeffs.shape != (expected, expected):
        return CflPredictor(sign=sign)
    r = np.array(luma_recon_coeffs[:chroma_size, :chroma_size], dtype=np.int64) * sign
    return CflPredictor(r=r, sign=sign, available=True)
