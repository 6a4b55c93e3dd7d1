import math

import numpy as np
import pytest

from src.codec.codecModels import ChromaMode, Frame
from src.exceptions import UnsupportedFormatError
from src.metrics.metrics import compare_frames, mse_to_psnr
from src.metrics.metricsModels import format_db


def _mono(plane: np.ndarray) -> Frame:
    return Frame(width=plane.shape[1], height=plane.shape[0], chroma_mode=ChromaMode.MONO, planes=[plane])


class TestPsnr:

    def test_identical_frames(self):
        frame = _mono(np.full((8, 8), 9, dtype=np.uint8))
        report = compare_frames([frame], [frame])
        assert report.psnr == [math.inf]
        assert report.weighted == math.inf
        assert report.rows()[-1] == ["psnr", "weighted", "inf"]

    def test_single_pixel_error(self):
        """One pixel off by 16 in a 64x64 plane."""
        reference = np.full((64, 64), 100, dtype=np.uint8)
        distorted = reference.copy()
        distorted[10, 20] = 116
        report = compare_frames([_mono(reference)], [_mono(distorted)])
        expected = 10 * math.log10(255 ** 2 * 4096 / 256)
        assert report.psnr[0] == pytest.approx(expected)
        assert report.weighted == pytest.approx(expected)

    def test_weighted_uses_weighted_mse(self):
        luma = np.zeros((4, 4), dtype=np.uint8)
        chroma = np.zeros((2, 2), dtype=np.uint8)
        reference = Frame(width=4, height=4, chroma_mode=ChromaMode.YUV420, planes=[luma, chroma, chroma])
        distorted = Frame(width=4, height=4, chroma_mode=ChromaMode.YUV420,
                          planes=[luma + 2, chroma, chroma + 4])
        report = compare_frames([reference], [distorted])
        assert report.mse == [4.0, 0.0, 16.0]
        assert report.weighted == pytest.approx(mse_to_psnr((4 * 4.0 + 16.0) / 6))

    def test_errors_pool_over_frames(self):
        reference = _mono(np.zeros((2, 2), dtype=np.uint8))
        report = compare_frames([reference, reference],
                                [_mono(np.full((2, 2), 2, dtype=np.uint8)), reference])
        assert report.mse == [2.0]

    def test_geometry_mismatch(self):
        with pytest.raises(UnsupportedFormatError):
            compare_frames([_mono(np.zeros((2, 2), dtype=np.uint8))], [_mono(np.zeros((2, 3), dtype=np.uint8))])

    def test_count_mismatch(self):
        frame = _mono(np.zeros((2, 2), dtype=np.uint8))
        with pytest.raises(UnsupportedFormatError):
            compare_frames([frame], [frame, frame])


def test_format_db():
    assert format_db(41.84691) == "41.8469"
    assert format_db(math.inf) == "inf"
