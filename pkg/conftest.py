import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from src.codec.codecModels import ChromaMode, Frame  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: multi-second acceptance measurements")


def _rings(size: int = 64) -> np.ndarray:
    y, x = np.mgrid[0:size, 0:size]
    radius = np.hypot(y - size / 2 + 0.5, x - size / 2 + 0.5)
    return np.where((radius // 6) % 2 == 0, 40, 220).astype(np.uint8)


def _photo(size: int = 64, seed: int = 7) -> np.ndarray:
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size]
    smooth = 128 + 60 * np.sin(x / 9.0) * np.cos(y / 13.0) + 0.6 * (x - y)
    return np.clip(smooth + rng.normal(0, 6, (size, size)), 0, 255).astype(np.uint8)


def _mono(plane: np.ndarray) -> Frame:
    return Frame(width=plane.shape[1], height=plane.shape[0], chroma_mode=ChromaMode.MONO, planes=[plane])


@pytest.fixture(scope="session")
def ring_image() -> Frame:
    return _mono(_rings())


@pytest.fixture(scope="session")
def photo_image() -> Frame:
    return _mono(_photo())


@pytest.fixture(scope="session")
def flat_image() -> Frame:
    return _mono(np.full((64, 64), 128, dtype=np.uint8))


@pytest.fixture(scope="session")
def corpus() -> dict:
    """
    Synthetic test corpus: photographic stand-in, hard edges, flat, stripes and a non-aligned size.
    """
    stripes = np.tile(np.repeat(np.array([30, 200, 90, 160], dtype=np.uint8), 4), (64, 4))
    odd = _photo(80, seed=3)[:37, :45]
    return {
        "photo": _mono(_photo()),
        "rings": _mono(_rings()),
        "flat": _mono(np.full((64, 64), 128, dtype=np.uint8)),
        "stripes": _mono(stripes),
        "odd": _mono(np.ascontiguousarray(odd)),
    }


@pytest.fixture(scope="session")
def color_image() -> Frame:
    """
    4:2:0 frame whose chroma planes are scaled copies of the subsampled luma.
    """
    luma = _photo()
    small = luma.reshape(32, 2, 32, 2).mean(axis=(1, 3))
    cb = np.clip(128 + 0.5 * (small - 128), 0, 255).astype(np.uint8)
    cr = np.clip(128 - 0.5 * (small - 128), 0, 255).astype(np.uint8)
    return Frame(width=64, height=64, chroma_mode=ChromaMode.YUV420, planes=[luma, cb, cr])
