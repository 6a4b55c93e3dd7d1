import numpy as np
import pytest

from src.codec.codecModels import SuperblockPlan
from src.transforms.transformModels import COEFF_SHIFT, CoeffBlock, LappedFilterParams
from src.transforms.transforms import (DEFAULT_LAPPING, ar1_coding_gain, block_id_map, dct_forward, dct_inverse,
                                       lapping_edge_map, postfilter_plane, prefilter_plane, synthesize_basis)


def _random_plan(rng, size=64, y=0, x=0) -> SuperblockPlan:
    if size > 4 and rng.random() < 0.6:
        half = size // 2
        return SuperblockPlan.split_node(size, y, x, [_random_plan(rng, half, y + dy, x + dx)
                                                      for dy in (0, half) for dx in (0, half)])
    return SuperblockPlan.leaf(size, y, x)


def _random_layout(rng, rows: int, cols: int):
    layout = []
    for oy in range(0, rows * 64, 64):
        for ox in range(0, cols * 64, 64):
            layout.extend(_random_plan(rng).layout(oy, ox))
    return layout


def _float_dct(block: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT-II in floating point."""
    size = block.shape[0]
    k = np.arange(size).reshape(-1, 1)
    n = np.arange(size).reshape(1, -1)
    basis = np.sqrt(np.where(k == 0, 1.0, 2.0) / size) * np.cos(np.pi * (2 * n + 1) * k / (2 * size))
    return basis @ block @ basis.T


class TestDct:

    @pytest.mark.parametrize("size", [4, 8, 16, 32, 64])
    def test_inverse_recovers_samples(self, size):
        """Forward then inverse transform returns the samples up to one unit, on 1000 blocks."""
        rng = np.random.default_rng(size)
        for block in rng.integers(-2048, 2048, (1000, size, size)):
            restored = dct_inverse(dct_forward(block))
            assert np.abs(restored - block).max() <= 1

    @pytest.mark.parametrize("size", [4, 8, 16, 32, 64])
    def test_matches_float_transform_and_keeps_energy(self, size):
        """Integer coefficients follow the float DCT and preserve the block energy."""
        rng = np.random.default_rng(100 + size)
        for block in rng.integers(-255, 256, (20, size, size)):
            coeffs = dct_forward(block).coeffs.astype(np.float64) / (1 << COEFF_SHIFT)
            np.testing.assert_allclose(coeffs, _float_dct(block.astype(np.float64)), atol=0.5)
            energy = float(np.sum(block.astype(np.float64) ** 2))
            assert float(np.sum(coeffs ** 2)) == pytest.approx(energy, rel=1e-3)

    def test_constant_block_has_only_dc(self):
        coeffs = dct_forward(np.full((8, 8), 100)).coeffs
        assert coeffs[0, 0] == 100 * 8 * 16
        assert np.abs(coeffs).sum() - abs(coeffs[0, 0]) <= 8

    def test_rejects_non_square_block(self):
        with pytest.raises(ValueError):
            dct_forward(np.zeros((8, 4), dtype=np.int64))

    def test_coeff_block_validates_shape(self):
        with pytest.raises(ValueError):
            CoeffBlock(size=8, coeffs=np.zeros((4, 4)))


class TestLapping:

    def test_postfilter_inverts_prefilter_on_random_plans(self):
        """The integer lifting pair is lossless on a hundred random block layouts."""
        rng = np.random.default_rng(12)
        for _ in range(100):
            plane = rng.integers(-4096, 4096, (64, 64))
            layout = _random_plan(rng).layout()
            np.testing.assert_array_equal(postfilter_plane(prefilter_plane(plane, layout), layout), plane)

    @pytest.mark.parametrize("seed", range(3))
    def test_postfilter_inverts_prefilter_across_superblocks(self, seed):
        rng = np.random.default_rng(seed)
        plane = rng.integers(-2048, 2048, (128, 192))
        layout = _random_layout(rng, 2, 3)
        filtered = prefilter_plane(plane, layout)
        assert not np.array_equal(filtered, plane)
        np.testing.assert_array_equal(postfilter_plane(filtered, layout), plane)

    def test_frame_border_is_not_filtered(self):
        """Only the two samples on each side of an interior edge change."""
        rng = np.random.default_rng(5)
        plane = rng.integers(-2048, 2048, (64, 64))
        filtered = prefilter_plane(plane, SuperblockPlan.uniform(32).layout())
        near_edge = np.zeros((64, 64), dtype=bool)
        near_edge[30:34, :] = True
        near_edge[:, 30:34] = True
        np.testing.assert_array_equal(filtered[~near_edge], plane[~near_edge])
        assert not np.array_equal(filtered[near_edge], plane[near_edge])

    def test_custom_lifting_coefficients_are_invertible(self):
        rng = np.random.default_rng(4)
        plane = rng.integers(-2048, 2048, (64, 64))
        params = LappedFilterParams(scale_num=91, scale_den=64, shear_outer=20, shear_inner=40)
        layout = SuperblockPlan.uniform(8).layout()
        np.testing.assert_array_equal(postfilter_plane(prefilter_plane(plane, layout, params), layout, params),
                                      plane)

    def test_constant_plane_is_unchanged(self):
        plane = np.full((64, 64), 37 << 4)
        layout = SuperblockPlan.uniform(4).layout()
        np.testing.assert_array_equal(prefilter_plane(plane, layout), plane)

    def test_single_block_has_no_edges(self):
        vertical, horizontal = lapping_edge_map([(0, 0, 64)], (64, 64))
        assert vertical == [] and horizontal == []

    def test_edges_follow_block_boundaries(self):
        layout = SuperblockPlan.uniform(32).layout()
        vertical, horizontal = lapping_edge_map(layout, (64, 64))
        assert [x for x, _ in vertical] == [32]
        assert [y for y, _ in horizontal] == [32]
        assert vertical[0][1].size == 64

    def test_uncovered_layout(self):
        with pytest.raises(ValueError):
            block_id_map([(0, 0, 32)], (64, 64))

    def test_shrinking_scale_is_rejected(self):
        with pytest.raises(ValueError):
            LappedFilterParams(scale_num=48, scale_den=64)

    def test_lapping_raises_coding_gain(self):
        """On a highly correlated source the lapped transform beats the plain DCT."""
        assert ar1_coding_gain(8, 0.95, DEFAULT_LAPPING) > ar1_coding_gain(8, 0.95)

    def test_basis_functions_overlap_neighbours(self):
        """A synthesized centre-block DC leaks into the neighbouring blocks."""
        plane = synthesize_basis(8, 0, 0)
        assert plane[8:16, 8:16].sum() > 0
        assert np.abs(plane[8:16, 6:8]).sum() > 0

    @pytest.mark.parametrize("size,row,col", [(4, 0, 0), (8, 0, 0), (8, 3, 5), (16, 7, 1), (32, 31, 31)])
    def test_basis_support_is_block_plus_four(self, size, row, col):
        """A synthesized basis function spans at most N + 4 samples in each direction."""
        plane = synthesize_basis(size, row, col)
        rows = np.nonzero(np.abs(plane).sum(axis=1))[0]
        cols = np.nonzero(np.abs(plane).sum(axis=0))[0]
        assert rows.min() >= size - 2 and rows.max() <= 2 * size + 1
        assert cols.min() >= size - 2 and cols.max() <= 2 * size + 1
