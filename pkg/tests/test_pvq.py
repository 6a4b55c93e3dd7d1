import itertools
import math
import sys
import threading
from functools import lru_cache

import numpy as np
import pytest

from src.entropy.entropy import RangeDecoder, RangeEncoder
from src.entropy.entropyModels import ModelSet
from src.exceptions import CorruptStreamError
from src.pvq.codebook import _CodebookTable, codebook_size, rank, unrank
from src.pvq.pvq import (band_layout, compand_gain, compute_k, decompand, decompose, householder, pvq_decode_band,
                         pvq_encode_band, pvq_search, quantize_band, reconstruct_band, reflect)
from src.pvq.pvqModels import GainMode, PvqBandCode


@lru_cache(maxsize=None)
def _codebook(n: int, k: int):
    """Every integer vector of dimension n and L1 norm k, by enumeration."""
    return [vector for vector in itertools.product(range(-k, k + 1), repeat=n)
            if sum(abs(value) for value in vector) == k]


class TestCodebook:

    def test_known_sizes(self):
        assert codebook_size(2, 1) == 4
        assert codebook_size(3, 2) == 18
        assert codebook_size(5, 0) == 1
        assert codebook_size(0, 3) == 0

    @pytest.mark.parametrize("n", range(1, 5))
    def test_size_matches_enumeration(self, n):
        for k in range(0, 5):
            assert codebook_size(n, k) == len(_codebook(n, k))

    @pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 7) for k in range(1, 6)])
    def test_rank_is_a_bijection(self, n, k):
        """unrank(rank(y)) == y and ranks cover [0, V(n, k)) exactly once."""
        size = codebook_size(n, k)
        seen = set()
        for index in range(size):
            y = unrank(n, k, index)
            assert int(np.abs(y).sum()) == k
            assert rank(y) == index
            seen.add(tuple(y.tolist()))
        assert len(seen) == size

    def test_large_codebook_round_trip(self):
        rng = np.random.default_rng(3)
        y = rng.integers(-6, 7, 64)
        k = int(np.abs(y).sum())
        np.testing.assert_array_equal(unrank(64, k, rank(y)), y)

    def test_rank_outside_codebook(self):
        with pytest.raises(CorruptStreamError):
            unrank(3, 2, 18)

    def test_concurrent_growth_returns_final_sizes(self):
        """Threads growing one table together read the same sizes as a table grown in order."""
        reference = _CodebookTable()
        lookups = [(n, k) for k in range(1, 40, 3) for n in range(1, 65, 7)]
        expected = {key: reference.get(*key) for key in lookups}
        switch_interval = sys.getswitchinterval()
        sys.setswitchinterval(1e-6)
        try:
            for trial in range(20):
                table = _CodebookTable()
                barrier = threading.Barrier(8)
                mismatches = []

                def worker(offset):
                    barrier.wait()
                    for index in range(len(lookups)):
                        n, k = lookups[(index + offset) % len(lookups)]
                        value = table.get(n, k)
                        if value != expected[(n, k)]:
                            mismatches.append((n, k, value))

                threads = [threading.Thread(target=worker, args=(3 * (trial + i),)) for i in range(8)]
                for thread in threads:
                    thread.start()
                for thread in threads:
                    thread.join()
                assert mismatches == []
        finally:
            sys.setswitchinterval(switch_interval)


class TestSearch:

    @pytest.mark.parametrize("n,k", [(n, k) for n in range(2, 7) for k in range(1, 6)])
    def test_search_reaches_brute_force_optimum(self, n, k):
        rng = np.random.default_rng(100 * n + k)
        candidates = np.asarray(_codebook(n, k), dtype=np.float64)
        norms = np.linalg.norm(candidates, axis=1)
        for _ in range(200):
            t = rng.normal(size=n)
            y = pvq_search(t, k)
            assert int(np.abs(y).sum()) == k
            best = float(np.max(candidates @ t / norms))
            assert float(t @ y) / np.linalg.norm(y) >= best - 1e-9

    def test_zero_pulses(self):
        assert not pvq_search(np.ones(4), 0).any()

    def test_zero_target(self):
        y = pvq_search(np.zeros(5), 3)
        assert int(np.abs(y).sum()) == 3


class TestReflection:

    def test_norm_is_preserved(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            r = rng.normal(size=12)
            x = rng.normal(size=12)
            z = reflect(x, householder(r))
            assert np.linalg.norm(z) == pytest.approx(np.linalg.norm(x))

    def test_prediction_maps_onto_axis(self):
        r = np.array([0.5, -3.0, 1.0, 0.25])
        reflector = householder(r)
        z = reflect(r, reflector)
        assert reflector.m == 1
        expected = np.zeros(4)
        expected[1] = -reflector.s * np.linalg.norm(r)
        np.testing.assert_allclose(z, expected, atol=1e-12)

    def test_exact_prediction_has_no_angle(self):
        """x == r gives theta = 0 and therefore no pulses."""
        r = np.array([30.0, -12.0, 7.0, 4.0, 0.0, 1.0])
        reflector = householder(r)
        _, theta, _ = decompose(reflect(r, reflector), reflector.m, reflector.s)
        assert theta == pytest.approx(0.0, abs=1e-7)
        code = quantize_band(r * 16, r * 16, 16.0)
        assert code.theta_index == 0
        assert code.k == 0
        assert compute_k(0, 6) == 0

    def test_zero_prediction_has_no_reflector(self):
        with pytest.raises(ValueError):
            householder(np.zeros(3))

    def test_worked_reflection(self):
        reflector = householder(np.array([3.0, 4.0]))
        np.testing.assert_allclose(reflect(np.array([3.0, 4.0]), reflector), [0.0, -5.0], atol=1e-12)

    def test_reflection_is_an_involution(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            n = int(rng.integers(2, 33))
            reflector = householder(rng.normal(size=n))
            x = rng.normal(size=n) * 100
            np.testing.assert_allclose(reflect(reflect(x, reflector), reflector), x, atol=1e-9)

    def test_orthogonal_input_is_at_right_angle(self):
        r = np.array([1.0, 0.0, 0.0])
        reflector = householder(r)
        g, theta, u = decompose(reflect(np.array([0.0, 2.0, 1.0]), reflector), reflector.m, reflector.s)
        assert theta == pytest.approx(math.pi / 2)
        assert g == pytest.approx(math.sqrt(5.0))
        assert u[reflector.m] == 0.0

    def test_orthogonal_band_falls_back_to_noref(self):
        """Past a right angle the prediction is useless and the band is coded without it."""
        x = np.array([-40.0, 200.0, 100.0])
        assert quantize_band(x, np.array([300.0, 0.0, 0.0]), 16.0) is None

    @pytest.mark.slow
    def test_decomposition_recomposes_input(self):
        """g, theta and u rebuild the reflected vector, and reflecting back rebuilds x."""
        rng = np.random.default_rng(10)
        for _ in range(100_000):
            n = int(rng.integers(2, 17))
            r = rng.normal(size=n)
            x = rng.normal(size=n)
            reflector = householder(r)
            g, theta, u = decompose(reflect(x, reflector), reflector.m, reflector.s)
            z = g * math.sin(theta) * u
            z[reflector.m] = -reflector.s * g * math.cos(theta)
            np.testing.assert_allclose(reflect(z, reflector), x, rtol=0.0, atol=1e-9)


class TestGainAndPulses:

    def test_zero_gain_has_index_zero(self):
        assert compand_gain(0.0, 32.0) == 0
        assert decompand(0, 32.0) == 0.0

    def test_step_matches_quantizer_at_anchor(self):
        """At a gain of 8q one gain index step is about one band quantizer."""
        q = 32.0
        assert compand_gain(8 * q, q) == 12
        assert decompand(12, q) == pytest.approx(8 * q)
        assert decompand(13, q) - decompand(12, q) == pytest.approx(q, rel=0.05)
        assert decompand(4, q) - decompand(3, q) < 0.6 * q

    def test_decompand_inverts_compand_on_the_grid(self):
        for index in range(1, 200):
            assert compand_gain(decompand(index, 16.0), 16.0) == index

    def test_worked_pulse_count(self):
        assert compute_k(2, 14) == 6
        assert compute_k(1, 2) == 1


class TestBandLayout:

    def test_band_counts(self):
        assert len(band_layout(4).bands) == 1
        assert len(band_layout(8).bands) == 4
        assert len(band_layout(64).bands) == 67

    def test_bands_are_short(self):
        assert max(len(band) for band in band_layout(64).bands) <= 64


class TestBandCoding:

    @pytest.mark.parametrize("gain_mode", [GainMode.RELATIVE, GainMode.DIRECT])
    def test_decoder_reconstructs_encoder_bands(self, gain_mode):
        rng = np.random.default_rng(21)
        q = 64.0
        bands = []
        for n in (15, 16, 32, 64):
            for scale in (0.0, 30.0, 400.0, 3000.0):
                x = np.round(rng.normal(size=n) * scale)
                r = np.round(x * rng.uniform(-1.0, 1.0) + rng.normal(size=n) * scale * 0.3)
                bands.append((x, r if rng.random() < 0.8 else None))
        models = ModelSet()
        enc = RangeEncoder()
        recons = []
        for index, (x, r) in enumerate(bands):
            _, recon = pvq_encode_band(x, r, q, models, enc, ("band", index % 3), gain_mode)
            recons.append(recon)
        dec = RangeDecoder(enc.finish())
        models = ModelSet()
        for index, ((x, r), expected) in enumerate(zip(bands, recons)):
            _, recon = pvq_decode_band(x.size, r, q, models, dec, ("band", index % 3), gain_mode)
            np.testing.assert_array_equal(recon, expected)

    @pytest.mark.slow
    def test_many_bands_round_trip(self):
        """Ten thousand mixed bands decode to the encoder's reconstruction."""
        rng = np.random.default_rng(31)
        sizes = [15, 16, 32, 48, 64]
        bands = []
        for _ in range(10_000):
            n = sizes[int(rng.integers(len(sizes)))]
            scale = float(rng.choice([0.0, 5.0, 60.0, 500.0, 4000.0]))
            x = np.round(rng.normal(size=n) * scale)
            r = None
            if rng.random() < 0.7:
                r = np.round(x * rng.uniform(-1.0, 1.0) + rng.normal(size=n) * scale * rng.uniform(0.0, 1.0))
            gain_mode = GainMode.DIRECT if rng.random() < 0.3 else GainMode.RELATIVE
            bands.append((x, r, gain_mode, float(rng.choice([16.0, 64.0, 256.0]))))
        models = ModelSet()
        enc = RangeEncoder()
        recons = []
        for index, (x, r, gain_mode, q) in enumerate(bands):
            _, recon = pvq_encode_band(x, r, q, models, enc, ("band", index % 7), gain_mode)
            recons.append(recon)
        dec = RangeDecoder(enc.finish())
        models = ModelSet()
        for index, ((x, r, gain_mode, q), expected) in enumerate(zip(bands, recons)):
            _, recon = pvq_decode_band(x.size, r, q, models, dec, ("band", index % 7), gain_mode)
            np.testing.assert_array_equal(recon, expected)

    def test_reconstructed_gain_tracks_source(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=32) * 500
        code = quantize_band(x, None, 32.0)
        recon = reconstruct_band(code, None, 32.0)
        assert np.linalg.norm(recon) == pytest.approx(np.linalg.norm(x), rel=0.1)

    def test_angle_and_noref_are_exclusive(self):
        with pytest.raises(ValueError):
            PvqBandCode(n=4, gain_index=2, theta_index=1, noref=True)


@pytest.mark.slow
def test_activity_masking_slope():
    """Squared error grows with the gain with a log-log slope of about two thirds."""
    rng = np.random.default_rng(17)
    q, n = 16.0, 16
    directions = rng.normal(size=(300, n))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    gains = [1600.0 * 2 ** step for step in range(4)]
    errors = []
    for gain in gains:
        total = 0.0
        for direction in directions:
            x = direction * gain * rng.uniform(0.9, 1.1)
            recon = reconstruct_band(quantize_band(x, None, q), None, q)
            total += float(np.sum((x - recon) ** 2))
        errors.append(total / len(directions))
    slope = np.polyfit(np.log(gains), np.log(errors), 1)[0]
    assert abs(slope - 2.0 / 3.0) <= 0.1
