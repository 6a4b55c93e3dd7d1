import numpy as np
import pytest

from src.entropy.entropy import RangeDecoder, RangeEncoder, map_interval, scale_total
from src.entropy.entropyModels import FrequencyModel, ModelSet, uniform_model
from src.exceptions import CorruptStreamError


class TestMapInterval:

    def test_no_slack_is_identity(self):
        """With ft == range every interval maps onto itself."""
        assert map_interval(40000, 123, 456, 40000) == (123, 456)

    def test_first_symbols_get_double_width(self):
        """The slack d = range - ft doubles the start of the alphabet."""
        assert map_interval(40000, 0, 100, 32768) == (0, 200)
        assert map_interval(40000, 10000, 10100, 32768) == (17232, 17332)

    def test_partition_covers_range(self):
        """Consecutive symbols map to adjacent intervals ending exactly at the range."""
        rng, counts = 50000, [9000, 1, 20000, 4000]
        ft = sum(counts)
        edges = np.concatenate([[0], np.cumsum(counts)])
        mapped = [map_interval(rng, int(edges[i]), int(edges[i + 1]), ft) for i in range(len(counts))]
        assert mapped[0][0] == 0
        assert mapped[-1][1] == rng
        assert all(a[1] == b[0] for a, b in zip(mapped, mapped[1:]))
        assert all(u < v for u, v in mapped)

    @pytest.mark.parametrize("args", [(40000, 0, 10, 40001), (40000, 0, 10, 20000), (40000, 10, 10, 30000),
                                      (40000, 0, 30001, 30000)])
    def test_contract_violations(self, args):
        """Totals outside (range/2, range] and empty intervals are rejected."""
        with pytest.raises(ValueError):
            map_interval(*args)

    def test_scale_total_lands_in_upper_half(self):
        for rng in (32768, 40000, 65535):
            for ft in (2, 17, 1000, 32768):
                shift = scale_total(rng, ft)
                assert rng // 2 < ft << shift <= rng

    def test_worked_examples(self):
        assert map_interval(49152, 8192, 16384, 32768) == (16384, 32768)
        assert map_interval(49152, 0, 1, 32768) == (0, 2)

    @pytest.mark.parametrize("rng,ft", [(49152, 32768), (65535, 40000), (32768, 32768), (40000, 20001)])
    def test_mapping_is_strictly_increasing(self, rng, ft):
        """u and v grow strictly with fl and fh, start at 0 and end at the range."""
        points = np.unique(np.linspace(0, ft, 400).astype(int))
        lows = [map_interval(rng, int(fl), ft, ft)[0] for fl in points[:-1]]
        highs = [map_interval(rng, 0, int(fh), ft)[1] for fh in points[1:]]
        assert lows[0] == 0
        assert highs[-1] == rng
        assert all(a < b for a, b in zip(lows, lows[1:]))
        assert all(a < b for a, b in zip(highs, highs[1:]))

    def test_earlier_symbols_are_never_narrower(self):
        """Equal counts get non-increasing widths along the alphabet."""
        rng, counts = 50000, [2048] * 16
        edges = np.concatenate([[0], np.cumsum(counts)])
        widths = [v - u for u, v in (map_interval(rng, int(edges[i]), int(edges[i + 1]), 32768) for i in range(16))]
        assert all(a >= b for a, b in zip(widths, widths[1:]))
        assert widths[0] == 2 * counts[0]

    def test_rare_symbol_first_is_never_narrower(self):
        """Moving a rare symbol to the start of the alphabet never shrinks its interval."""
        rng, rare, common = 45000, 300, [10000, 12000, 10468]
        ft = rare + sum(common)
        first = map_interval(rng, 0, rare, ft)
        last = map_interval(rng, ft - rare, ft, ft)
        assert first[1] - first[0] >= last[1] - last[0]


class TestFrequencyModel:

    def test_update_and_halving(self):
        """Counts stay positive and the total stays below the cap."""
        model = FrequencyModel.flat(4, increment=16, cap=64)
        for _ in range(10):
            model.update(2)
        assert model.total <= 64
        assert min(model.counts) >= 1
        assert model.counts[2] == max(model.counts)

    def test_non_adaptive_model_is_frozen(self):
        model = uniform_model(16)
        model.update(3)
        assert model.counts == [1] * 16

    def test_single_update(self):
        model = FrequencyModel([1, 1])
        model.update(0)
        assert model.counts == [17, 1]
        assert model.total == 18

    def test_halving_at_cap(self):
        """Passing the cap halves every count, floors and keeps each count at one or more."""
        model = FrequencyModel([1, 1, 32758])
        model.update(2)
        assert model.counts == [1, 1, 16387]
        assert model.total == 16389

    def test_counts_stay_positive_under_repeated_updates(self):
        rng = np.random.default_rng(6)
        model = FrequencyModel.flat(8, increment=500, cap=4096)
        for symbol in rng.integers(0, 2, 5000).tolist():
            model.update(symbol)
            assert model.total <= model.cap
            assert min(model.counts) >= 1

    def test_invalid_counts(self):
        with pytest.raises(ValueError):
            FrequencyModel([0, 4])
        with pytest.raises(ValueError):
            FrequencyModel([1] * 17)


class TestModelSet:

    def test_fork_is_copy_on_write(self):
        """Updates made through a fork never reach the parent."""
        models = ModelSet()
        models.get(("a",), 4).update(1)
        fork = models.fork()
        fork.get(("a",), 4).update(1)
        fork.get(("b",), 2)
        assert models.get(("a",), 4).counts == [1, 17, 1, 1]
        assert fork.get(("a",), 4).counts == [1, 33, 1, 1]
        assert ("b",) not in models
        assert ("b",) in fork

    def test_copy_flattens(self):
        models = ModelSet()
        models.get("x", 3)
        fork = models.fork()
        fork.get("y", 2)
        assert len(fork.copy()) == 2

    def test_alphabet_mismatch(self):
        models = ModelSet()
        models.get("x", 3)
        with pytest.raises(ValueError):
            models.get("x", 4)


def _random_session(seed: int, count: int):
    rng = np.random.default_rng(seed)
    operations = []
    for _ in range(count):
        kind = rng.integers(0, 4)
        if kind == 0:
            alphabet = int(rng.integers(2, 17))
            operations.append(("symbol", alphabet, int(min(rng.geometric(0.4) - 1, alphabet - 1))))
        elif kind == 1:
            bound = int(rng.integers(1, 1 << 40)) * int(rng.integers(1, 1000))
            operations.append(("uniform", bound, int(rng.integers(0, 1 << 62)) % bound))
        elif kind == 2:
            operations.append(("scalar", None, int(rng.integers(-40, 41)) * int(rng.choice([1, 1, 1, 1000]))))
        else:
            operations.append(("bool", None, bool(rng.random() < 0.2)))
    return operations


def _encode(operations):
    enc = RangeEncoder()
    models = ModelSet()
    for kind, arg, value in operations:
        if kind == "symbol":
            enc.encode_symbol(models.get(("s", arg), arg), value)
        elif kind == "uniform":
            enc.encode_uniform(value, arg)
        elif kind == "scalar":
            enc.encode_scalar(value, models, ("v",))
        else:
            enc.encode_bool(value, models.get(("b",), 2))
    return enc.finish()


def _decode(data, operations):
    dec = RangeDecoder(data)
    models = ModelSet()
    decoded = []
    for kind, arg, _ in operations:
        if kind == "symbol":
            decoded.append(dec.decode_symbol(models.get(("s", arg), arg)))
        elif kind == "uniform":
            decoded.append(dec.decode_uniform(arg))
        elif kind == "scalar":
            decoded.append(dec.decode_scalar(models, ("v",)))
        else:
            decoded.append(dec.decode_bool(models.get(("b",), 2)))
    return decoded


class TestRoundtrip:

    @pytest.mark.parametrize("seed", range(5))
    def test_mixed_operations(self, seed):
        """Every coding primitive decodes to the encoded value with adaptive models."""
        operations = _random_session(seed, 3000)
        data = _encode(operations)
        assert _decode(data, operations) == [value for _, _, value in operations]

    @pytest.mark.slow
    def test_many_short_sessions(self):
        """Ten thousand independent short sessions all decode exactly."""
        for seed in range(10_000):
            operations = _random_session(seed, 12)
            assert _decode(_encode(operations), operations) == [value for _, _, value in operations]

    def test_short_four_symbol_sequence(self):
        sequence = [0, 3, 1, 2, 2, 0]
        enc = RangeEncoder()
        model = FrequencyModel.flat(4)
        for symbol in sequence:
            enc.encode_symbol(model, symbol)
        dec = RangeDecoder(enc.finish())
        model = FrequencyModel.flat(4)
        assert [dec.decode_symbol(model) for _ in sequence] == sequence

    def test_empty_stream(self):
        assert RangeEncoder().finish() == b""

    def test_highly_skewed_source_exercises_carries(self):
        """Long runs of a dominant symbol produce 0xFF chains and carries."""
        rng = np.random.default_rng(11)
        symbols = (rng.random(20000) < 0.002).astype(int).tolist()
        model_counts = [32000, 10]
        enc = RangeEncoder()
        for symbol in symbols:
            enc.encode_symbol(FrequencyModel(model_counts, adaptive=False), symbol)
        data = enc.finish()
        dec = RangeDecoder(data)
        assert [dec.decode_symbol(FrequencyModel(model_counts, adaptive=False)) for _ in symbols] == symbols

    def test_tell_tracks_output_size(self):
        operations = _random_session(3, 2000)
        enc = RangeEncoder()
        models = ModelSet()
        for _, _, value in (op for op in operations if op[0] == "scalar"):
            enc.encode_scalar(value, models, ("v",))
        bits = enc.tell()
        data = enc.finish()
        assert abs(8 * len(data) - bits) <= 48

    def test_clone_continues_identically(self):
        enc = RangeEncoder()
        for value in range(100):
            enc.encode_uniform(value, 101)
        twin = enc.clone()
        for encoder in (enc, twin):
            encoder.encode_uniform(7, 13)
        assert enc.finish() == twin.finish()

    def test_value_outside_bound(self):
        with pytest.raises(ValueError):
            RangeEncoder().encode_uniform(10, 10)
        with pytest.raises(ValueError):
            RangeEncoder().encode_symbol(FrequencyModel.flat(3), 3)


class TestCorruptInput:

    @pytest.mark.parametrize("seed", range(20))
    def test_garbage_never_crashes(self, seed):
        """Random bytes decode to some values or raise CorruptStreamError, nothing else."""
        data = np.random.default_rng(seed).integers(0, 256, 64, dtype=np.uint8).tobytes()
        operations = _random_session(seed, 300)
        try:
            _decode(data, operations)
        except CorruptStreamError:
            pass

    def test_uniform_value_reaching_bound(self):
        """A decoded digit pattern at or above the bound is reported."""
        enc = RangeEncoder()
        enc.encode_uniform(0xFF, 0x100)
        data = enc.finish()
        with pytest.raises(CorruptStreamError):
            RangeDecoder(data).decode_uniform(0xF1)

    def test_truncated_stream_reads_zeros(self):
        operations = _random_session(9, 500)
        data = _encode(operations)
        try:
            _decode(data[:len(data) // 2], operations)
        except CorruptStreamError:
            pass


def _measure_overhead(probabilities, count, seed, increment=16):
    rng = np.random.default_rng(seed)
    symbols = rng.choice(len(probabilities), size=count, p=probabilities)
    models = ModelSet(increment=increment)
    enc = RangeEncoder()
    for symbol in symbols.tolist():
        enc.encode_symbol(models.get("s", len(probabilities)), symbol)
    ideal = float(-np.log2(np.asarray(probabilities)[symbols]).sum())
    return enc.tell() / ideal - 1.0


@pytest.mark.slow
class TestRate:

    def test_geometric_source_default_models(self):
        """Adaptive coding of a halving 16-ary source stays within 1.5% of its entropy."""
        probabilities = 0.5 ** np.arange(1, 17)
        probabilities /= probabilities.sum()
        assert _measure_overhead(probabilities, 1_000_000, 1) < 0.015

    def test_skewed_source_slow_adaptation(self):
        """A 90/10 source with unit increments stays within 1.5% of its entropy."""
        probabilities = np.array([0.9] + [0.1 / 15] * 15)
        assert _measure_overhead(probabilities, 1_000_000, 2, increment=1) < 0.015

    def test_fixed_model_on_matching_source(self):
        """With a static model that matches the source the overhead is the mapping loss only."""
        counts = [2 ** (15 - i) for i in range(1, 16)] + [1]
        probabilities = np.asarray(counts, dtype=float) / sum(counts)
        rng = np.random.default_rng(3)
        symbols = rng.choice(16, size=100_000, p=probabilities).tolist()
        model = FrequencyModel(counts, adaptive=False)
        enc = RangeEncoder()
        for symbol in symbols:
            enc.encode_symbol(model, symbol)
        ideal = float(-np.log2(probabilities[symbols]).sum())
        assert enc.tell() / ideal - 1.0 < 0.03
