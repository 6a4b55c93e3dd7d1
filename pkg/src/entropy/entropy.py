"""
Multi-symbol range coder with the multiply-free piecewise interval mapping.

The coder keeps a 16-bit range in [2^15, 2^16) between symbols. Model totals are
shifted up by a power of two so they fall in (range/2, range]; the slack
d = range - ft is then handed out to the start of the alphabet with one minimum
per interval end (see map_interval). Output is byte-oriented with a cached byte
and a count of pending 0xFF bytes for carry propagation.
"""

from __future__ import annotations

import logging
import math
from typing import Hashable, Tuple

from .entropyModels import FrequencyModel, ModelSet, uniform_model
from ..exceptions import CorruptStreamError

logger = logging.getLogger(__name__)

PRECISION = 16
RANGE_MIN = 1 << (PRECISION - 1)
RANGE_INIT = (1 << PRECISION) - 1

# Magnitudes >= this value are escaped in encode_scalar.
SCALAR_ESCAPE = 15
# Hex digit count limit of an escaped remainder.
MAX_ESCAPE_DIGITS = 16


def scale_total(rng: int, ft: int) -> int:
    """
    Returns the left shift that brings a model total into (range/2, range].

    Args:
        rng (int): The current range.
        ft (int): The model total.

    Returns:
        int: The shift amount.
    """
    shift = rng.bit_length() - ft.bit_length()
    if (ft << shift) > rng:
        shift -= 1
    if shift < 0:
        raise ValueError(f"Total <{ft}> does not fit the range <{rng}>.")
    return shift


def map_interval(rng: int, fl: int, fh: int, ft: int) -> Tuple[int, int]:
    """
    Maps a cumulative interval [fl, fh) of total ft onto [u, v) inside [0, rng).

    With d = rng - ft the mapping is u = fl + min(fl, d), v = fh + min(fh, d): the
    first symbols of the alphabet get double width until the slack is used up.

    Args:
        rng (int): The current range.
        fl (int): Lower cumulative count.
        fh (int): Upper cumulative count.
        ft (int): Total, already scaled into (rng/2, rng].

    Returns:
        Tuple[int, int]: The sub-interval bounds u < v <= rng.
    """
    if not (rng >> 1) < ft <= rng:
        raise ValueError(f"Total <{ft}> is outside (<{rng >> 1}>, <{rng}>].")
    if not 0 <= fl < fh <= ft:
        raise ValueError(f"Interval <[{fl}, {fh})> is invalid for total <{ft}>.")
    d = rng - ft
    return fl + min(fl, d), fh + min(fh, d)


class RangeEncoder:
    """
    Encoder side of the range coder. Single owner, strictly sequential.
    """

    def __init__(self):
        self.low = 0
        self.rng = RANGE_INIT
        # Bits of low above the 16-bit window that are not yet emitted.
        self.cnt = 0
        self.cache = None
        self.pending = 0
        self.out = bytearray()
        self._bits = 0

    def clone(self, with_output: bool = True) -> RangeEncoder:
        """
        Copies the coder state, for trial encodes.

        Args:
            with_output (bool): Copy the bytes written so far. Trial encodes that only
                read tell() can skip it.

        Returns:
            RangeEncoder: An independent encoder.
        """
        other = RangeEncoder.__new__(RangeEncoder)
        other.low = self.low
        other.rng = self.rng
        other.cnt = self.cnt
        other.cache = self.cache
        other.pending = self.pending
        other.out = bytearray(self.out) if with_output else bytearray()
        other._bits = self._bits
        return other

    def tell(self) -> float:
        """
        Returns the number of bits spent so far, with fractional precision.
        """
        return self._bits + PRECISION - math.log2(self.rng)

    def _encode(self, fl: int, fh: int, ft: int) -> None:
        shift = scale_total(self.rng, ft)
        u, v = map_interval(self.rng, fl << shift, fh << shift, ft << shift)
        self.low += u
        rng = v - u
        dd = PRECISION - rng.bit_length()
        self.low <<= dd
        self.rng = rng << dd
        self.cnt += dd
        self._bits += dd
        while self.cnt >= 8:
            top = PRECISION + self.cnt
            carry = self.low >> top
            byte = (self.low >> (top - 8)) & 0xFF
            self.low &= (1 << (top - 8)) - 1
            self.cnt -= 8
            self._shift_byte(byte, carry)

    def _shift_byte(self, byte: int, carry: int) -> None:
        if self.cache is None:
            self.cache = byte
            return
        if byte != 0xFF or carry:
            self.out.append((self.cache + carry) & 0xFF)
            self.out.extend(bytes([(0xFF + carry) & 0xFF]) * self.pending)
            self.pending = 0
            self.cache = byte
        else:
            self.pending += 1

    def encode_symbol(self, model: FrequencyModel, symbol: int) -> None:
        """
        Codes one symbol and adapts the model.

        Args:
            model (FrequencyModel): The model, in the state the decoder will also have.
            symbol (int): The symbol index.
        """
        if not 0 <= symbol < model.alphabet:
            raise ValueError(f"Symbol <{symbol}> is outside the alphabet <{model.alphabet}>.")
        fl, fh = model.cumulative(symbol)
        self._encode(fl, fh, model.total)
        model.update(symbol)

    def encode_bool(self, bit: bool, model: FrequencyModel = None) -> None:
        self.encode_symbol(model if model is not None else uniform_model(2), int(bool(bit)))

    def encode_uniform(self, value: int, bound: int) -> None:
        """
        Codes an integer in [0, bound) as radix-16 digits with flat models.

        Args:
            value (int): The value.
            bound (int): Exclusive upper bound, arbitrary precision. bound = 1 codes nothing.
        """
        value = int(value)
        if bound < 1 or not 0 <= value < bound:
            raise ValueError(f"Value <{value}> is not inside [0, <{bound}>).")
        if bound == 1:
            return
        digits, top = _uniform_layout(bound)
        shift = 4 * (digits - 1)
        self.encode_symbol(uniform_model(top + 1), value >> shift)
        while shift > 0:
            shift -= 4
            self.encode_symbol(uniform_model(16), (value >> shift) & 0xF)

    def encode_scalar(self, value: int, models: ModelSet, context: Hashable, signed: bool = True) -> None:
        """
        Codes an integer as an escaped 16-ary magnitude followed by a sign.

        Args:
            value (int): The value.
            models (ModelSet): Adaptive models of the caller.
            context (Hashable): Context of the magnitude model; the sign model uses (context, "sign").
            signed (bool): False for values known to be non-negative; no sign is coded then.
        """
        value = int(value)
        if not signed and value < 0:
            raise ValueError(f"Negative value <{value}> for an unsigned scalar.")
        magnitude = abs(value)
        self.encode_symbol(models.get(context, 16), min(magnitude, SCALAR_ESCAPE))
        if magnitude >= SCALAR_ESCAPE:
            remainder = magnitude - SCALAR_ESCAPE
            digits = max(1, (remainder.bit_length() + 3) // 4)
            if digits > MAX_ESCAPE_DIGITS:
                raise ValueError(f"Value <{value}> is too large to code.")
            self.encode_symbol(uniform_model(16), digits - 1)
            self.encode_uniform(remainder, 1 << (4 * digits))
        if magnitude and signed:
            self.encode_symbol(models.get((context, "sign"), 2), int(value < 0))

    def finish(self) -> bytes:
        """
        Flushes the coder and returns the payload.

        Picks the value with the most trailing zero bits inside the final interval,
        emits it, and drops trailing zero bytes (the decoder reads past the end as zeros).

        Returns:
            bytes: The coded bytes.
        """
        limit = self.low + self.rng
        for t in range(PRECISION + self.cnt + 1, -1, -1):
            value = ((self.low + (1 << t) - 1) >> t) << t
            if value < limit:
                break
        self.low = value << 24
        self.cnt += 24
        while self.cnt >= 8:
            top = PRECISION + self.cnt
            carry = self.low >> top
            byte = (self.low >> (top - 8)) & 0xFF
            self.low &= (1 << (top - 8)) - 1
            self.cnt -= 8
            self._shift_byte(byte, carry)
        if self.cache is not None:
            self.out.append(self.cache)
            self.out.extend(b"\xff" * self.pending)
        self.cache = None
        self.pending = 0
        payload = bytes(self.out).rstrip(b"\x00")
        logger.debug("range coder finished: %d bytes, %.1f bits", len(payload), self.tell())
        return payload


def _uniform_layout(bound: int) -> Tuple[int, int]:
    largest = bound - 1
    digits = (largest.bit_length() + 3) // 4
    return digits, largest >> (4 * (digits - 1))


class RangeDecoder:
    """
    Decoder side of the range coder. Input past the end of the buffer reads as zero bytes.
    """

    def __init__(self, data: bytes):
        self.data = bytes(data)
        self.position = 0
        self.rng = RANGE_INIT
        # dif holds (code - low) with f extra fractional bits below the range precision.
        self.dif = 0
        self.f = -PRECISION
        self._bits = 0
        self._refill()

    def _refill(self) -> None:
        while self.f < PRECISION:
            byte = self.data[self.position] if self.position < len(self.data) else 0
            self.position += 1
            self.dif = (self.dif << 8) | byte
            self.f += 8

    def tell(self) -> float:
        return self._bits + PRECISION - math.log2(self.rng)

    def _decode(self, counts, ft: int) -> int:
        shift = scale_total(self.rng, ft)
        d = self.rng - (ft << shift)
        c = self.dif >> self.f
        if c >= self.rng:
            raise CorruptStreamError(f"Code value <{c}> is outside the range <{self.rng}>.")
        q = c >> 1 if c < 2 * d else c - d
        target = q >> shift
        if target >= ft:
            raise CorruptStreamError(f"Cumulative value <{target}> is outside the total <{ft}>.")
        symbol = 0
        fl = 0
        fh = counts[0]
        while fh <= target:
            symbol += 1
            fl = fh
            fh += counts[symbol]
        fl <<= shift
        fh <<= shift
        u = fl + min(fl, d)
        v = fh + min(fh, d)
        self.dif -= u << self.f
        rng = v - u
        dd = PRECISION - rng.bit_length()
        self.rng = rng << dd
        self.f -= dd
        self._bits += dd
        self._refill()
        return symbol

    def decode_symbol(self, model: FrequencyModel) -> int:
        """
        Decodes one symbol and adapts the model exactly as the encoder did.

        Args:
            model (FrequencyModel): The model, in the encoder's state at this position.

        Returns:
            int: The symbol index.
        """
        symbol = self._decode(model.counts, model.total)
        model.update(symbol)
        return symbol

    def decode_bool(self, model: FrequencyModel = None) -> bool:
        return bool(self.decode_symbol(model if model is not None else uniform_model(2)))

    def decode_uniform(self, bound: int) -> int:
        """
        Decodes an integer coded by encode_uniform.

        Args:
            bound (int): The same bound the encoder used.

        Returns:
            int: The value.
        """
        if bound < 1:
            raise ValueError(f"Bound <{bound}> must be positive.")
        if bound == 1:
            return 0
        digits, top = _uniform_layout(bound)
        value = self.decode_symbol(uniform_model(top + 1))
        for _ in range(digits - 1):
            value = (value << 4) | self.decode_symbol(uniform_model(16))
        if value >= bound:
            raise CorruptStreamError(f"Uniform value <{value}> reaches its bound <{bound}>.")
        return value

    def decode_scalar(self, models: ModelSet, context: Hashable, signed: bool = True) -> int:
        magnitude = self.decode_symbol(models.get(context, 16))
        if magnitude >= SCALAR_ESCAPE:
            digits = self.decode_symbol(uniform_model(16)) + 1
            magnitude += self.decode_uniform(1 << (4 * digits))
        if magnitude and signed and self.decode_symbol(models.get((context, "sign"), 2)):
            return -magnitude
        return magnitude
