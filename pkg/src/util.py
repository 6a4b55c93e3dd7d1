"""
A module containing helper functions shared by the codec modules.

All rounding in the codec is round-half-away-from-zero; the helpers below are
the only place where it is implemented.
"""

from typing import Union

import numpy as np

IntOrArray = Union[int, np.ndarray]


def round_half_away(value: float) -> int:
    """
    Rounds a float to the nearest integer, halves away from zero.

    Args:
        value (float): The value to round.

    Returns:
        int: The rounded value.
    """
    if value >= 0:
        return int(value + 0.5)
    return -int(-value + 0.5)


def round_div(numerator: int, denominator: int) -> int:
    """
    Divides two integers exactly and rounds the quotient half away from zero.

    Args:
        numerator (int): The dividend.
        denominator (int): The divisor, must be positive.

    Returns:
        int: The rounded quotient.
    """
    if numerator >= 0:
        return (2 * numerator + denominator) // (2 * denominator)
    return -((-2 * numerator + denominator) // (2 * denominator))


def round_shift(value: IntOrArray, shift: int) -> IntOrArray:
    """
    Divides by 2**shift with round-half-away-from-zero, for ints and int arrays.

    Args:
        value (IntOrArray): Integer or integer numpy array.
        shift (int): Number of bits to drop (>= 1).

    Returns:
        IntOrArray: The rounded result, same kind as the input.
    """
    bias = 1 << (shift - 1)
    if isinstance(value, np.ndarray):
        magnitude = (np.abs(value) + bias) >> shift
        return np.where(value < 0, -magnitude, magnitude)
    if value >= 0:
        return (value + bias) >> shift
    return -((-value + bias) >> shift)


def round_half_away_array(values: np.ndarray) -> np.ndarray:
    """
    Vectorised round-half-away-from-zero for float arrays.

    Args:
        values (np.ndarray): Float array.

    Returns:
        np.ndarray: int64 array of rounded values.
    """
    return (np.sign(values) * np.floor(np.abs(values) + 0.5)).astype(np.int64)


def clamp(value: int, low: int, high: int) -> int:
    """
    Clamps a value into the closed interval [low, high].

    Args:
        value (int): The value to clamp.
        low (int): Lower bound.
        high (int): Upper bound.

    Returns:
        int: The clamped value.
    """
    return low if value < low else high if value > high else value


def is_power_of_two(value: int) -> bool:
    """
    Checks if an integer is a positive power of two.

    Args:
        value (int): The value to check.

    Returns:
        bool: True if value is 1, 2, 4, ...
    """
    return value > 0 and value & (value - 1) == 0
