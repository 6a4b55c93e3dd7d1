"""
This module defines the adaptive frequency models driving the range coder.
"""

from __future__ import annotations

import math
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

# Default adaptation parameters of every frequency model.
DEFAULT_INCREMENT = 16
DEFAULT_CAP = 1 << 15
MAX_ALPHABET = 16


class FrequencyModel:
    """
    Frequency counts for an alphabet of 2 to 16 symbols.

    Every count stays >= 1 and the total never exceeds the cap after an update.
    Non-adaptive models (adaptive=False) keep their counts forever, which is what
    the uniform digit models and the fixed-rate tests rely on.
    """
    __slots__ = ("counts", "total", "increment", "cap", "adaptive")

    def __init__(self, counts: Sequence[int], increment: int = DEFAULT_INCREMENT, cap: int = DEFAULT_CAP,
                 adaptive: bool = True):
        if not 2 <= len(counts) <= MAX_ALPHABET:
            raise ValueError(f"Alphabet size <{len(counts)}> is outside 2..{MAX_ALPHABET}.")
        if any(count < 1 for count in counts):
            raise ValueError(f"Counts <{list(counts)}> contain a zero or negative entry.")
        if sum(counts) > cap:
            raise ValueError(f"Total <{sum(counts)}> exceeds the cap <{cap}>.")
        self.counts: List[int] = list(counts)
        self.total: int = sum(self.counts)
        self.increment = increment
        self.cap = cap
        self.adaptive = adaptive

    @classmethod
    def flat(cls, alphabet: int, **kwargs) -> FrequencyModel:
        """
        Creates a model with every count set to one.

        Args:
            alphabet (int): Number of symbols.

        Returns:
            FrequencyModel: The new model.
        """
        return cls([1] * alphabet, **kwargs)

    @property
    def alphabet(self) -> int:
        return len(self.counts)

    def cumulative(self, symbol: int) -> Tuple[int, int]:
        """
        Returns the cumulative interval [fl, fh) of a symbol.

        Args:
            symbol (int): The symbol index.

        Returns:
            Tuple[int, int]: Lower and upper cumulative counts.
        """
        low = sum(self.counts[:symbol])
        return low, low + self.counts[symbol]

    def update(self, symbol: int) -> None:
        """
        Adds the increment to a symbol's count, halving every count once the total passes the cap.

        Args:
            symbol (int): The symbol that was just coded.
        """
        if not self.adaptive:
            return
        self.counts[symbol] += self.increment
        self.total += self.increment
        if self.total > self.cap:
            self.counts = [max(1, count >> 1) for count in self.counts]
            self.total = sum(self.counts)

    def cost(self, symbol: int) -> float:
        """
        Ideal code length of a symbol under the current counts, in bits.
        """
        return math.log2(self.total / self.counts[symbol])

    def copy(self) -> FrequencyModel:
        return FrequencyModel(self.counts, self.increment, self.cap, self.adaptive)

    def __repr__(self) -> str:
        return f"FrequencyModel(counts={self.counts}, increment={self.increment}, cap={self.cap})"


_UNIFORM_MODELS: Dict[int, FrequencyModel] = {}


def uniform_model(alphabet: int) -> FrequencyModel:
    """
    Returns the shared non-adaptive flat model for an alphabet size.

    Args:
        alphabet (int): Number of symbols (2..16).

    Returns:
        FrequencyModel: A model that never adapts, safe to share.
    """
    model = _UNIFORM_MODELS.get(alphabet)
    if model is None:
        model = FrequencyModel.flat(alphabet, adaptive=False)
        _UNIFORM_MODELS[alphabet] = model
    return model


class ModelSet:
    """
    A collection of adaptive models keyed by context tuples and created on first use.

    Encoder and decoder each own one and must ask for the same keys in the same order.
    A fork copies models from its parent on first use, so trial encodes only pay for the
    contexts they touch; a fork must be discarded once its parent changes.
    """

    def __init__(self, increment: int = DEFAULT_INCREMENT, models: Optional[Dict[Hashable, FrequencyModel]] = None,
                 parent: Optional[ModelSet] = None):
        self.increment = increment
        self._models: Dict[Hashable, FrequencyModel] = models if models is not None else {}
        self._parent = parent

    def _lookup(self, key: Hashable) -> Optional[FrequencyModel]:
        model = self._models.get(key)
        if model is None and self._parent is not None:
            return self._parent._lookup(key)
        return model

    def get(self, key: Hashable, alphabet: int) -> FrequencyModel:
        model = self._models.get(key)
        if model is None:
            inherited = self._parent._lookup(key) if self._parent is not None else None
            if inherited is not None:
                model = inherited.copy()
            else:
                model = FrequencyModel.flat(alphabet, increment=self.increment)
            self._models[key] = model
        if model.alphabet != alphabet:
            raise ValueError(f"Context <{key}> was created with alphabet <{model.alphabet}>, not <{alphabet}>.")
        return model

    def fork(self) -> ModelSet:
        return ModelSet(self.increment, parent=self)

    def _flatten(self) -> Dict[Hashable, FrequencyModel]:
        models = self._parent._flatten() if self._parent is not None else {}
        models.update(self._models)
        return models

    def copy(self) -> ModelSet:
        return ModelSet(self.increment, {key: model.copy() for key, model in self._flatten().items()})

    def __len__(self) -> int:
        return len(self._flatten())

    def __contains__(self, key: Hashable) -> bool:
        return self._lookup(key) is not None
