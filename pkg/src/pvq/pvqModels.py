"""
This module defines Pydantic models for gain-shape (PVQ) band coding.
"""

from __future__ import annotations

from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel as PydanticBase, Field, Extra, root_validator


class ActivityParams(PydanticBase):
    """
    Activity masking strength: gains are companded with exponent 1 - alpha.

    The gain step is q * (g / (anchor * q))^alpha: equal to the band quantizer at a gain of
    anchor * q, finer below it and coarser above it.
    """
    alpha: float = Field(1.0 / 3.0, ge=0.0, lt=1.0)
    anchor: float = Field(8.0, gt=0.0)

    class Config:
        extra = Extra.forbid
        allow_mutation = False

    @property
    def beta(self) -> float:
        return 1.0 / (1.0 - self.alpha)

    @property
    def gain_scale(self) -> float:
        """
        Companded-gain steps per unit of (g / q)^(1 - alpha).
        """
        return self.beta * self.anchor ** self.alpha


class HouseholderReflector(PydanticBase):
    """
    Reflection that maps the prediction direction r / |r| onto -s * e_m.
    """
    v: np.ndarray
    m: int = Field(ge=0)
    s: int

    @root_validator(skip_on_failure=True)
    def validate_sign(cls, values):
        if values["s"] not in (-1, 1):
            raise ValueError(f"Reflector sign <{values['s']}> is not +1 or -1.")
        return values

    class Config:
        arbitrary_types_allowed = True
        extra = Extra.forbid


class GainMode(str, Enum):
    """
    How the gain of a band with a prediction is coded: relative to the prediction's own
    gain (luma H/V prediction) or on its own (chroma-from-luma).
    """
    RELATIVE = "relative"
    DIRECT = "direct"


class PvqBandCode(PydanticBase):
    """
    Represents the quantized parameters of one band.

    With noref the pulse vector spans all n coefficients; otherwise it spans n - 1 and
    skips the reflected axis.
    """
    n: int = Field(gt=0)
    gain_index: int = Field(ge=0)
    theta_index: Optional[int] = Field(None, ge=0)
    k: int = Field(0, ge=0)
    rank: int = Field(0, ge=0)
    noref: bool = True
    cfl_sign: Optional[int] = None
    pulses: Optional[List[int]] = None

    @root_validator(skip_on_failure=True)
    def validate_mode(cls, values):
        if values["noref"] and values["theta_index"] is not None:
            raise ValueError("A band without prediction has no angle.")
        if values["cfl_sign"] not in (None, -1, 1):
            raise ValueError(f"CfL sign <{values['cfl_sign']}> is not +1 or -1.")
        return values

    class Config:
        extra = Extra.forbid

    @property
    def shape_dimension(self) -> int:
        return self.n if self.noref else self.n - 1


class BandLayout(PydanticBase):
    """
    Represents the partition of the AC coefficients of an N x N block into bands.

    Each band lists raster indices into the flattened block.
    """
    size: int
    bands: List[List[int]]

    @root_validator(skip_on_failure=True)
    def validate_partition(cls, values):
        flat = sorted(index for band in values["bands"] for index in band)
        if flat != list(range(1, values["size"] ** 2)):
            raise ValueError(f"Bands do not partition the AC coefficients of a <{values['size']}> block.")
        if max(len(band) for band in values["bands"]) > 64:
            raise ValueError("A band is longer than 64 coefficients.")
        return values

    class Config:
        extra = Extra.forbid
        allow_mutation = False

    def arrays(self) -> List[np.ndarray]:
        return [np.asarray(band, dtype=np.intp) for band in self.bands]
