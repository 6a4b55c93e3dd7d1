"""
This module defines Pydantic models for deringing decisions.
"""

from typing import List

import numpy as np
from pydantic import BaseModel as PydanticBase, Field, Extra, validator

# Adjustment factors of the global threshold, in quarters; index 0 switches the filter off.
LEVEL_FACTORS = (0, 2, 3, 4, 6, 8)


class DirectionMap(PydanticBase):
    """
    Represents the dominant direction (0..7) and direction contrast of every 8x8 block of a plane.
    """
    directions: np.ndarray
    scores: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        extra = Extra.forbid


class DeringParams(PydanticBase):
    """
    Represents the deringing parameters of a frame: the global threshold from the frame
    header and one adjustment index per luma superblock in raster order.
    """
    t0: int = Field(0, ge=0, le=255)
    levels: List[int] = []

    @validator("levels", each_item=True)
    def validate_level(cls, value):
        if not 0 <= value < len(LEVEL_FACTORS):
            raise ValueError(f"Dering level <{value}> is outside 0..{len(LEVEL_FACTORS) - 1}.")
        return value

    class Config:
        schema_extra = {
            "example": {
                "t0": 20,
                "levels": [0, 3, 3, 5]
            }
        }
        extra = Extra.forbid

    def threshold(self, level: int) -> int:
        """
        Threshold of a superblock with the given adjustment index.
        """
        return (self.t0 * LEVEL_FACTORS[level] + 2) >> 2
