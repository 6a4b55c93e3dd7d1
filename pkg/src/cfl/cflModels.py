"""
This module defines the Pydantic model of a chroma-from-luma prediction.
"""

from typing import Optional

import numpy as np
from pydantic import BaseModel as PydanticBase, Extra, validator


class CflPredictor(PydanticBase):
    """
    Represents the prediction of one chroma block built from reconstructed luma coefficients.

    r is an N x N coefficient block (DC included, never used) multiplied by sign; bands are
    sliced from it with the chroma block's band layout.
    """
    r: Optional[np.ndarray] = None
    sign: int = 1
    available: bool = False

    @validator("sign")
    def validate_sign(cls, value):
        if value not in (-1, 1):
            raise ValueError(f"CfL sign <{value}> is not +1 or -1.")
        return value

    class Config:
        arbitrary_types_allowed = True
        extra = Extra.forbid

    def band(self, indices: np.ndarray) -> Optional[np.ndarray]:
        """
        Returns the prediction of one band, or None when CfL is unavailable.
        """
        if not self.available:
            return None
        return self.r.reshape(-1)[indices]
