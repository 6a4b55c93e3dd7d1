"""
This module defines Pydantic models for transform blocks and the lapping filter parameters.
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel as PydanticBase, Field, Extra, validator, root_validator

from ..util import is_power_of_two

# Fractional bits carried by transform coefficients on top of the sample precision.
COEFF_SHIFT = 4
BLOCK_SIZES = (4, 8, 16, 32, 64)


class CoeffBlock(PydanticBase):
    """
    Represents an N x N block of DCT coefficients, DC at (0, 0).
    """
    size: int
    coeffs: np.ndarray

    @validator("size")
    def validate_size(cls, value):
        if value not in BLOCK_SIZES:
            raise ValueError(f"Block size <{value}> is not one of {BLOCK_SIZES}.")
        return value

    @root_validator(skip_on_failure=True)
    def validate_shape(cls, values):
        coeffs = values["coeffs"]
        if coeffs.shape != (values["size"], values["size"]):
            raise ValueError(f"Coefficient array of shape <{coeffs.shape}> does not match size <{values['size']}>.")
        values["coeffs"] = coeffs.astype(np.int64, copy=False)
        return values

    class Config:
        arbitrary_types_allowed = True
        extra = Extra.forbid

    @property
    def dc(self) -> int:
        return int(self.coeffs[0, 0])


class LappedFilterParams(PydanticBase):
    """
    Lifting coefficients of the 4-point lapping filter.

    The filter is a butterfly across the block edge, a scaling of the inner difference by
    scale_num / scale_den, two shears between the outer and inner differences (in 1/64
    units) and the inverse butterfly. The scaling must not shrink so that it can be
    undone exactly on integers.
    """
    scale_num: int = Field(64, gt=0)
    scale_den: int = Field(64, gt=0)
    shear_outer: int = 24
    shear_inner: int = 48

    @root_validator(skip_on_failure=True)
    def validate_scale(cls, values):
        if values["scale_num"] < values["scale_den"]:
            raise ValueError(f"Scale <{values['scale_num']}/{values['scale_den']}> is below one and not invertible.")
        if not is_power_of_two(values["scale_den"]):
            raise ValueError(f"Scale denominator <{values['scale_den']}> must be a power of two.")
        return values

    class Config:
        schema_extra = {
            "example": {
                "scale_num": 64,
                "scale_den": 64,
                "shear_outer": 24,
                "shear_inner": 48
            }
        }
        extra = Extra.forbid
        allow_mutation = False
