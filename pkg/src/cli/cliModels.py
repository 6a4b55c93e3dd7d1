"""
This module defines the Pydantic model of a command line invocation.
"""

from enum import Enum
from typing import Optional, Union

from pydantic import BaseModel as PydanticBase, Field, Extra, validator

from ..codec.codecModels import EncoderConfig


class Command(str, Enum):
    ENCODE = "enc"
    DECODE = "dec"
    METRICS = "metrics"


class CliConfig(PydanticBase):
    """
    Represents one validated command line invocation.

    dering holds the global threshold override, None for the quantizer-derived default;
    the literal "off" switches deringing off.
    """
    command: Command
    input: str = Field(min_length=1)
    output: Optional[str] = None
    qi: int = Field(32, ge=0, le=63)
    dering: Optional[Union[int, str]] = None
    cfl: bool = True
    threads: int = Field(1, ge=1, le=64)
    min_block_size: int = 4
    verify: bool = False
    verbose: int = Field(0, ge=0)

    @validator("dering", pre=True)
    def validate_dering(cls, value):
        if value is None:
            return None
        if isinstance(value, str):
            if value.lower() == "off":
                return "off"
            try:
                value = int(value)
            except ValueError:
                raise ValueError(f"Dering threshold <{value}> is neither an integer nor 'off'.") from None
        if not 0 <= value <= 255:
            raise ValueError(f"Dering threshold <{value}> is outside 0..255.")
        return value

    @validator("min_block_size")
    def validate_min_block_size(cls, value):
        if value not in (4, 8, 16, 32, 64):
            raise ValueError(f"Minimum block size <{value}> is not one of 4, 8, 16, 32, 64.")
        return value

    class Config:
        schema_extra = {
            "example": {
                "command": "enc",
                "input": "foreman.y4m",
                "output": "foreman.dlk",
                "qi": 32,
                "dering": "off",
                "cfl": True,
                "threads": 1,
                "min_block_size": 4,
                "verify": False,
                "verbose": 0
            }
        }
        extra = Extra.forbid

    def cast_to_encoder_config(self, lambda_scale: float) -> EncoderConfig:
        """
        Builds the encoder settings of an enc invocation.
        """
        return EncoderConfig(qi=self.qi,
                             dering=None if self.dering in (None, "off") else self.dering,
                             dering_enabled=self.dering != "off",
                             cfl=self.cfl,
                             min_block_size=self.min_block_size,
                             lambda_scale=lambda_scale,
                             verify=self.verify)
