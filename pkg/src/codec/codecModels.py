"""
This module defines Pydantic models for block plans, the frame container and encoder settings.
"""

from __future__ import annotations

import struct
from enum import IntEnum
from typing import Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel as PydanticBase, Field, Extra, validator, root_validator

from ..exceptions import CorruptStreamError

SUPERBLOCK_SIZE = 64
MAGIC = b"DLK1"
VERSION = 1
HEADER_FORMAT = ">4sBHHBBBI"
HEADER_SIZE = struct.calcsize(HEADER_FORMAT)


class ChromaMode(IntEnum):
    MONO = 0
    YUV420 = 1
    YUV444 = 2


class PredictionMode(IntEnum):
    """
    Luma AC prediction of a transform block.
    """
    NONE = 0
    HORIZONTAL = 1
    VERTICAL = 2


class SuperblockPlan(PydanticBase):
    """
    Represents one node of the transform quad-tree of a superblock.

    Positions are relative to the superblock origin. Leaves carry the luma AC prediction
    mode; internal nodes carry four children in raster order (top-left, top-right,
    bottom-left, bottom-right).
    """
    size: int = SUPERBLOCK_SIZE
    y: int = 0
    x: int = 0
    children: Optional[List[SuperblockPlan]] = None
    mode: PredictionMode = PredictionMode.NONE

    @validator("size")
    def validate_size(cls, value):
        if value not in (4, 8, 16, 32, 64):
            raise ValueError(f"Block size <{value}> is not one of 4, 8, 16, 32, 64.")
        return value

    @root_validator(skip_on_failure=True)
    def validate_children(cls, values):
        children = values.get("children")
        if children is not None:
            half = values["size"] // 2
            expected = [(values["y"] + dy, values["x"] + dx, half) for dy in (0, half) for dx in (0, half)]
            if [(child.y, child.x, child.size) for child in children] != expected:
                raise ValueError(f"Children of the <{values['size']}> node at <{values['y']}, {values['x']}> "
                                 f"do not tile it.")
        return values

    class Config:
        extra = Extra.forbid

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    @classmethod
    def leaf(cls, size: int = SUPERBLOCK_SIZE, y: int = 0, x: int = 0) -> SuperblockPlan:
        return cls(size=size, y=y, x=x)

    @classmethod
    def split_node(cls, size: int, y: int, x: int, children: List[SuperblockPlan]) -> SuperblockPlan:
        return cls(size=size, y=y, x=x, children=children)

    @classmethod
    def uniform(cls, leaf_size: int, size: int = SUPERBLOCK_SIZE, y: int = 0, x: int = 0) -> SuperblockPlan:
        """
        Builds a plan whose leaves all have the same size.
        """
        if size <= leaf_size:
            return cls.leaf(size, y, x)
        half = size // 2
        return cls.split_node(size, y, x, [cls.uniform(leaf_size, half, y + dy, x + dx)
                                           for dy in (0, half) for dx in (0, half)])

    def leaves(self) -> Iterator[SuperblockPlan]:
        """
        Yields the leaves in coding (z-scan) order.
        """
        if self.children is None:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()

    def layout(self, origin_y: int = 0, origin_x: int = 0) -> List[Tuple[int, int, int]]:
        """
        Lists the leaves as frame-absolute (y, x, size) blocks.
        """
        return [(origin_y + leaf.y, origin_x + leaf.x, leaf.size) for leaf in self.leaves()]

    def chroma_plan(self, chroma_mode: ChromaMode) -> SuperblockPlan:
        """
        Derives the chroma plan: same tree for 4:4:4; for 4:2:0 every block size halves and
        luma 8x8 nodes split into 4x4 collapse into one 4x4 chroma block.
        """
        if chroma_mode == ChromaMode.YUV444:
            return self.copy(deep=True)
        if self.children is None or self.size == 8:
            return SuperblockPlan.leaf(self.size // 2, self.y // 2, self.x // 2)
        return SuperblockPlan.split_node(self.size // 2, self.y // 2, self.x // 2,
                                         [child.chroma_plan(chroma_mode) for child in self.children])


SuperblockPlan.update_forward_refs()


class FrameHeader(PydanticBase):
    """
    Represents the fixed 16-byte header preceding every entropy-coded frame payload.
    """
    version: int = Field(VERSION, ge=0, le=255)
    width: int = Field(gt=0, le=0xFFFF)
    height: int = Field(gt=0, le=0xFFFF)
    chroma_mode: ChromaMode
    qi: int = Field(ge=0, le=63)
    dering_t0: int = Field(0, ge=0, le=255)
    payload_length: int = Field(0, ge=0, le=0xFFFFFFFF)

    class Config:
        schema_extra = {
            "example": {
                "version": 1,
                "width": 352,
                "height": 288,
                "chroma_mode": 1,
                "qi": 32,
                "dering_t0": 20,
                "payload_length": 4096
            }
        }
        extra = Extra.forbid

    def cast_to_bytes(self) -> bytes:
        """
        Serializes the header.

        Returns:
            bytes: The 16 header bytes.
        """
        return struct.pack(HEADER_FORMAT, MAGIC, self.version, self.width, self.height, int(self.chroma_mode),
                           self.qi, self.dering_t0, self.payload_length)

    @classmethod
    def cast_from_bytes(cls, data: bytes, offset: int = 0) -> FrameHeader:
        """
        Parses a header, validating magic, version and field ranges.

        Args:
            data (bytes): Buffer holding the header.
            offset (int): Position of the header in the buffer.

        Returns:
            FrameHeader: The parsed header.
        """
        if len(data) - offset < HEADER_SIZE:
            raise CorruptStreamError(f"Truncated frame header at offset <{offset}>.")
        magic, version, width, height, chroma, qi, t0, length = struct.unpack_from(HEADER_FORMAT, data, offset)
        if magic != MAGIC:
            raise CorruptStreamError(f"Bad magic <{magic!r}> at offset <{offset}>.")
        if version != VERSION:
            raise CorruptStreamError(f"Unsupported stream version <{version}>.")
        if chroma not in {mode.value for mode in ChromaMode}:
            raise CorruptStreamError(f"Unknown chroma mode <{chroma}>.")
        if width == 0 or height == 0 or qi > 63:
            raise CorruptStreamError(f"Invalid frame geometry <{width}x{height}> or quantizer <{qi}>.")
        return cls(version=version, width=width, height=height, chroma_mode=ChromaMode(chroma), qi=qi,
                   dering_t0=t0, payload_length=length)


class Frame(PydanticBase):
    """
    Represents a decoded picture: one luma plane and zero or two chroma planes of uint8 samples.
    """
    width: int = Field(gt=0, le=0xFFFF)
    height: int = Field(gt=0, le=0xFFFF)
    chroma_mode: ChromaMode = ChromaMode.MONO
    planes: List[np.ndarray]

    @root_validator(skip_on_failure=True)
    def validate_planes(cls, values):
        expected = plane_shapes(values["width"], values["height"], values["chroma_mode"])
        planes = values["planes"]
        if [plane.shape for plane in planes] != expected:
            raise ValueError(f"Plane shapes <{[plane.shape for plane in planes]}> do not match <{expected}>.")
        values["planes"] = [np.ascontiguousarray(plane, dtype=np.uint8) for plane in planes]
        return values

    class Config:
        arbitrary_types_allowed = True
        extra = Extra.forbid

    def __eq__(self, other) -> bool:
        return (isinstance(other, Frame) and (self.width, self.height, self.chroma_mode)
                == (other.width, other.height, other.chroma_mode)
                and all(np.array_equal(a, b) for a, b in zip(self.planes, other.planes)))

    @property
    def luma(self) -> np.ndarray:
        return self.planes[0]


def plane_shapes(width: int, height: int, chroma_mode: ChromaMode) -> List[Tuple[int, int]]:
    """
    Returns the (rows, columns) of each plane of a frame.
    """
    if chroma_mode == ChromaMode.MONO:
        return [(height, width)]
    if chroma_mode == ChromaMode.YUV420:
        chroma = ((height + 1) // 2, (width + 1) // 2)
    else:
        chroma = (height, width)
    return [(height, width), chroma, chroma]


class EncoderConfig(PydanticBase):
    """
    Represents the per-call settings of the encoder.
    """
    qi: int = Field(32, ge=0, le=63)
    dering: Optional[int] = Field(None, ge=0, le=255)
    dering_enabled: bool = True
    cfl: bool = True
    min_block_size: int = 4
    lambda_scale: float = Field(0.12, gt=0)
    verify: bool = False

    @validator("min_block_size")
    def validate_min_block_size(cls, value):
        if value not in (4, 8, 16, 32, 64):
            raise ValueError(f"Minimum block size <{value}> is not one of 4, 8, 16, 32, 64.")
        return value

    class Config:
        schema_extra = {
            "example": {
                "qi": 32,
                "dering": None,
                "dering_enabled": True,
                "cfl": True,
                "min_block_size": 4,
                "lambda_scale": 0.12,
                "verify": False
            }
        }
        extra = Extra.forbid


class EncodedFrame(PydanticBase):
    """
    Represents the result of encoding one frame: the header and payload bytes, the
    reconstruction every decoder will produce, and the chosen superblock plans.
    """
    header: FrameHeader
    data: bytes
    reconstruction: Frame
    plans: List[SuperblockPlan] = []
    plane_bits: List[float] = []

    class Config:
        arbitrary_types_allowed = True
        extra = Extra.forbid

    @property
    def size(self) -> int:
        return len(self.data)
