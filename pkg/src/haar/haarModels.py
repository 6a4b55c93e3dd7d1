"""
This module defines Pydantic models for superblock DC trees and the neighbour DC predictor.
"""

from __future__ import annotations

from typing import Iterator, List, Optional

from pydantic import BaseModel as PydanticBase, Field, Extra, root_validator

from ..util import round_div


class DcTree(PydanticBase):
    """
    Represents one node of a superblock DC quad-tree.

    Leaves hold the DC of a transform block. Internal nodes hold the Haar combination
    of their four children (dc, h, v, diag), children in raster order.
    """
    size: int
    y: int = 0
    x: int = 0
    dc: int = 0
    h: Optional[int] = None
    v: Optional[int] = None
    diag: Optional[int] = None
    children: Optional[List[DcTree]] = None

    class Config:
        extra = Extra.forbid

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    def leaves(self) -> Iterator[DcTree]:
        if self.children is None:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()

    def leaf_dcs(self) -> List[int]:
        """
        Returns the leaf DCs in z-scan order.
        """
        return [leaf.dc for leaf in self.leaves()]


DcTree.update_forward_refs()


class DcPredictorWeights(PydanticBase):
    """
    Integer weights, over a common denominator, of the left, top-left, top and top-right
    superblock DCs. The weights must sum to the denominator.
    """
    left: int = 5
    top_left: int = -2
    top: int = 8
    top_right: int = 5
    denominator: int = Field(16, gt=0)

    @root_validator(skip_on_failure=True)
    def validate_unity_sum(cls, values):
        total = values["left"] + values["top_left"] + values["top"] + values["top_right"]
        if total != values["denominator"]:
            raise ValueError(f"Weights sum to <{total}>, not to the denominator <{values['denominator']}>.")
        return values

    class Config:
        schema_extra = {
            "example": {
                "left": 5,
                "top_left": -2,
                "top": 8,
                "top_right": 5,
                "denominator": 16
            }
        }
        extra = Extra.forbid
        allow_mutation = False

    def predict(self, left: Optional[int], top_left: Optional[int], top: Optional[int],
                top_right: Optional[int]) -> int:
        """
        Predicts a superblock DC from the decoded neighbours that exist.

        The weights of the missing neighbours are dropped and the rest renormalized, so the
        effective weights always sum to one. Without any neighbour the prediction is 0.

        Args:
            left (int, optional): DC of the left superblock.
            top_left (int, optional): DC of the top-left superblock.
            top (int, optional): DC of the superblock above.
            top_right (int, optional): DC of the top-right superblock.

        Returns:
            int: The predicted DC.
        """
        pairs = [(w, dc) for w, dc in ((self.left, left), (self.top_left, top_left), (self.top, top),
                                       (self.top_right, top_right)) if dc is not None]
        if not pairs:
            return 0
        weight = sum(w for w, _ in pairs)
        if weight <= 0:
            return round_div(sum(dc for _, dc in pairs), len(pairs))
        return round_div(sum(w * dc for w, dc in pairs), weight)
