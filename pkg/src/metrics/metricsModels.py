"""
This module defines the Pydantic model of a quality report.
"""

import math
from typing import List

from pydantic import BaseModel as PydanticBase, Extra

PLANE_NAMES = ("y", "cb", "cr")


class PsnrReport(PydanticBase):
    """
    Represents the per-plane mean squared error and PSNR of one picture or sequence, plus the
    weighted PSNR over all planes.
    """
    mse: List[float]
    psnr: List[float]
    weighted: float

    class Config:
        schema_extra = {
            "example": {
                "mse": [4.25, 1.5, 1.75],
                "psnr": [41.8469, 46.3699, 45.7004],
                "weighted": 42.848
            }
        }
        extra = Extra.forbid

    def rows(self) -> List[List[str]]:
        """
        Tab-separated output rows: one per plane, then the weighted value.
        """
        rows = [["psnr", name, format_db(value)] for name, value in zip(PLANE_NAMES, self.psnr)]
        rows.append(["psnr", "weighted", format_db(self.weighted)])
        return rows


def format_db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"
