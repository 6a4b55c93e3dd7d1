"""
This module defines Pydantic models describing raw media files.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional

from pydantic import BaseModel as PydanticBase, Field, Extra

from ..codec.codecModels import ChromaMode
from ..exceptions import UnsupportedFormatError

Y4M_SIGNATURE = b"YUV4MPEG2"
Y4M_FRAME = b"FRAME"

# Colorspace tags of Y4M headers the codec accepts; a missing tag means 4:2:0.
Y4M_COLORSPACES = {
    "420": ChromaMode.YUV420,
    "420jpeg": ChromaMode.YUV420,
    "420paldv": ChromaMode.YUV420,
    "420mpeg2": ChromaMode.YUV420,
    "444": ChromaMode.YUV444,
    "mono": ChromaMode.MONO,
}
Y4M_TAGS = {ChromaMode.YUV420: "420jpeg", ChromaMode.YUV444: "444", ChromaMode.MONO: "mono"}


class MediaFormat(str, Enum):
    Y4M = "y4m"
    PGM = "pgm"
    PPM = "ppm"

    @classmethod
    def from_suffix(cls, suffix: str) -> MediaFormat:
        """
        Maps a file suffix (with or without dot) to a format.
        """
        try:
            return cls(suffix.lower().lstrip("."))
        except ValueError:
            raise UnsupportedFormatError(f"Unsupported file type <{suffix}>; use .y4m, .pgm or .ppm.") from None


class Y4mHeader(PydanticBase):
    """
    Represents the stream header of a YUV4MPEG2 file.
    """
    width: int = Field(gt=0, le=0xFFFF)
    height: int = Field(gt=0, le=0xFFFF)
    chroma_mode: ChromaMode = ChromaMode.YUV420
    frame_rate: str = "30:1"
    interlace: str = "p"
    aspect: str = "1:1"
    extra: Optional[str] = None

    class Config:
        schema_extra = {
            "example": {
                "width": 352,
                "height": 288,
                "chroma_mode": 1,
                "frame_rate": "30:1",
                "interlace": "p",
                "aspect": "1:1"
            }
        }
        extra = Extra.forbid

    def cast_to_bytes(self) -> bytes:
        """
        Serializes the header line, newline included.
        """
        line = (f"YUV4MPEG2 W{self.width} H{self.height} F{self.frame_rate} I{self.interlace} A{self.aspect} "
                f"C{Y4M_TAGS[self.chroma_mode]}")
        if self.extra:
            line += f" X{self.extra}"
        return line.encode("ascii") + b"\n"

    @classmethod
    def cast_from_line(cls, line: bytes) -> Y4mHeader:
        """
        Parses a header line (without the newline).

        Args:
            line (bytes): The header line.

        Returns:
            Y4mHeader: The header.
        """
        tokens = line.decode("ascii", errors="replace").split()
        if not tokens or tokens[0] != Y4M_SIGNATURE.decode():
            raise UnsupportedFormatError("Missing YUV4MPEG2 signature.")
        values = {}
        for token in tokens[1:]:
            key, value = token[0], token[1:]
            if key == "W":
                values["width"] = int(value)
            elif key == "H":
                values["height"] = int(value)
            elif key == "F":
                values["frame_rate"] = value
            elif key == "I":
                values["interlace"] = value
            elif key == "A":
                values["aspect"] = value
            elif key == "C":
                if value not in Y4M_COLORSPACES:
                    raise UnsupportedFormatError(f"Unsupported Y4M colorspace <C{value}>.")
                values["chroma_mode"] = Y4M_COLORSPACES[value]
            elif key == "X":
                values["extra"] = value
        if "width" not in values or "height" not in values:
            raise UnsupportedFormatError("Y4M header lacks the W or H tag.")
        return cls(**values)
