"""
Readers and writers of raw media: YUV4MPEG2 (4:2:0, 4:4:4, mono) and binary PGM/PPM.

PPM files go through full-range BT.601 YCbCr 4:4:4.
"""

import logging
import os
from typing import List, Sequence, Tuple

import numpy as np

from .mediaModels import Y4M_FRAME, Y4M_SIGNATURE, MediaFormat, Y4mHeader
from ..codec.codecModels import ChromaMode, Frame, plane_shapes
from ..exceptions import UnsupportedFormatError

logger = logging.getLogger(__name__)

# Full-range BT.601 RGB -> YCbCr; offsets (0, 128, 128) are added separately.
RGB_TO_YCBCR = np.array([
    [0.299, 0.587, 0.114],
    [-0.168736, -0.331264, 0.5],
    [0.5, -0.418688, -0.081312],
])
YCBCR_TO_RGB = np.array([
    [1.0, 0.0, 1.402],
    [1.0, -0.344136, -0.714136],
    [1.0, 1.772, 0.0],
])
CHROMA_OFFSET = np.array([0.0, 128.0, 128.0])


def _to_uint8(values: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def rgb_to_ycbcr(rgb: np.ndarray) -> List[np.ndarray]:
    """
    Converts an H x W x 3 RGB image to three full-range YCbCr planes.
    """
    ycc = rgb.astype(np.float64) @ RGB_TO_YCBCR.T + CHROMA_OFFSET
    return [_to_uint8(ycc[..., channel]) for channel in range(3)]


def ycbcr_to_rgb(planes: Sequence[np.ndarray]) -> np.ndarray:
    """
    Converts three full-range YCbCr planes of equal size to an H x W x 3 RGB image.
    """
    ycc = np.stack([plane.astype(np.float64) for plane in planes], axis=-1) - CHROMA_OFFSET
    return _to_uint8(ycc @ YCBCR_TO_RGB.T)


def upsample_chroma(frame: Frame) -> List[np.ndarray]:
    """
    Returns the planes of a frame at luma resolution, repeating 4:2:0 chroma samples.
    """
    if frame.chroma_mode != ChromaMode.YUV420:
        return list(frame.planes)
    return [frame.luma] + [np.repeat(np.repeat(plane, 2, axis=0), 2, axis=1)[:frame.height, :frame.width]
                           for plane in frame.planes[1:]]


def read_y4m(data: bytes) -> List[Frame]:
    """
    Parses a YUV4MPEG2 stream.

    Args:
        data (bytes): File contents.

    Returns:
        List[Frame]: The frames.
    """
    end = data.find(b"\n")
    if not data.startswith(Y4M_SIGNATURE) or end < 0:
        raise UnsupportedFormatError("Not a YUV4MPEG2 file.")
    try:
        header = Y4mHeader.cast_from_line(data[:end])
    except ValueError as error:
        raise UnsupportedFormatError(f"Malformed Y4M header <{data[:end]!r}>.") from error
    shapes = plane_shapes(header.width, header.height, header.chroma_mode)
    frame_size = sum(rows * cols for rows, cols in shapes)
    frames = []
    position = end + 1
    while position < len(data):
        line_end = data.find(b"\n", position)
        if line_end < 0 or not data.startswith(Y4M_FRAME, position):
            raise UnsupportedFormatError(f"Missing FRAME marker at byte <{position}>.")
        position = line_end + 1
        if position + frame_size > len(data):
            raise UnsupportedFormatError(f"Truncated frame <{len(frames)}> at byte <{position}>.")
        planes = []
        for rows, cols in shapes:
            planes.append(np.frombuffer(data, dtype=np.uint8, count=rows * cols, offset=position).reshape(rows, cols))
            position += rows * cols
        frames.append(Frame(width=header.width, height=header.height, chroma_mode=header.chroma_mode, planes=planes))
    logger.debug("read %d y4m frames of %dx%d", len(frames), header.width, header.height)
    return frames


def write_y4m(frames: Sequence[Frame]) -> bytes:
    """
    Serializes frames of equal geometry as a YUV4MPEG2 stream.
    """
    if not frames:
        raise UnsupportedFormatError("No frames to write.")
    first = frames[0]
    header = Y4mHeader(width=first.width, height=first.height, chroma_mode=first.chroma_mode)
    chunks = [header.cast_to_bytes()]
    for frame in frames:
        if (frame.width, frame.height, frame.chroma_mode) != (first.width, first.height, first.chroma_mode):
            raise UnsupportedFormatError("Frames of a Y4M stream must share size and chroma format.")
        chunks.append(Y4M_FRAME + b"\n")
        chunks.extend(plane.tobytes() for plane in frame.planes)
    return b"".join(chunks)


def _pnm_header(data: bytes) -> Tuple[str, int, int, int]:
    tokens = []
    position = 0
    while len(tokens) < 4:
        end = data.find(b"\n", position)
        if end < 0:
            raise UnsupportedFormatError("Truncated PNM header.")
        line = data[position:end]
        sharp = line.find(b"#")
        if sharp > -1:
            line = line[:sharp]
        tokens.extend(line.split())
        position = end + 1
    if len(tokens) > 4:
        raise UnsupportedFormatError("PNM header and pixel data must be separated by a newline.")
    magic = tokens[0].decode("ascii", errors="replace")
    if magic not in ("P5", "P6"):
        raise UnsupportedFormatError(f"Unsupported PNM type <{magic}>; only binary P5 and P6 are read.")
    try:
        width, height, maxval = (int(token) for token in tokens[1:4])
    except ValueError:
        raise UnsupportedFormatError(f"Malformed PNM header <{tokens!r}>.") from None
    if maxval != 255:
        raise UnsupportedFormatError(f"Unsupported PNM maxval <{maxval}>; only 8-bit files are read.")
    return magic, width, height, position


def read_pnm(data: bytes) -> Frame:
    """
    Parses a binary PGM (mono frame) or PPM (4:4:4 frame) image.

    Args:
        data (bytes): File contents.

    Returns:
        Frame: The image.
    """
    magic, width, height, position = _pnm_header(data)
    channels = 1 if magic == "P5" else 3
    if len(data) - position < width * height * channels:
        raise UnsupportedFormatError(f"Truncated {magic} pixel data for <{width}x{height}>.")
    pixels = np.frombuffer(data, dtype=np.uint8, count=width * height * channels, offset=position)
    if channels == 1:
        return Frame(width=width, height=height, chroma_mode=ChromaMode.MONO, planes=[pixels.reshape(height, width)])
    return Frame(width=width, height=height, chroma_mode=ChromaMode.YUV444,
                 planes=rgb_to_ycbcr(pixels.reshape(height, width, 3)))


def write_pnm(frame: Frame, media_format: MediaFormat) -> bytes:
    """
    Serializes a frame as PGM (luma only) or PPM (RGB).
    """
    if media_format == MediaFormat.PGM:
        return f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii") + frame.luma.tobytes()
    if frame.chroma_mode == ChromaMode.MONO:
        rgb = np.repeat(frame.luma[..., None], 3, axis=-1)
    else:
        rgb = ycbcr_to_rgb(upsample_chroma(frame))
    return f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii") + rgb.tobytes()


def read_frames(path: str) -> List[Frame]:
    """
    Reads every frame of a Y4M, PGM or PPM file, chosen by suffix.

    Args:
        path (str): File path.

    Returns:
        List[Frame]: The frames.
    """
    media_format = MediaFormat.from_suffix(os.path.splitext(path)[1])
    with open(path, "rb") as handle:
        data = handle.read()
    if media_format == MediaFormat.Y4M:
        return read_y4m(data)
    return [read_pnm(data)]


def write_frames(path: str, frames: Sequence[Frame]) -> None:
    """
    Writes frames to a Y4M file, or a single frame to a PGM or PPM file, chosen by suffix.
    """
    media_format = MediaFormat.from_suffix(os.path.splitext(path)[1])
    if media_format == MediaFormat.Y4M:
        data = write_y4m(frames)
    elif len(frames) != 1:
        raise UnsupportedFormatError(f"A {media_format.value} file holds one frame, not <{len(frames)}>.")
    else:
        data = write_pnm(frames[0], media_format)
    with open(path, "wb") as handle:
        handle.write(data)
