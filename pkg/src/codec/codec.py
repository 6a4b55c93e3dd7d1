"""
Frame encoder and decoder.

A frame is padded to whole 64x64 superblocks and centred around zero. The encoder picks a
transform split per superblock, prefilters every plane across the chosen block edges and
then codes the superblocks in raster order: split flags, then per plane the Haar DC tree
followed by the PVQ bands of every transform block (luma with horizontal/vertical AC
prediction, chroma with chroma-from-luma). After the last superblock the planes are
postfiltered, derung with the per-superblock levels coded at the end of the payload and
cropped. The encoder keeps exactly the state the decoder rebuilds, so its reconstruction is
the decoder output.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .codecModels import (HEADER_SIZE, SUPERBLOCK_SIZE, ChromaMode, EncodedFrame, EncoderConfig, Frame,
                          FrameHeader, PredictionMode, SuperblockPlan, plane_shapes)
from ..cfl.cfl import make_chroma_predictor
from ..dering.dering import choose_dering_levels, default_threshold, dering_frame, superblock_sse
from ..dering.deringModels import LEVEL_FACTORS, DeringParams
from ..entropy.entropy import RangeDecoder, RangeEncoder
from ..entropy.entropyModels import ModelSet
from ..exceptions import CodecException, CorruptStreamError, ExitStatus
from ..haar.haar import Neighbors, haar_step, superblock_dc_decode, superblock_dc_encode
from ..pvq.pvq import DEFAULT_LAMBDA_SCALE, band_arrays, pvq_decode_band, pvq_encode_band
from ..pvq.pvqModels import GainMode
from ..transforms.transformModels import COEFF_SHIFT
from ..transforms.transforms import dct2d, idct2d, postfilter_plane, prefilter_plane
from ..util import round_div, round_half_away, round_shift

logger = logging.getLogger(__name__)

MIN_BLOCK = 4
# Largest leaf DC a valid stream can produce (255 << COEFF_SHIFT times the largest block size).
DC_LIMIT = 1 << 24


class _FrameParams(NamedTuple):
    quantizer: int
    q: int
    lam: float
    chroma_mode: ChromaMode
    cfl: bool


def quantizer_for_index(qi: int) -> int:
    """
    Maps a quantizer index to the quantizer: round(2^(qi / 6 + 1)), doubling every 6 steps.

    Args:
        qi (int): Quantizer index, 0..63.

    Returns:
        int: Q in pixel units.
    """
    if not 0 <= qi <= 63:
        raise ValueError(f"Quantizer index <{qi}> is outside 0..63.")
    return round_half_away(2.0 ** (qi / 6 + 1))


def _frame_params(qi: int, chroma_mode: ChromaMode, lambda_scale: float, cfl: bool) -> _FrameParams:
    quantizer = quantizer_for_index(qi)
    q = quantizer << COEFF_SHIFT
    return _FrameParams(quantizer=quantizer, q=q, lam=lambda_scale * q * q, chroma_mode=chroma_mode, cfl=cfl)


def available_modes(left: Optional[np.ndarray], above: Optional[np.ndarray]) -> List[PredictionMode]:
    """
    Lists the luma prediction modes of a block, given its decoded same-size neighbours.
    """
    modes = [PredictionMode.NONE]
    if left is not None:
        modes.append(PredictionMode.HORIZONTAL)
    if above is not None:
        modes.append(PredictionMode.VERTICAL)
    return modes


def hv_predict_ac(mode: PredictionMode, left: Optional[np.ndarray], above: Optional[np.ndarray],
                  size: int) -> np.ndarray:
    """
    Builds the AC prediction of a luma block from its neighbours' reconstructed coefficients.

    Horizontal prediction copies the first column of AC coefficients of the left block,
    vertical prediction the first row of the block above. Every other coefficient is zero.

    Args:
        mode (PredictionMode): The prediction mode.
        left (np.ndarray, optional): Coefficients of the left block of the same size.
        above (np.ndarray, optional): Coefficients of the block above of the same size.
        size (int): Block size.

    Returns:
        np.ndarray: size x size int64 prediction; all zero for PredictionMode.NONE.
    """
    r = np.zeros((size, size), dtype=np.int64)
    if mode == PredictionMode.HORIZONTAL:
        if left is None or left.shape != (size, size):
            raise ValueError("Horizontal prediction needs a decoded left block of the same size.")
        r[1:, 0] = left[1:, 0]
    elif mode == PredictionMode.VERTICAL:
        if above is None or above.shape != (size, size):
            raise ValueError("Vertical prediction needs a decoded block above of the same size.")
        r[0, 1:] = above[0, 1:]
    return r


def _encode_ac(block: np.ndarray, r: Optional[np.ndarray], plane: int, gain_mode: GainMode, params: _FrameParams,
               models: ModelSet, enc: RangeEncoder) -> np.ndarray:
    size = block.shape[0]
    x = block.reshape(-1)
    prediction = None if r is None else r.reshape(-1)
    out = np.zeros(size * size, dtype=np.int64)
    for index, band in enumerate(band_arrays(size)):
        _, recon = pvq_encode_band(x[band], None if prediction is None else prediction[band], params.q, models,
                                   enc, ("band", plane, size, index), gain_mode, params.lam)
        out[band] = recon
    return out.reshape(size, size)


def _decode_ac(size: int, r: Optional[np.ndarray], plane: int, gain_mode: GainMode, params: _FrameParams,
               models: ModelSet, dec: RangeDecoder) -> np.ndarray:
    prediction = None if r is None else r.reshape(-1)
    out = np.zeros(size * size, dtype=np.int64)
    for index, band in enumerate(band_arrays(size)):
        _, recon = pvq_decode_band(band.size, None if prediction is None else prediction[band], params.q, models,
                                   dec, ("band", plane, size, index), gain_mode)
        out[band] = recon
    return out.reshape(size, size)


def _ac_error(block: np.ndarray, recon: np.ndarray) -> float:
    diff = (block - recon).astype(np.float64)
    diff[0, 0] = 0.0
    return float(np.sum(diff * diff))


def _mode_context(modes: Sequence[PredictionMode]) -> tuple:
    return ("mode",) + tuple(int(mode) for mode in modes)


def _write_mode(mode: PredictionMode, modes: List[PredictionMode], models: ModelSet, enc: RangeEncoder) -> None:
    if len(modes) > 1:
        enc.encode_symbol(models.get(_mode_context(modes), len(modes)), modes.index(mode))


def _read_mode(modes: List[PredictionMode], models: ModelSet, dec: RangeDecoder) -> PredictionMode:
    if len(modes) == 1:
        return modes[0]
    return modes[dec.decode_symbol(models.get(_mode_context(modes), len(modes)))]


def _choose_mode(block: np.ndarray, modes: List[PredictionMode], left: Optional[np.ndarray],
                 above: Optional[np.ndarray], params: _FrameParams, models: ModelSet,
                 enc: RangeEncoder) -> PredictionMode:
    if len(modes) == 1:
        return modes[0]
    best = None
    for mode in modes:
        trial_models = models.fork()
        trial = enc.clone(with_output=False)
        start = trial.tell()
        _write_mode(mode, modes, trial_models, trial)
        recon = _encode_ac(block, hv_predict_ac(mode, left, above, block.shape[0]), 0, GainMode.RELATIVE, params,
                           trial_models, trial)
        cost = _ac_error(block, recon) + params.lam * (trial.tell() - start)
        if best is None or cost < best[0]:
            best = (cost, mode)
    return best[1]


def _split_context(size: int) -> tuple:
    return "split", size


def plan_blocksizes(source: np.ndarray, quantizer: int, lam: Optional[float] = None, models: Optional[ModelSet] = None,
                    enc: Optional[RangeEncoder] = None, min_block_size: int = MIN_BLOCK) -> SuperblockPlan:
    """
    Chooses the transform split of one superblock by bottom-up rate-distortion search.

    Every node is trial coded as a single transform block (DC quantized with the Haar step of
    its size, AC bands with PVQ on forked models and a cloned coder) and compared with the
    sum of its children's costs, J = D + lambda R including the split flag. Ties keep the
    larger block.

    Args:
        source (np.ndarray): 64x64 centred luma samples, COEFF_SHIFT fractional bits.
        quantizer (int): Frame quantizer Q.
        lam (float, optional): Lagrange multiplier in coefficient units; default 0.12 (16 Q)^2.
        models (ModelSet, optional): Models the estimates start from.
        enc (RangeEncoder, optional): Coder state the estimates start from.
        min_block_size (int): Smallest leaf the search may produce.

    Returns:
        SuperblockPlan: The chosen split with every leaf in PredictionMode.NONE.
    """
    q = quantizer << COEFF_SHIFT
    lam = DEFAULT_LAMBDA_SCALE * q * q if lam is None else lam
    models = models if models is not None else ModelSet()
    enc = enc if enc is not None else RangeEncoder()
    params = _FrameParams(quantizer=quantizer, q=q, lam=lam, chroma_mode=ChromaMode.MONO, cfl=False)

    def split_bits(size: int, split: bool) -> float:
        if size <= MIN_BLOCK:
            return 0.0
        return models.get(_split_context(size), 2).cost(int(split))

    def leaf_cost(y: int, x: int, size: int) -> float:
        block = dct2d(source[y:y + size, x:x + size])
        step = haar_step(quantizer, size)
        dc = int(block[0, 0])
        dc_error = float(dc - round_div(dc, step) * step) ** 2
        trial = enc.clone(with_output=False)
        start = trial.tell()
        recon = _encode_ac(block, None, 0, GainMode.RELATIVE, params, models.fork(), trial)
        return dc_error + _ac_error(block, recon) + lam * (trial.tell() - start)

    def search(y: int, x: int, size: int) -> Tuple[float, SuperblockPlan]:
        leaf = leaf_cost(y, x, size) + lam * split_bits(size, False)
        if size <= max(min_block_size, MIN_BLOCK):
            return leaf, SuperblockPlan.leaf(size, y, x)
        half = size // 2
        children = [search(y + dy, x + dx, half) for dy in (0, half) for dx in (0, half)]
        split = sum(cost for cost, _ in children) + lam * split_bits(size, True)
        if split < leaf:
            return split, SuperblockPlan.split_node(size, y, x, [plan for _, plan in children])
        return leaf, SuperblockPlan.leaf(size, y, x)

    return search(0, 0, source.shape[0])[1]


def _write_plan(node: SuperblockPlan, models: ModelSet, enc: RangeEncoder) -> None:
    if node.size > MIN_BLOCK:
        enc.encode_bool(not node.is_leaf, models.get(_split_context(node.size), 2))
    for child in node.children or ():
        _write_plan(child, models, enc)


def _read_plan(models: ModelSet, dec: RangeDecoder, size: int = SUPERBLOCK_SIZE, y: int = 0,
               x: int = 0) -> SuperblockPlan:
    if size > MIN_BLOCK and dec.decode_bool(models.get(_split_context(size), 2)):
        half = size // 2
        return SuperblockPlan.split_node(size, y, x, [_read_plan(models, dec, half, y + dy, x + dx)
                                                      for dy in (0, half) for dx in (0, half)])
    return SuperblockPlan.leaf(size, y, x)


class _Reconstruction:
    """
    Decoder state of a frame: prefiltered-domain planes, reconstructed coefficients of every
    transform block and the root DC of every superblock.
    """

    def __init__(self, shapes: Sequence[Tuple[int, int]], sb_sizes: Sequence[int]):
        self.planes = [np.zeros(shape, dtype=np.int64) for shape in shapes]
        self.sb_sizes = list(sb_sizes)
        self.blocks: List[Dict[Tuple[int, int, int], np.ndarray]] = [{} for _ in shapes]
        self.root_dcs: List[Dict[Tuple[int, int], int]] = [{} for _ in shapes]

    def neighbors(self, plane: int, sby: int, sbx: int) -> Neighbors:
        dcs = self.root_dcs[plane]
        return dcs.get((sby, sbx - 1)), dcs.get((sby - 1, sbx - 1)), dcs.get((sby - 1, sbx)), dcs.get((sby - 1, sbx + 1))

    def block(self, plane: int, y: int, x: int, size: int) -> Optional[np.ndarray]:
        return self.blocks[plane].get((y, x, size))

    def store(self, plane: int, y: int, x: int, coeffs: np.ndarray) -> None:
        size = coeffs.shape[0]
        self.blocks[plane][(y, x, size)] = coeffs
        self.planes[plane][y:y + size, x:x + size] = idct2d(coeffs)

    def cfl_prediction(self, y: int, x: int, size: int, params: _FrameParams) -> Optional[np.ndarray]:
        if not params.cfl:
            return None
        scale = 2 if params.chroma_mode == ChromaMode.YUV420 else 1
        predictor = make_chroma_predictor(self.block(0, y * scale, x * scale, size * scale), size, params.chroma_mode)
        return predictor.r if predictor.available else None


def _geometry(width: int, height: int, chroma_mode: ChromaMode) -> Tuple[List[Tuple[int, int]], List[int], Tuple[int, int]]:
    rows = -(-height // SUPERBLOCK_SIZE)
    cols = -(-width // SUPERBLOCK_SIZE)
    luma = (rows * SUPERBLOCK_SIZE, cols * SUPERBLOCK_SIZE)
    if chroma_mode == ChromaMode.MONO:
        return [luma], [SUPERBLOCK_SIZE], (rows, cols)
    if chroma_mode == ChromaMode.YUV420:
        chroma = (luma[0] // 2, luma[1] // 2)
        half = SUPERBLOCK_SIZE // 2
        return [luma, chroma, chroma], [SUPERBLOCK_SIZE, half, half], (rows, cols)
    return [luma, luma, luma], [SUPERBLOCK_SIZE] * 3, (rows, cols)


def _plane_plans(plan: SuperblockPlan, chroma_mode: ChromaMode) -> List[SuperblockPlan]:
    if chroma_mode == ChromaMode.MONO:
        return [plan]
    chroma = plan.chroma_plan(chroma_mode)
    return [plan, chroma, chroma]


def _layouts(plans: Sequence[SuperblockPlan], grid: Tuple[int, int], sb_sizes: Sequence[int],
             chroma_mode: ChromaMode) -> List[List[Tuple[int, int, int]]]:
    layouts = [[] for _ in sb_sizes]
    for index, plan in enumerate(plans):
        sby, sbx = divmod(index, grid[1])
        for plane, node in enumerate(_plane_plans(plan, chroma_mode)):
            layouts[plane].extend(node.layout(sby * sb_sizes[plane], sbx * sb_sizes[plane]))
    return layouts


def _to_pixels(plane: np.ndarray, layout: Sequence[Tuple[int, int, int]]) -> np.ndarray:
    return np.clip(round_shift(postfilter_plane(plane, layout), COEFF_SHIFT) + 128, 0, 255)


def _crop(pixels: Sequence[np.ndarray], width: int, height: int, chroma_mode: ChromaMode) -> Frame:
    shapes = plane_shapes(width, height, chroma_mode)
    return Frame(width=width, height=height, chroma_mode=chroma_mode,
                 planes=[plane[:rows, :cols] for plane, (rows, cols) in zip(pixels, shapes)])


def _frame_sse(a: Sequence[np.ndarray], b: Sequence[np.ndarray], sb_sizes: Sequence[int],
               visible: Sequence[Tuple[int, int]]) -> int:
    return int(sum(superblock_sse(x, y, size, shown).sum() for x, y, size, shown in zip(a, b, sb_sizes, visible)))


def _encode_superblock(sby: int, sbx: int, plan: SuperblockPlan, filtered: Sequence[np.ndarray],
                       state: _Reconstruction, params: _FrameParams, models: ModelSet, enc: RangeEncoder,
                       plane_bits: List[float]) -> None:
    start = enc.tell()
    _write_plan(plan, models, enc)
    plane_bits[0] += enc.tell() - start
    for plane, node in enumerate(_plane_plans(plan, params.chroma_mode)):
        start = enc.tell()
        sb_size = state.sb_sizes[plane]
        oy, ox = sby * sb_size, sbx * sb_size
        leaves = list(node.leaves())
        blocks = [dct2d(filtered[plane][oy + leaf.y:oy + leaf.y + leaf.size, ox + leaf.x:ox + leaf.x + leaf.size])
                  for leaf in leaves]
        tree = superblock_dc_encode(node, [int(block[0, 0]) for block in blocks], state.neighbors(plane, sby, sbx),
                                    params.quantizer, enc, models, plane=plane)
        state.root_dcs[plane][(sby, sbx)] = tree.dc
        for leaf, block, dc in zip(leaves, blocks, tree.leaf_dcs()):
            y, x = oy + leaf.y, ox + leaf.x
            if plane == 0:
                left = state.block(0, y, x - leaf.size, leaf.size)
                above = state.block(0, y - leaf.size, x, leaf.size)
                modes = available_modes(left, above)
                leaf.mode = _choose_mode(block, modes, left, above, params, models, enc)
                _write_mode(leaf.mode, modes, models, enc)
                recon = _encode_ac(block, hv_predict_ac(leaf.mode, left, above, leaf.size), plane,
                                   GainMode.RELATIVE, params, models, enc)
            else:
                recon = _encode_ac(block, state.cfl_prediction(y, x, leaf.size, params), plane, GainMode.DIRECT,
                                   params, models, enc)
            recon[0, 0] = dc
            state.store(plane, y, x, recon)
        plane_bits[plane] += enc.tell() - start


def _decode_superblock(sby: int, sbx: int, state: _Reconstruction, params: _FrameParams, models: ModelSet,
                       dec: RangeDecoder) -> SuperblockPlan:
    plan = _read_plan(models, dec)
    for plane, node in enumerate(_plane_plans(plan, params.chroma_mode)):
        sb_size = state.sb_sizes[plane]
        oy, ox = sby * sb_size, sbx * sb_size
        tree = superblock_dc_decode(node, state.neighbors(plane, sby, sbx), params.quantizer, dec, models,
                                    plane=plane)
        dcs = tree.leaf_dcs()
        if any(abs(dc) > DC_LIMIT for dc in dcs):
            raise CorruptStreamError(f"DC out of range in superblock <{sby}, {sbx}> of plane <{plane}>.")
        state.root_dcs[plane][(sby, sbx)] = tree.dc
        for leaf, dc in zip(node.leaves(), dcs):
            y, x = oy + leaf.y, ox + leaf.x
            if plane == 0:
                left = state.block(0, y, x - leaf.size, leaf.size)
                above = state.block(0, y - leaf.size, x, leaf.size)
                leaf.mode = _read_mode(available_modes(left, above), models, dec)
                recon = _decode_ac(leaf.size, hv_predict_ac(leaf.mode, left, above, leaf.size), plane,
                                   GainMode.RELATIVE, params, models, dec)
            else:
                recon = _decode_ac(leaf.size, state.cfl_prediction(y, x, leaf.size, params), plane, GainMode.DIRECT,
                                   params, models, dec)
            recon[0, 0] = dc
            state.store(plane, y, x, recon)
    return plan


def _dering_context() -> tuple:
    return ("dering",)


def encode_frame(frame: Frame, config: Optional[EncoderConfig] = None) -> EncodedFrame:
    """
    Encodes one frame.

    Args:
        frame (Frame): The source frame.
        config (EncoderConfig, optional): Encoder settings.

    Returns:
        EncodedFrame: Header plus payload bytes and the reconstruction the decoder will produce.
    """
    config = config or EncoderConfig()
    chroma_mode = frame.chroma_mode
    params = _frame_params(config.qi, chroma_mode, config.lambda_scale, config.cfl and chroma_mode != ChromaMode.MONO)
    shapes, sb_sizes, grid = _geometry(frame.width, frame.height, chroma_mode)
    visible = plane_shapes(frame.width, frame.height, chroma_mode)
    sources = [np.pad(plane.astype(np.int64), ((0, shape[0] - plane.shape[0]), (0, shape[1] - plane.shape[1])),
                      mode="symmetric") for plane, shape in zip(frame.planes, shapes)]
    centred = [(plane - 128) << COEFF_SHIFT for plane in sources]

    models = ModelSet()
    enc = RangeEncoder()
    planning = models.fork()
    plans = []
    for sby in range(grid[0]):
        for sbx in range(grid[1]):
            y, x = sby * SUPERBLOCK_SIZE, sbx * SUPERBLOCK_SIZE
            plans.append(plan_blocksizes(centred[0][y:y + SUPERBLOCK_SIZE, x:x + SUPERBLOCK_SIZE], params.quantizer,
                                         params.lam, planning, enc, config.min_block_size))
    layouts = _layouts(plans, grid, sb_sizes, chroma_mode)
    filtered = [prefilter_plane(plane, layout) for plane, layout in zip(centred, layouts)]

    if chroma_mode != ChromaMode.MONO:
        enc.encode_bool(params.cfl)
    state = _Reconstruction(shapes, sb_sizes)
    plane_bits = [0.0] * len(shapes)
    for index, plan in enumerate(plans):
        sby, sbx = divmod(index, grid[1])
        _encode_superblock(sby, sbx, plan, filtered, state, params, models, enc, plane_bits)
        logger.debug("superblock <%d, %d>: %d leaves", sby, sbx, len(list(plan.leaves())))

    pixels = [_to_pixels(plane, layout) for plane, layout in zip(state.planes, layouts)]
    t0 = 0
    if config.dering_enabled:
        t0 = config.dering if config.dering is not None else default_threshold(params.quantizer)
    if t0 > 0:
        levels, direction_maps = choose_dering_levels(sources, pixels, t0, grid, sb_sizes, visible)
        deringed = dering_frame(pixels, DeringParams(t0=t0, levels=levels), grid, sb_sizes,
                                direction_maps=direction_maps)
        if config.dering is None and _frame_sse(deringed, sources, sb_sizes, visible) > _frame_sse(pixels, sources,
                                                                                                  sb_sizes, visible):
            logger.debug("deringing at t0=%d increases the error, switched off", t0)
            t0 = 0
        else:
            pixels = deringed
            for level in levels:
                enc.encode_symbol(models.get(_dering_context(), len(LEVEL_FACTORS)), level)

    payload = enc.finish()
    header = FrameHeader(width=frame.width, height=frame.height, chroma_mode=chroma_mode, qi=config.qi,
                         dering_t0=t0, payload_length=len(payload))
    data = header.cast_to_bytes() + payload
    reconstruction = _crop(pixels, frame.width, frame.height, chroma_mode)
    logger.debug("frame %dx%d qi=%d: %d bytes", frame.width, frame.height, config.qi, len(data))

    if config.verify:
        decoded, _ = decode_frame(data)
        if decoded != reconstruction:
            raise CodecException(ExitStatus.FORMAT, f"Decoder output drifts from the encoder reconstruction at "
                                                     f"qi <{config.qi}>.")
    return EncodedFrame(header=header, data=data, reconstruction=reconstruction, plans=plans, plane_bits=plane_bits)


def _decode_payload(header: FrameHeader, payload: bytes) -> Frame:
    chroma_mode = header.chroma_mode
    shapes, sb_sizes, grid = _geometry(header.width, header.height, chroma_mode)
    models = ModelSet()
    dec = RangeDecoder(payload)
    cfl = dec.decode_bool() if chroma_mode != ChromaMode.MONO else False
    params = _frame_params(header.qi, chroma_mode, DEFAULT_LAMBDA_SCALE, cfl)
    state = _Reconstruction(shapes, sb_sizes)
    plans = [_decode_superblock(sby, sbx, state, params, models, dec)
             for sby in range(grid[0]) for sbx in range(grid[1])]
    layouts = _layouts(plans, grid, sb_sizes, chroma_mode)
    pixels = [_to_pixels(plane, layout) for plane, layout in zip(state.planes, layouts)]
    if header.dering_t0 > 0:
        levels = [dec.decode_symbol(models.get(_dering_context(), len(LEVEL_FACTORS))) for _ in plans]
        pixels = dering_frame(pixels, DeringParams(t0=header.dering_t0, levels=levels), grid, sb_sizes)
    return _crop(pixels, header.width, header.height, chroma_mode)


def decode_frame(data: bytes, offset: int = 0) -> Tuple[Frame, int]:
    """
    Decodes the frame starting at offset.

    Args:
        data (bytes): Stream bytes.
        offset (int): Position of the frame header.

    Returns:
        Tuple[Frame, int]: The decoded frame and the offset of the next frame.
    """
    header = FrameHeader.cast_from_bytes(data, offset)
    start = offset + HEADER_SIZE
    end = start + header.payload_length
    if end > len(data):
        raise CorruptStreamError(f"Payload of <{header.payload_length}> bytes at offset <{offset}> is truncated.")
    try:
        frame = _decode_payload(header, bytes(data[start:end]))
    except CodecException:
        raise
    except (ValueError, OverflowError, IndexError) as error:
        raise CorruptStreamError(f"Malformed payload at offset <{offset}>: {error}") from error
    return frame, end


def encode_sequence(frames: Sequence[Frame], config: Optional[EncoderConfig] = None,
                    threads: int = 1) -> List[EncodedFrame]:
    """
    Encodes independent frames, optionally in parallel. The bytes do not depend on threads.

    Args:
        frames (Sequence[Frame]): Source frames.
        config (EncoderConfig, optional): Encoder settings shared by all frames.
        threads (int): Worker threads.

    Returns:
        List[EncodedFrame]: Encoded frames in input order; concatenate their data for the stream.
    """
    if threads <= 1:
        return [encode_frame(frame, config) for frame in frames]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(partial(encode_frame, config=config), frames))


def split_stream(data: bytes) -> List[int]:
    """
    Returns the offsets of the frames of a stream of concatenated frames.
    """
    if not data:
        raise CorruptStreamError("Empty stream.")
    offsets = []
    offset = 0
    while offset < len(data):
        header = FrameHeader.cast_from_bytes(data, offset)
        offsets.append(offset)
        offset += HEADER_SIZE + header.payload_length
    if offset > len(data):
        raise CorruptStreamError(f"Last frame at offset <{offsets[-1]}> is truncated.")
    return offsets


def decode_stream(data: bytes, threads: int = 1) -> List[Frame]:
    """
    Decodes every frame of a stream.

    Args:
        data (bytes): Concatenated frames.
        threads (int): Worker threads.

    Returns:
        List[Frame]: Decoded frames in stream order.
    """
    offsets = split_stream(data)
    if threads <= 1:
        return [decode_frame(data, offset)[0] for offset in offsets]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return [frame for frame, _ in pool.map(partial(decode_frame, data), offsets)]
