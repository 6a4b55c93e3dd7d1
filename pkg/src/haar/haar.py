"""
Recursive 2x2 Haar coding of transform-block DCs inside a superblock.

DCs are combined bottom-up along the transform quad-tree. The superblock DC is coded as a
residual against a weighted prediction from neighbouring superblocks; the horizontal and
vertical Haar coefficients of every node are predicted from those of its parent node and
the diagonal ones are coded as they are. Everything is scalar quantized with a step that
gets finer at larger scales and coded with the escaped scalar code of the range coder.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

from .haarModels import DcPredictorWeights, DcTree
from ..codec.codecModels import SuperblockPlan
from ..entropy.entropy import RangeDecoder, RangeEncoder
from ..entropy.entropyModels import ModelSet
from ..transforms.transformModels import COEFF_SHIFT
from ..util import round_div, round_half_away

logger = logging.getLogger(__name__)

DEFAULT_WEIGHTS = DcPredictorWeights()

Neighbors = Tuple[Optional[int], Optional[int], Optional[int], Optional[int]]


def haar4_forward(a: int, b: int, c: int, d: int) -> Tuple[int, int, int, int]:
    """
    Integer lifting 2x2 Haar transform.

    Args:
        a (int): Top-left value.
        b (int): Top-right value.
        c (int): Bottom-left value.
        d (int): Bottom-right value.

    Returns:
        Tuple[int, int, int, int]: (dc, h, v, diag), approximately (a+b+c+d)/2, (a-b+c-d)/2,
        (a+b-c-d)/2 and (a-b-c+d)/2.
    """
    a1 = a + c
    d1 = d - b
    e = (a1 - d1) >> 1
    h = e - b
    v = e - c
    return a1 - h, h, v, d1 + v


def haar4_inverse(dc: int, h: int, v: int, diag: int) -> Tuple[int, int, int, int]:
    """
    Exact inverse of haar4_forward.
    """
    a1 = dc + h
    d1 = diag - v
    e = (a1 - d1) >> 1
    b = e - h
    c = e - v
    return a1 - c, b, c, d1 + b


def haar_step(q: int, size: int) -> int:
    """
    Quantizer step of the Haar coefficients of a node: Q * 2^(-L/2) with L = log2(size) - 2,
    in coefficient units.

    Args:
        q (int): Frame quantizer.
        size (int): Node size (4..64).

    Returns:
        int: The step, at least 1.
    """
    level = int(math.log2(size)) - 2
    return max(1, round_half_away(q * (1 << COEFF_SHIFT) * 2.0 ** (-level / 2)))


def build_dc_tree(plan: SuperblockPlan, leaf_dcs: Sequence[int]) -> DcTree:
    """
    Combines leaf DCs bottom-up into a DC tree shaped like the plan.

    Args:
        plan (SuperblockPlan): Transform split of the superblock.
        leaf_dcs (Sequence[int]): DC of every leaf, z-scan order.

    Returns:
        DcTree: The unquantized tree.
    """
    values = iter(leaf_dcs)

    def build(node: SuperblockPlan) -> DcTree:
        if node.is_leaf:
            return DcTree(size=node.size, y=node.y, x=node.x, dc=next(values))
        children = [build(child) for child in node.children]
        dc, h, v, diag = haar4_forward(*(child.dc for child in children))
        return DcTree(size=node.size, y=node.y, x=node.x, dc=dc, h=h, v=v, diag=diag, children=children)

    tree = build(plan)
    if next(values, None) is not None:
        raise ValueError("More leaf DCs than plan leaves.")
    return tree


def invert_dc_tree(tree: DcTree) -> DcTree:
    """
    Recomputes all leaf DCs top-down from the root DC and the Haar coefficients.
    """
    if tree.is_leaf:
        return tree.copy()
    values = haar4_inverse(tree.dc, tree.h, tree.v, tree.diag)
    children = []
    for child, value in zip(tree.children, values):
        children.append(invert_dc_tree(child.copy(update={"dc": value})))
    return tree.copy(update={"children": children})


def _context(plane: int, kind: str, size: int) -> tuple:
    return "haar", plane, kind, size


def superblock_dc_encode(plan: SuperblockPlan, leaf_dcs: Sequence[int], neighbors: Neighbors, q: int,
                         enc: RangeEncoder, models: ModelSet, plane: int = 0,
                         weights: DcPredictorWeights = DEFAULT_WEIGHTS) -> DcTree:
    """
    Codes the DC tree of one superblock.

    Args:
        plan (SuperblockPlan): Transform split (already coded).
        leaf_dcs (Sequence[int]): Leaf DCs from the forward transforms, z-scan order.
        neighbors (Neighbors): Decoded (left, top-left, top, top-right) superblock DCs, None if absent.
        q (int): Frame quantizer.
        enc (RangeEncoder): Range encoder.
        models (ModelSet): Adaptive models.
        plane (int): Plane index, selects the model contexts.
        weights (DcPredictorWeights): Neighbour prediction weights.

    Returns:
        DcTree: The reconstructed (dequantized) tree, identical to what the decoder obtains.
    """
    source = build_dc_tree(plan, leaf_dcs)
    prediction = weights.predict(*neighbors)
    step = haar_step(q, source.size)
    index = round_div(source.dc - prediction, step)
    enc.encode_scalar(index, models, ("dc", plane))
    root_dc = prediction + index * step

    def code(node: DcTree, dc: int, parent_h: int, parent_v: int) -> DcTree:
        if node.is_leaf:
            return DcTree(size=node.size, y=node.y, x=node.x, dc=dc)
        step = haar_step(q, node.size)
        h_index = round_div(node.h - parent_h, step)
        v_index = round_div(node.v - parent_v, step)
        d_index = round_div(node.diag, step)
        enc.encode_scalar(h_index, models, _context(plane, "h", node.size))
        enc.encode_scalar(v_index, models, _context(plane, "v", node.size))
        enc.encode_scalar(d_index, models, _context(plane, "d", node.size))
        h = parent_h + h_index * step
        v = parent_v + v_index * step
        diag = d_index * step
        values = haar4_inverse(dc, h, v, diag)
        children = [code(child, value, h, v) for child, value in zip(node.children, values)]
        return DcTree(size=node.size, y=node.y, x=node.x, dc=dc, h=h, v=v, diag=diag, children=children)

    return code(source, root_dc, 0, 0)


def superblock_dc_decode(plan: SuperblockPlan, neighbors: Neighbors, q: int, dec: RangeDecoder,
                         models: ModelSet, plane: int = 0,
                         weights: DcPredictorWeights = DEFAULT_WEIGHTS) -> DcTree:
    """
    Decodes the DC tree of one superblock; mirror of superblock_dc_encode.

    Returns:
        DcTree: The reconstructed tree.
    """
    prediction = weights.predict(*neighbors)
    root_dc = prediction + dec.decode_scalar(models, ("dc", plane)) * haar_step(q, plan.size)

    def decode(node: SuperblockPlan, dc: int, parent_h: int, parent_v: int) -> DcTree:
        if node.is_leaf:
            return DcTree(size=node.size, y=node.y, x=node.x, dc=dc)
        step = haar_step(q, node.size)
        h = parent_h + dec.decode_scalar(models, _context(plane, "h", node.size)) * step
        v = parent_v + dec.decode_scalar(models, _context(plane, "v", node.size)) * step
        diag = dec.decode_scalar(models, _context(plane, "d", node.size)) * step
        values = haar4_inverse(dc, h, v, diag)
        children = [decode(child, value, h, v) for child, value in zip(node.children, values)]
        return DcTree(size=node.size, y=node.y, x=node.x, dc=dc, h=h, v=v, diag=diag, children=children)

    return decode(plan, root_dc, 0, 0)
