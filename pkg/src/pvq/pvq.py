"""
Gain-shape (PVQ) coding of AC bands.

A band x is coded as a companded gain and a unit shape. With a prediction r, a Householder
reflection moves r onto a coordinate axis e_m; the deviation of x from r becomes an angle
theta plus a shape over the remaining N - 1 axes. The gain resolution follows the gain
(activity masking), the angle resolution follows the quantized gain, and the number of
pulses K depends only on the angle index and N.
"""

import logging
import math
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from .codebook import codebook_size, rank, unrank
from .pvqModels import ActivityParams, BandLayout, GainMode, HouseholderReflector, PvqBandCode
from ..entropy.entropy import RangeDecoder, RangeEncoder
from ..entropy.entropyModels import ModelSet
from ..exceptions import CorruptStreamError
from ..util import round_half_away, round_half_away_array

logger = logging.getLogger(__name__)

ACTIVITY = ActivityParams()
# Largest gain index a stream may carry.
MAX_GAIN_INDEX = 1 << 12
# The sparser-support sweep of the search only runs up to this many pulses.
SWEEP_MAX_PULSES = 32
# Relative improvement needed to accept a move during the search.
SEARCH_EPSILON = 1e-12
# Rate-distortion multiplier applied to q^2 when the caller gives no lambda.
DEFAULT_LAMBDA_SCALE = 0.12


@lru_cache(maxsize=None)
def band_layout(size: int) -> BandLayout:
    """
    Splits the AC coefficients of an N x N block into bands.

    Band 0 is the 4x4 corner without DC. Every octave s = 4, 8, ... adds its top-right,
    bottom-left and bottom-right s x s regions; a region longer than 64 coefficients is
    halved (in raster order) until it fits.

    Args:
        size (int): Block size (4..64).

    Returns:
        BandLayout: Raster indices of every band.
    """
    if size not in (4, 8, 16, 32, 64):
        raise ValueError(f"Unsupported block size <{size}>.")

    def region(row0: int, col0: int, extent: int) -> List[int]:
        return [(row0 + i) * size + col0 + j for i in range(extent) for j in range(extent)]

    def halve(indices: List[int]) -> List[List[int]]:
        if len(indices) <= 64:
            return [indices]
        middle = len(indices) // 2
        return halve(indices[:middle]) + halve(indices[middle:])

    bands = [region(0, 0, 4)[1:]]
    extent = 4
    while 2 * extent <= size:
        for row0, col0 in ((0, extent), (extent, 0), (extent, extent)):
            bands.extend(halve(region(row0, col0, extent)))
        extent *= 2
    return BandLayout(size=size, bands=bands)


@lru_cache(maxsize=None)
def band_arrays(size: int) -> Tuple[np.ndarray, ...]:
    return tuple(band_layout(size).arrays())


def householder(r: np.ndarray) -> HouseholderReflector:
    """
    Builds the reflector of a non-zero prediction: v = r / |r| + s * e_m, m the index of the
    largest |r_i| (first on ties) and s its sign.

    Args:
        r (np.ndarray): The prediction.

    Returns:
        HouseholderReflector: The reflector.
    """
    r = np.asarray(r, dtype=np.float64)
    norm = float(np.linalg.norm(r))
    if norm == 0.0:
        raise ValueError("Zero prediction has no reflector; code the band without prediction.")
    m = int(np.argmax(np.abs(r)))
    s = 1 if r[m] >= 0 else -1
    v = r / norm
    v[m] += s
    return HouseholderReflector(v=v, m=m, s=s)


def reflect(x: np.ndarray, reflector: HouseholderReflector) -> np.ndarray:
    """
    Applies the reflection z = x - 2 (x.v / v.v) v.

    Args:
        x (np.ndarray): Input vector.
        reflector (HouseholderReflector): The reflector.

    Returns:
        np.ndarray: The reflected vector.
    """
    v = reflector.v
    vv = float(v @ v)
    if vv == 0.0:
        raise ValueError("Degenerate reflector.")
    x = np.asarray(x, dtype=np.float64)
    return x - (2.0 * float(x @ v) / vv) * v


def decompose(z: np.ndarray, m: int, s: int) -> Tuple[float, float, np.ndarray]:
    """
    Splits a reflected vector into gain, angle from the prediction and unit residual shape.

    Args:
        z (np.ndarray): Reflected vector.
        m (int): Reflection axis.
        s (int): Sign of the prediction on that axis.

    Returns:
        Tuple[float, float, np.ndarray]: (g, theta in [0, pi], u) with u_m = 0 and |u| = 1,
        or u = 0 when the residual vanishes. Zero gain gives theta = 0.
    """
    z = np.asarray(z, dtype=np.float64)
    g = float(np.linalg.norm(z))
    u = z.copy()
    u[m] = 0.0
    if g == 0.0:
        return 0.0, 0.0, u
    theta = math.acos(max(-1.0, min(1.0, -s * z[m] / g)))
    norm = float(np.linalg.norm(u))
    if norm > 0.0:
        u /= norm
    return g, theta, u


def compand_gain(g: float, q: float, params: ActivityParams = ACTIVITY) -> int:
    """
    Quantized companded gain: round(c * (g / q)^(1 - alpha)), c = beta * anchor^alpha.
    """
    if g <= 0.0:
        return 0
    return round_half_away(params.gain_scale * (g / q) ** (1.0 - params.alpha))


def decompand(gain_index: int, q: float, params: ActivityParams = ACTIVITY) -> float:
    """
    Gain of a gain index: q * (index / c)^beta.
    """
    return q * (float(gain_index) / params.gain_scale) ** params.beta


def theta_step(gain_index: int, params: ActivityParams = ACTIVITY) -> float:
    return params.beta / gain_index


def max_theta_index(gain_index: int, params: ActivityParams = ACTIVITY) -> int:
    return math.ceil((math.pi / 2) / theta_step(gain_index, params))


def compute_k(theta_index: int, n: int) -> int:
    """
    Pulses of a predicted band: round(tau * sqrt((N + 2) / 2)). Depends on nothing decoded
    from the gain, so a damaged gain cannot change how many rank digits follow.
    """
    return round_half_away(theta_index * math.sqrt((n + 2) / 2.0))


def compute_k_noref(gain_index: int, n: int, params: ActivityParams = ACTIVITY) -> int:
    """
    Pulses of a band without prediction: round((gamma / beta) * sqrt((N + 2) / 2)).
    """
    return round_half_away(gain_index / params.beta * math.sqrt((n + 2) / 2.0))


def _search_core(a: np.ndarray, mask: np.ndarray, k: int) -> np.ndarray:
    n = a.size
    b = np.where(mask, a, 0.0)
    l1 = float(b.sum())
    y = np.zeros(n, dtype=np.int64)
    if l1 <= 0.0:
        y[0] = k
        return y
    y = np.floor(k * b / l1 + 0.5).astype(np.int64)
    total = int(y.sum())
    rxy = float(b @ y)
    ryy = float(y @ y)
    while total < k:
        scores = (rxy + b) ** 2 / (ryy + 2 * y + 1)
        scores[~mask] = -np.inf
        j = int(np.argmax(scores))
        rxy += b[j]
        ryy += 2 * y[j] + 1
        y[j] += 1
        total += 1
    while total > k:
        den = ryy - 2 * y + 1
        valid = (y > 0) & (den > 0)
        scores = np.full(n, -np.inf)
        scores[valid] = (rxy - b[valid]) ** 2 / den[valid]
        j = int(np.argmax(scores))
        rxy -= b[j]
        ryy -= 2 * y[j] - 1
        y[j] -= 1
        total -= 1
    positions = np.arange(n)
    while True:
        current = rxy * rxy / ryy
        sources = np.nonzero(y > 0)[0]
        new_rxy = rxy - b[sources][:, None] + b[None, :]
        new_ryy = ryy - 2 * y[sources][:, None] + 2 * y[None, :] + 2
        valid = (new_rxy > 0) & mask[None, :] & (sources[:, None] != positions[None, :])
        scores = np.where(valid, new_rxy * new_rxy / new_ryy, -np.inf)
        flat = int(np.argmax(scores))
        i, j = sources[flat // n], flat % n
        if not scores.flat[flat] > current * (1.0 + SEARCH_EPSILON):
            break
        rxy += b[j] - b[i]
        ryy += -2 * y[i] + 2 * y[j] + 2
        y[i] -= 1
        y[j] += 1
    return y


def _correlation(a: np.ndarray, y: np.ndarray) -> float:
    ryy = float(y @ y)
    return float(a @ y) ** 2 / ryy if ryy else 0.0


def pvq_search(t: np.ndarray, k: int) -> np.ndarray:
    """
    Finds the pulse vector y with |y|_1 = K maximizing t.y / |y|.

    Pulses are first placed by rounding K |t| / |t|_1, then added or removed one at a time
    by best correlation, then single pulses are moved while that helps. For sparse codebooks
    the search is repeated on the m largest components for every smaller support m, stopping
    once the energy of those components cannot beat the best correlation found.

    Args:
        t (np.ndarray): Target vector.
        k (int): Number of pulses.

    Returns:
        np.ndarray: int64 pulse vector whose signs follow t.
    """
    t = np.asarray(t, dtype=np.float64)
    if k < 0:
        raise ValueError(f"Negative pulse count <{k}>.")
    y = np.zeros(t.size, dtype=np.int64)
    if k == 0:
        return y
    a = np.abs(t)
    if not a.any():
        y[0] = k
        return y
    best = _search_core(a, np.ones(t.size, dtype=bool), k)
    best_value = _correlation(a, best)
    if k <= SWEEP_MAX_PULSES:
        order = np.argsort(-a, kind="stable")
        energy = np.cumsum(a[order] ** 2)
        for support in range(int(np.count_nonzero(best)) - 1, 0, -1):
            if energy[support - 1] <= best_value:
                break
            mask = np.zeros(t.size, dtype=bool)
            mask[order[:support]] = True
            candidate = _search_core(a, mask, k)
            value = _correlation(a, candidate)
            if value > best_value * (1.0 + SEARCH_EPSILON):
                best, best_value = candidate, value
    return np.where(t < 0, -best, best)


def _code_noref(x: np.ndarray, q: float, params: ActivityParams) -> PvqBandCode:
    n = x.size
    gain_index = min(compand_gain(float(np.linalg.norm(x)), q, params), MAX_GAIN_INDEX)
    if gain_index == 0:
        return PvqBandCode(n=n, gain_index=0)
    k = compute_k_noref(gain_index, n, params)
    y = pvq_search(x, k)
    return PvqBandCode(n=n, gain_index=gain_index, k=k, rank=rank(y), pulses=y.tolist())


def _code_predicted(x: np.ndarray, r: np.ndarray, q: float, cfl_sign: Optional[int],
                    params: ActivityParams) -> Optional[PvqBandCode]:
    n = x.size
    gain_index = min(compand_gain(float(np.linalg.norm(x)), q, params), MAX_GAIN_INDEX)
    if gain_index == 0:
        return PvqBandCode(n=n, gain_index=0, theta_index=0, noref=False, cfl_sign=None if cfl_sign is None else 1)
    reflector = householder(r)
    _, theta, u = decompose(reflect(x, reflector), reflector.m, reflector.s)
    if theta > math.pi / 2:
        return None
    theta_index = round_half_away(theta / theta_step(gain_index, params))
    k = compute_k(theta_index, n)
    pulses = None
    index = 0
    if k:
        y = pvq_search(np.delete(u, reflector.m), k)
        index = rank(y)
        pulses = y.tolist()
    return PvqBandCode(n=n, gain_index=gain_index, theta_index=theta_index, k=k, rank=index, noref=False,
                       cfl_sign=cfl_sign, pulses=pulses)


def quantize_band(x: np.ndarray, r: Optional[np.ndarray], q: float, noref: bool = False,
                  gain_mode: GainMode = GainMode.RELATIVE,
                  params: ActivityParams = ACTIVITY) -> Optional[PvqBandCode]:
    """
    Quantizes one band without coding it.

    Args:
        x (np.ndarray): Band coefficients.
        r (np.ndarray, optional): Prediction; None or zero forces noref.
        q (float): Band quantizer (coefficient units).
        noref (bool): Ignore the prediction.
        gain_mode (GainMode): DIRECT picks a CfL sign so that the signed prediction correlates with x.
        params (ActivityParams): Masking strength.

    Returns:
        PvqBandCode: The code, or None when the prediction points away from x (angle above pi/2).
    """
    x = np.asarray(x, dtype=np.float64)
    if noref or r is None or not np.any(r):
        return _code_noref(x, q, params)
    r = np.asarray(r, dtype=np.float64)
    sign = None
    if gain_mode == GainMode.DIRECT:
        sign = 1 if float(x @ r) >= 0 else -1
        r = sign * r
    return _code_predicted(x, r, q, sign, params)


def _pulses(code: PvqBandCode) -> np.ndarray:
    if code.pulses is not None:
        return np.asarray(code.pulses, dtype=np.int64)
    return unrank(code.shape_dimension, code.k, code.rank)


def reconstruct_band(code: PvqBandCode, r: Optional[np.ndarray], q: float,
                     params: ActivityParams = ACTIVITY) -> np.ndarray:
    """
    Rebuilds the band coefficients of a code. Shared by encoder and decoder.

    Args:
        code (PvqBandCode): The band code.
        r (np.ndarray, optional): The unsigned prediction (ignored for noref).
        q (float): Band quantizer.
        params (ActivityParams): Masking strength.

    Returns:
        np.ndarray: int64 coefficients.
    """
    if code.gain_index == 0:
        return np.zeros(code.n, dtype=np.int64)
    gain = decompand(code.gain_index, q, params)
    y = _pulses(code).astype(np.float64)
    if code.noref:
        return round_half_away_array(gain * y / np.linalg.norm(y))
    prediction = np.asarray(r, dtype=np.float64) * (code.cfl_sign or 1)
    reflector = householder(prediction)
    z = np.zeros(code.n)
    if code.k:
        theta = min(code.theta_index * theta_step(code.gain_index, params), math.pi / 2)
        z = np.insert(y / np.linalg.norm(y), reflector.m, 0.0) * (gain * math.sin(theta))
        z[reflector.m] = -reflector.s * gain * math.cos(theta)
    else:
        z[reflector.m] = -reflector.s * gain
    return round_half_away_array(reflect(z, reflector))


def _prediction_gain_index(r: np.ndarray, q: float, params: ActivityParams) -> int:
    return min(compand_gain(float(np.linalg.norm(r)), q, params), MAX_GAIN_INDEX)


def write_band(code: PvqBandCode, r: Optional[np.ndarray], q: float, models: ModelSet, enc: RangeEncoder,
               context: tuple, gain_mode: GainMode = GainMode.RELATIVE,
               params: ActivityParams = ACTIVITY) -> None:
    """
    Entropy codes a band code. The noref flag is only sent when a prediction exists.
    """
    has_prediction = r is not None and bool(np.any(r))
    if has_prediction:
        enc.encode_bool(code.noref, models.get(context + ("noref",), 2))
    if code.noref:
        enc.encode_scalar(code.gain_index, models, context + ("gain",), signed=False)
        if code.gain_index:
            enc.encode_uniform(code.rank, codebook_size(code.n, code.k))
        return
    if gain_mode == GainMode.DIRECT:
        enc.encode_scalar(code.gain_index, models, context + ("cfl_gain",), signed=False)
        if code.gain_index:
            enc.encode_symbol(models.get(context + ("cfl_sign",), 2), int(code.cfl_sign < 0))
    else:
        predicted = _prediction_gain_index(r, q, params)
        enc.encode_scalar(code.gain_index - predicted, models, context + ("gain_res",))
    if code.gain_index:
        enc.encode_scalar(code.theta_index, models, context + ("theta",), signed=False)
        if code.k:
            enc.encode_uniform(code.rank, codebook_size(code.n - 1, code.k))


def read_band(n: int, r: Optional[np.ndarray], q: float, models: ModelSet, dec: RangeDecoder, context: tuple,
              gain_mode: GainMode = GainMode.RELATIVE, params: ActivityParams = ACTIVITY) -> PvqBandCode:
    """
    Decodes a band code written by write_band.
    """
    has_prediction = r is not None and bool(np.any(r))
    noref = dec.decode_bool(models.get(context + ("noref",), 2)) if has_prediction else True
    if noref:
        gain_index = dec.decode_scalar(models, context + ("gain",), signed=False)
        if gain_index > MAX_GAIN_INDEX:
            raise CorruptStreamError(f"Gain index <{gain_index}> is out of range.")
        if gain_index == 0:
            return PvqBandCode(n=n, gain_index=0)
        k = compute_k_noref(gain_index, n, params)
        index = dec.decode_uniform(codebook_size(n, k))
        return PvqBandCode(n=n, gain_index=gain_index, k=k, rank=index)
    sign = None
    if gain_mode == GainMode.DIRECT:
        gain_index = dec.decode_scalar(models, context + ("cfl_gain",), signed=False)
        sign = 1
        if gain_index:
            sign = -1 if dec.decode_symbol(models.get(context + ("cfl_sign",), 2)) else 1
    else:
        gain_index = _prediction_gain_index(r, q, params) + dec.decode_scalar(models, context + ("gain_res",))
    if not 0 <= gain_index <= MAX_GAIN_INDEX:
        raise CorruptStreamError(f"Gain index <{gain_index}> is out of range.")
    if gain_index == 0:
        return PvqBandCode(n=n, gain_index=0, theta_index=0, noref=False, cfl_sign=sign)
    theta_index = dec.decode_scalar(models, context + ("theta",), signed=False)
    if theta_index > max_theta_index(gain_index, params):
        raise CorruptStreamError(f"Angle index <{theta_index}> exceeds pi/2 at gain index <{gain_index}>.")
    k = compute_k(theta_index, n)
    index = dec.decode_uniform(codebook_size(n - 1, k)) if k else 0
    return PvqBandCode(n=n, gain_index=gain_index, theta_index=theta_index, k=k, rank=index, noref=False,
                       cfl_sign=sign)


def band_cost(code: PvqBandCode, r: Optional[np.ndarray], q: float, models: ModelSet, enc: RangeEncoder,
              context: tuple, gain_mode: GainMode, params: ActivityParams = ACTIVITY) -> float:
    """
    Bits a band code would take, measured by a trial encode on forked state.
    """
    trial = enc.clone(with_output=False)
    start = trial.tell()
    write_band(code, r, q, models.fork(), trial, context, gain_mode, params)
    return trial.tell() - start


def pvq_encode_band(x: np.ndarray, r: Optional[np.ndarray], q: float, models: ModelSet, enc: RangeEncoder,
                    context: tuple, gain_mode: GainMode = GainMode.RELATIVE, lam: Optional[float] = None,
                    params: ActivityParams = ACTIVITY) -> Tuple[PvqBandCode, np.ndarray]:
    """
    Quantizes and codes one band.

    The noref code, the predicted code when a usable prediction exists and an all-zero band
    are trial coded; the one with the lowest D + lambda * R is kept.

    Args:
        x (np.ndarray): Band coefficients.
        r (np.ndarray, optional): Prediction (unsigned luma coefficients for CfL).
        q (float): Band quantizer in coefficient units.
        models (ModelSet): Adaptive models.
        enc (RangeEncoder): Range encoder.
        context (tuple): Model context prefix of the band.
        gain_mode (GainMode): How a predicted gain is coded.
        lam (float, optional): Lagrange multiplier in coefficient units; default 0.12 q^2.
        params (ActivityParams): Masking strength.

    Returns:
        Tuple[PvqBandCode, np.ndarray]: The chosen code and the reconstructed band.
    """
    x = np.asarray(x, dtype=np.float64)
    lam = DEFAULT_LAMBDA_SCALE * q * q if lam is None else lam
    candidates = [quantize_band(x, r, q, noref=True, params=params)]
    if r is not None and np.any(r):
        predicted = quantize_band(x, r, q, gain_mode=gain_mode, params=params)
        if predicted is not None:
            candidates.insert(0, predicted)
    if candidates[-1].gain_index:
        candidates.append(PvqBandCode(n=x.size, gain_index=0))
    best = None
    for code in candidates:
        recon = reconstruct_band(code, r, q, params)
        if len(candidates) == 1:
            best = (0.0, code, recon)
            break
        cost = float(np.sum((x - recon) ** 2)) + lam * band_cost(code, r, q, models, enc, context, gain_mode,
                                                                  params)
        if best is None or cost < best[0]:
            best = (cost, code, recon)
    _, code, recon = best
    write_band(code, r, q, models, enc, context, gain_mode, params)
    return code, recon


def pvq_decode_band(n: int, r: Optional[np.ndarray], q: float, models: ModelSet, dec: RangeDecoder,
                    context: tuple, gain_mode: GainMode = GainMode.RELATIVE,
                    params: ActivityParams = ACTIVITY) -> Tuple[PvqBandCode, np.ndarray]:
    """
    Decodes one band; mirror of pvq_encode_band.

    Returns:
        Tuple[PvqBandCode, np.ndarray]: The code and the reconstructed band.
    """
    code = read_band(n, r, q, models, dec, context, gain_mode, params)
    return code, reconstruct_band(code, r, q, params)
