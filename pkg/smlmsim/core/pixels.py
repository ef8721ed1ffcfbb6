import math as _math
import typing as _t

import numpy as _np
from scipy.special import ndtr as _ndtr

from .hints import FloatArray

SUPPORT_IN_SIGMAS = 6.
_INVERSE_SQRT_TAU = 1. / _math.sqrt(2. * _math.pi)


def pixel_edges(start: int, stop: int, pixel_size: float) -> FloatArray:
    return _np.arange(start, stop + 1, dtype=_np.float64) * pixel_size


def support(center: float,
            sigma: float,
            pixel_size: float,
            size: int) -> _t.Tuple[int, int]:
    reach = SUPPORT_IN_SIGMAS * sigma
    start = max(int(_math.floor((center - reach) / pixel_size)), 0)
    stop = min(int(_math.ceil((center + reach) / pixel_size)), size)
    return start, max(start, stop)


def axis_integrals(edges: FloatArray,
                   center: float,
                   sigma: float) -> FloatArray:
    lower = (edges[:-1] - center) / sigma
    upper = (edges[1:] - center) / sigma
    # right-hand tails are integrated from the mirrored side
    # so that reflected pixels get bit-identical values
    return _np.where(lower > 0.,
                     _ndtr(-lower) - _ndtr(-upper),
                     _ndtr(upper) - _ndtr(lower))


def axis_derivatives(edges: FloatArray,
                     center: float,
                     sigma: float
                     ) -> _t.Tuple[FloatArray, FloatArray, FloatArray]:
    lower = (edges[:-1] - center) / sigma
    upper = (edges[1:] - center) / sigma
    lower_density = _INVERSE_SQRT_TAU * _np.exp(-0.5 * lower * lower)
    upper_density = _INVERSE_SQRT_TAU * _np.exp(-0.5 * upper * upper)
    return (axis_integrals(edges, center, sigma),
            (lower_density - upper_density) / sigma,
            (lower * lower_density - upper * upper_density) / sigma)
