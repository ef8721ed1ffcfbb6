"""Astigmatic Gaussian point spread function and frame rendering."""
import enum as _enum
import typing as _t

import numpy as _np
import typing_extensions as _te
from reprit.base import generate_repr as _generate_repr

from .core.hints import PixelArray as _PixelArray
from .core.pixels import (axis_integrals as _axis_integrals,
                          pixel_edges as _pixel_edges,
                          support as _support)
from .sampler import (Emitter as _Emitter,
                      FrameGeometry as _FrameGeometry)

_Width = _t.TypeVar('_Width', float, _t.Any)


class AstigmaticPsf:
    """
    Defocus curve of an astigmatic imaging path.

    The lateral widths reach ``sigma0_nm`` at ``z = gamma_nm`` for ``x``
    and at ``z = -gamma_nm`` for ``y``,
    growing over the depth-of-focus scale ``d_nm``.
    """

    __slots__ = 'sigma0_nm', 'gamma_nm', 'd_nm'

    def __init__(self,
                 sigma0_nm: float = 130.,
                 gamma_nm: float = 250.,
                 d_nm: float = 400.) -> None:
        if not (sigma0_nm > 0. and d_nm > 0.):
            raise ValueError('Focal width and depth of focus should be '
                             'positive, but found: {} and {}.'
                             .format(sigma0_nm, d_nm))
        self.sigma0_nm, self.gamma_nm, self.d_nm = (
            float(sigma0_nm), float(gamma_nm), float(d_nm)
        )

    __repr__ = _generate_repr(__init__)

    @_t.overload
    def __eq__(self, other: _te.Self) -> bool:
        ...

    @_t.overload
    def __eq__(self, other: _t.Any) -> _t.Any:
        ...

    def __eq__(self, other: _t.Any) -> _t.Any:
        return ((self.sigma0_nm, self.gamma_nm, self.d_nm)
                == (other.sigma0_nm, other.gamma_nm, other.d_nm)
                if isinstance(other, AstigmaticPsf)
                else NotImplemented)


class FrameKind(str, _enum.Enum):
    EXPECTED = 'expected'
    COUNTS = 'counts'


class Frame:
    __slots__ = 'geometry', 'pixels', 'kind'

    def __init__(self,
                 geometry: _FrameGeometry,
                 pixels: _PixelArray,
                 kind: FrameKind) -> None:
        kind = FrameKind(kind)
        if pixels.shape != geometry.shape:
            raise ValueError('Pixels shape should be {}, but found: {}.'
                             .format(geometry.shape, pixels.shape))
        if pixels.size and pixels.min() < 0:
            raise ValueError('Pixel values should be non-negative.')
        if (kind is FrameKind.COUNTS
                and not _np.issubdtype(pixels.dtype, _np.integer)
                and not _np.array_equal(pixels, _np.round(pixels))):
            raise ValueError('Counts frame should have integral values.')
        self.geometry, self.pixels, self.kind = geometry, pixels, kind

    __repr__ = _generate_repr(__init__)

    @_t.overload
    def __eq__(self, other: _te.Self) -> bool:
        ...

    @_t.overload
    def __eq__(self, other: _t.Any) -> _t.Any:
        ...

    def __eq__(self, other: _t.Any) -> _t.Any:
        return (self.kind is other.kind
                and self.geometry == other.geometry
                and _np.array_equal(self.pixels, other.pixels)
                if isinstance(other, Frame)
                else NotImplemented)


def sigma_xy(z_nm: _Width, psf: AstigmaticPsf) -> _t.Tuple[_Width, _Width]:
    """
    Returns lateral Gaussian widths in nm at the given depth.

    >>> sigma_x, sigma_y = sigma_xy(250., AstigmaticPsf())
    >>> float(sigma_x)
    130.0
    >>> round(float(sigma_y), 1)
    208.1
    """
    return (psf.sigma0_nm
            * _np.sqrt(1. + ((z_nm - psf.gamma_nm) / psf.d_nm) ** 2),
            psf.sigma0_nm
            * _np.sqrt(1. + ((z_nm + psf.gamma_nm) / psf.d_nm) ** 2))


def render_emitter(emitter: _Emitter,
                   geometry: _FrameGeometry,
                   psf: AstigmaticPsf) -> Frame:
    """
    Renders expected photons of a single emitter
    by integrating its Gaussian over every pixel.
    """
    pixels = _np.zeros(geometry.shape)
    _accumulate(pixels, emitter, geometry, psf)
    return Frame(geometry, pixels, FrameKind.EXPECTED)


def render_frame(emitters: _t.Iterable[_Emitter],
                 geometry: _FrameGeometry,
                 psf: AstigmaticPsf,
                 background: float) -> Frame:
    """
    Renders expected photons of all emitters
    on top of a constant per-pixel background.

    Emitters are accumulated in the given order.

    >>> frame = render_frame([], FrameGeometry(), AstigmaticPsf(), 50.)
    >>> float(frame.pixels.min()), float(frame.pixels.max())
    (50.0, 50.0)
    """
    if not background >= 0.:
        raise ValueError('Background should be non-negative, but found: {}.'
                         .format(background))
    pixels = _np.zeros(geometry.shape)
    for emitter in emitters:
        _accumulate(pixels, emitter, geometry, psf)
    pixels += background
    return Frame(geometry, pixels, FrameKind.EXPECTED)


def _accumulate(pixels: _PixelArray,
                emitter: _Emitter,
                geometry: _FrameGeometry,
                psf: AstigmaticPsf) -> None:
    if not emitter.photons:
        return
    sigma_x, sigma_y = sigma_xy(emitter.z_nm, psf)
    pixel_size = geometry.pixel_size_nm
    column_start, column_stop = _support(emitter.x_nm, sigma_x, pixel_size,
                                         geometry.width_px)
    row_start, row_stop = _support(emitter.y_nm, sigma_y, pixel_size,
                                   geometry.height_px)
    if column_start == column_stop or row_start == row_stop:
        return
    columns = _axis_integrals(
            _pixel_edges(column_start, column_stop, pixel_size),
            emitter.x_nm, float(sigma_x)
    )
    rows = _axis_integrals(_pixel_edges(row_start, row_stop, pixel_size),
                           emitter.y_nm, float(sigma_y))
    pixels[row_start:row_stop, column_start:column_stop] += (
            emitter.photons * _np.outer(rows, columns)
    )
