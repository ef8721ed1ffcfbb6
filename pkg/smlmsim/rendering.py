"""Super-resolution reconstructions of localization lists."""
import typing as _t
from pathlib import Path as _Path

import numpy as _np
from PIL import Image as _Image

from .core.hints import PixelArray as _PixelArray
from .density import FrameEmitters as _FrameEmitters
from .formats import read_emitters as _read_emitters
from .sampler import (FrameGeometry as _FrameGeometry,
                      positions_of as _positions_of)

DISPLAY_GAMMA = 0.5


def histogram_image(positions: _FrameEmitters,
                    geometry: _FrameGeometry,
                    upsample: int = 10) -> _PixelArray:
    """
    Returns counts of localizations per super-resolved pixel,
    rows running along ``y``.

    >>> import numpy as np
    >>> image = histogram_image(np.array([[150., 50., 0.]]),
    ...                         FrameGeometry(8, 8), upsample=2)
    >>> image.shape
    (16, 16)
    >>> [(int(row), int(column)) for row, column in zip(*image.nonzero())]
    [(1, 3)]
    """
    if upsample < 1:
        raise ValueError('Upsampling factor should be positive, '
                         'but found: {}.'.format(upsample))
    if not isinstance(positions, _np.ndarray):
        positions = _positions_of(positions)
    height, width = geometry.height_px * upsample, geometry.width_px * upsample
    counts, _, _ = _np.histogram2d(
            positions[:, 1], positions[:, 0],
            bins=[_np.linspace(0., geometry.height_nm, height + 1),
                  _np.linspace(0., geometry.width_nm, width + 1)]
    )
    return counts


def to_display(counts: _PixelArray,
               gamma: float = DISPLAY_GAMMA) -> _PixelArray:
    """
    Scales counts to 8-bit intensities with gamma correction,
    keeping every non-empty bin visible.
    """
    peak = counts.max(initial=0.)
    if not peak:
        return _np.zeros(counts.shape, dtype=_np.uint8)
    return _np.ceil(255. * (counts / peak) ** gamma).astype(_np.uint8)


def render_reconstruction(pred_csv: _Path,
                          geometry: _FrameGeometry,
                          upsample: int = 10,
                          out_png: _t.Optional[_Path] = None) -> _PixelArray:
    """
    Renders localizations from a CSV file
    as a gamma-scaled 8-bit grayscale image,
    saving it as PNG when ``out_png`` is given.

    :raises FormatError: if the file is malformed.
    """
    image = to_display(histogram_image(_read_emitters(pred_csv), geometry,
                                       upsample))
    if out_png is not None:
        _Image.fromarray(image).save(out_png, format='PNG')
    return image
