import numpy as _np
import typing_extensions as _te

from .core import hints as _hints

Generator: _te.TypeAlias = _np.random.Generator
PixelPosition: _te.TypeAlias = _hints.PixelPosition
Position: _te.TypeAlias = _hints.Position
Positions: _te.TypeAlias = _hints.FloatArray
