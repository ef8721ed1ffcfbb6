import typing as _t

import numpy as _np
import numpy.typing as _npt
import typing_extensions as _te

FloatArray: _te.TypeAlias = _npt.NDArray[_np.float64]
IntArray: _te.TypeAlias = _npt.NDArray[_np.int64]
PixelArray: _te.TypeAlias = _npt.NDArray[_t.Any]
PixelPosition = _t.Tuple[int, int]
Position = _t.Tuple[float, float, float]
