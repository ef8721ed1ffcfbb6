"""Ground truth to prediction matching and localization scores."""
import math as _math
import typing as _t

import numpy as _np
import typing_extensions as _te
from reprit.base import generate_repr as _generate_repr
from scipy.optimize import linear_sum_assignment as _linear_sum_assignment

from .density import (FrameEmitters as _FrameEmitters,
                      NnCurve as _NnCurve,
                      nominal_density as _nominal_density)
from .hints import Positions as _Positions
from .sampler import positions_of as _positions_of

MIN_SUBPIXEL_PREDICTIONS = 100


class MatchTolerance:
    __slots__ = 'lateral_nm', 'axial_nm'

    def __init__(self,
                 lateral_nm: float = 250.,
                 axial_nm: float = 500.) -> None:
        if not (lateral_nm > 0. and axial_nm > 0.):
            raise ValueError('Tolerances should be positive, '
                             'but found: {} and {}.'
                             .format(lateral_nm, axial_nm))
        self.lateral_nm, self.axial_nm = float(lateral_nm), float(axial_nm)

    __repr__ = _generate_repr(__init__)


class MatchPair(_t.NamedTuple):
    gt_index: int
    pred_index: int
    dx_nm: float
    dy_nm: float
    dz_nm: float


class MatchResult:
    """
    Pairs of matched ground truth and predicted emitters
    with offsets ``prediction - ground truth``,
    plus unmatched indices on both sides.

    Indices refer to the frame-ordered concatenation of the inputs.
    """

    __slots__ = 'pairs', 'false_positives', 'false_negatives'

    def __init__(self,
                 pairs: _t.Sequence[MatchPair],
                 false_positives: _t.Sequence[int],
                 false_negatives: _t.Sequence[int]) -> None:
        self.pairs = list(pairs)
        self.false_positives = list(false_positives)
        self.false_negatives = list(false_negatives)

    __repr__ = _generate_repr(__init__)

    @property
    def n_fn(self) -> int:
        return len(self.false_negatives)

    @property
    def n_fp(self) -> int:
        return len(self.false_positives)

    @property
    def n_tp(self) -> int:
        return len(self.pairs)

    def offsets(self) -> _Positions:
        return (_np.array([pair[2:] for pair in self.pairs])
                if self.pairs
                else _np.empty((0, 3)))


class MetricsReport:
    __slots__ = ('ji', 'rmse_lateral_nm', 'rmse_axial_nm',
                 'rmse_volumetric_nm', 'efficiency_lateral',
                 'efficiency_axial', 'efficiency_3d', 'n_tp', 'n_fp', 'n_fn',
                 'nominal_density', 'subpixel_bias')

    def __init__(self,
                 ji: float,
                 rmse_lateral_nm: _t.Optional[float],
                 rmse_axial_nm: _t.Optional[float],
                 rmse_volumetric_nm: _t.Optional[float],
                 efficiency_lateral: _t.Optional[float],
                 efficiency_axial: _t.Optional[float],
                 efficiency_3d: _t.Optional[float],
                 n_tp: int,
                 n_fp: int,
                 n_fn: int,
                 nominal_density: _t.Optional[float],
                 subpixel_bias: _t.Optional[float]) -> None:
        self.ji = ji
        self.rmse_lateral_nm, self.rmse_axial_nm = (rmse_lateral_nm,
                                                    rmse_axial_nm)
        self.rmse_volumetric_nm = rmse_volumetric_nm
        self.efficiency_lateral, self.efficiency_axial = (efficiency_lateral,
                                                          efficiency_axial)
        self.efficiency_3d = efficiency_3d
        self.n_tp, self.n_fp, self.n_fn = n_tp, n_fp, n_fn
        self.nominal_density, self.subpixel_bias = (nominal_density,
                                                    subpixel_bias)

    __repr__ = _generate_repr(__init__)

    @_t.overload
    def __eq__(self, other: _te.Self) -> bool:
        ...

    @_t.overload
    def __eq__(self, other: _t.Any) -> _t.Any:
        ...

    def __eq__(self, other: _t.Any) -> _t.Any:
        return (self.as_dict() == other.as_dict()
                if isinstance(other, MetricsReport)
                else NotImplemented)

    def as_dict(self) -> _t.Dict[str, _t.Any]:
        return {name: getattr(self, name) for name in self.__slots__}


def match(ground_truth: _t.Sequence[_FrameEmitters],
          predictions: _t.Sequence[_FrameEmitters],
          tolerance: MatchTolerance = MatchTolerance()) -> MatchResult:
    """
    Matches emitters frame by frame.

    Within a frame only pairs inside both tolerance gates are eligible;
    the assignment maximizes the number of pairs
    and, among those, minimizes their total 3D distance.
    Frames are aligned by position in the given sequences,
    a missing frame counts as empty.
    """
    pairs, false_positives, false_negatives = [], [], []
    gt_offset = pred_offset = 0
    for index in range(max(len(ground_truth), len(predictions))):
        gt_positions = _frame_positions(ground_truth, index)
        pred_positions = _frame_positions(predictions, index)
        rows, columns, offsets = _match_frame(gt_positions, pred_positions,
                                              tolerance)
        pairs.extend(MatchPair(gt_offset + row, pred_offset + column, *offset)
                     for row, column, offset in zip(rows.tolist(),
                                                    columns.tolist(),
                                                    offsets.tolist()))
        false_negatives.extend(
                gt_offset + row
                for row in sorted(set(range(len(gt_positions)))
                                  - set(rows.tolist()))
        )
        false_positives.extend(
                pred_offset + column
                for column in sorted(set(range(len(pred_positions)))
                                     - set(columns.tolist()))
        )
        gt_offset += len(gt_positions)
        pred_offset += len(pred_positions)
    return MatchResult(pairs, false_positives, false_negatives)


def jaccard(result: MatchResult) -> float:
    """
    Returns Jaccard index ``TP / (TP + FP + FN)``,
    ``1`` when there is nothing to find and nothing found.

    >>> jaccard(MatchResult([], [], []))
    1.0
    """
    total = result.n_tp + result.n_fp + result.n_fn
    return result.n_tp / total if total else 1.


def rmse(result: MatchResult) -> _t.Tuple[float, float, float]:
    """
    Returns lateral, axial and volumetric root-mean-square errors in nm
    over matched pairs.

    :raises ValueError: if there are no matched pairs.
    """
    squares = _squared_offsets(result)
    lateral = squares[:, 0] + squares[:, 1]
    return (_math.sqrt(lateral.mean()),
            _math.sqrt(squares[:, 2].mean()),
            _math.sqrt((lateral + squares[:, 2]).mean()))


def rmse_axes(result: MatchResult) -> _t.Tuple[float, float, float]:
    squares = _squared_offsets(result)
    x, y, z = _np.sqrt(squares.mean(axis=0)).tolist()
    return x, y, z


def efficiency(ji: float,
               rmse_lateral_nm: float,
               rmse_axial_nm: float,
               *,
               lateral_weight: float = 1.,
               axial_weight: float = .5) -> _t.Tuple[float, float, float]:
    """
    Combines detection and accuracy into lateral, axial and 3D
    efficiencies on a scale up to ``100``.

    >>> efficiency(1., 0., 0.)
    (100.0, 100.0, 100.0)
    """
    if not 0. <= ji <= 1.:
        raise ValueError('Jaccard index should be in [0, 1], but found: {}.'
                         .format(ji))
    if not (rmse_lateral_nm >= 0. and rmse_axial_nm >= 0.):
        raise ValueError('RMSE should be non-negative, '
                         'but found: {} and {}.'
                         .format(rmse_lateral_nm, rmse_axial_nm))
    detection_loss = 100. * (1. - ji)
    lateral = 100. - _math.hypot(detection_loss,
                                 lateral_weight * rmse_lateral_nm)
    axial = 100. - _math.hypot(detection_loss, axial_weight * rmse_axial_nm)
    return lateral, axial, (lateral + axial) / 2.


def subpixel_bias(predictions: _FrameEmitters,
                  pixel_size_nm: float,
                  bins: int = 20) -> float:
    """
    Scores grid bias of localizations
    as total variation distance between the joint histogram
    of their sub-pixel fractional coordinates and the uniform distribution.

    ``0`` means no bias, ``1 - 1 / bins ** 2`` means
    all localizations fall into a single sub-pixel cell.

    :raises ValueError: if there are too few predictions.
    """
    positions = (predictions
                 if isinstance(predictions, _np.ndarray)
                 else _positions_of(predictions))
    if len(positions) < MIN_SUBPIXEL_PREDICTIONS:
        raise ValueError('At least {} predictions are required, '
                         'but found: {}.'
                         .format(MIN_SUBPIXEL_PREDICTIONS, len(positions)))
    if bins < 1:
        raise ValueError('Bins count should be positive, but found: {}.'
                         .format(bins))
    fractions = _np.mod(positions[:, :2] / pixel_size_nm, 1.)
    cells = _np.minimum((fractions * bins).astype(_np.int64), bins - 1)
    histogram = _np.bincount(cells[:, 1] * bins + cells[:, 0],
                             minlength=bins * bins) / len(positions)
    return float(0.5 * _np.abs(histogram - 1. / (bins * bins)).sum())


def build_report(ground_truth: _t.Sequence[_FrameEmitters],
                 predictions: _t.Sequence[_FrameEmitters],
                 pixel_size_nm: float,
                 *,
                 tolerance: MatchTolerance = MatchTolerance(),
                 curve: _t.Optional[_NnCurve] = None,
                 bins: int = 20,
                 matched: _t.Optional[MatchResult] = None) -> MetricsReport:
    """
    Evaluates predictions against ground truth,
    reporting undefined statistics as ``None``.

    ``matched`` reuses an already computed matching of the same inputs.
    """
    result = (match(ground_truth, predictions, tolerance)
              if matched is None
              else matched)
    ji = jaccard(result)
    rmse_lateral = rmse_axial = rmse_volumetric = None
    efficiencies: _t.Tuple[_t.Optional[float], ...] = (None, None, None)
    if result.pairs:
        rmse_lateral, rmse_axial, rmse_volumetric = rmse(result)
        efficiencies = efficiency(ji, rmse_lateral, rmse_axial)
    flat_predictions = _np.concatenate(
            [_frame_positions(predictions, index)
             for index in range(len(predictions))] or [_np.empty((0, 3))]
    )
    bias = (subpixel_bias(flat_predictions, pixel_size_nm, bins)
            if len(flat_predictions) >= MIN_SUBPIXEL_PREDICTIONS
            else None)
    density = (None
               if curve is None
               else _optional_nominal_density(ground_truth, curve))
    return MetricsReport(ji, rmse_lateral, rmse_axial, rmse_volumetric,
                         *efficiencies, result.n_tp, result.n_fp, result.n_fn,
                         density, bias)


def _frame_positions(frames: _t.Sequence[_FrameEmitters],
                     index: int) -> _Positions:
    if index >= len(frames):
        return _np.empty((0, 3))
    frame = frames[index]
    return frame if isinstance(frame, _np.ndarray) else _positions_of(frame)


def _match_frame(ground_truth: _Positions,
                 predictions: _Positions,
                 tolerance: MatchTolerance
                 ) -> _t.Tuple[_t.Any, _t.Any, _Positions]:
    empty = _np.empty(0, dtype=_np.int64)
    if not (len(ground_truth) and len(predictions)):
        return empty, empty, _np.empty((0, 3))
    offsets = predictions[None, :, :] - ground_truth[:, None, :]
    allowed = ((_np.hypot(offsets[..., 0], offsets[..., 1])
                <= tolerance.lateral_nm)
               & (_np.abs(offsets[..., 2]) <= tolerance.axial_nm))
    if not allowed.any():
        return empty, empty, _np.empty((0, 3))
    distances = _np.linalg.norm(offsets, axis=-1)
    # exceeds the total cost of any assignment of eligible pairs,
    # so the number of eligible pairs is maximized first
    penalty = (float(distances[allowed].max())
               * min(len(ground_truth), len(predictions)) + 1.)
    rows, columns = _linear_sum_assignment(_np.where(allowed, distances,
                                                     penalty))
    kept = allowed[rows, columns]
    rows, columns = rows[kept], columns[kept]
    return rows, columns, offsets[rows, columns]


def _optional_nominal_density(ground_truth: _t.Sequence[_FrameEmitters],
                              curve: _NnCurve) -> _t.Optional[float]:
    try:
        return _nominal_density(ground_truth, curve)
    except ValueError:
        return None


def _squared_offsets(result: MatchResult) -> _Positions:
    if not result.pairs:
        raise ValueError('RMSE is undefined without matched pairs.')
    offsets = result.offsets()
    return offsets * offsets
