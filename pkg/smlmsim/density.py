"""Nominal density of emitter datasets via mean nearest-neighbor distance."""
import enum as _enum
import logging as _logging
import math as _math
import typing as _t
import warnings as _warnings
from concurrent.futures import ThreadPoolExecutor as _ThreadPoolExecutor

import numpy as _np
from reprit.base import generate_repr as _generate_repr
from scipy.spatial import cKDTree as _cKDTree

from .core.streams import (Stage as _Stage,
                           substream as _substream)
from .hints import Positions as _Positions
from .sampler import (Emitter as _Emitter,
                      FrameGeometry as _FrameGeometry,
                      positions_of as _positions_of,
                      sample_csr as _sample_csr)

MIN_MC_FRAMES = 1000
REFERENCE_DENSITY = 16.

logger = _logging.getLogger(__name__)

FrameEmitters = _t.Union[_Positions, _t.Sequence[_Emitter]]


class CurveMonotonicityError(ValueError):
    pass


class ExtrapolationWarning(UserWarning):
    pass


class NnMetric(str, _enum.Enum):
    LATERAL2D = 'lateral2d'
    FULL3D = 'full3d'


class NnCurve:
    """
    Monte Carlo reference of mean nearest-neighbor distance
    against CSR density for a fixed geometry.
    """

    __slots__ = 'geometry', 'entries', 'mc_frames_per_entry', 'seed'

    def __init__(self,
                 geometry: _FrameGeometry,
                 entries: _t.Sequence[_t.Tuple[float, float]],
                 mc_frames_per_entry: int,
                 seed: _t.Optional[int] = None) -> None:
        entries = [(float(density), float(distance))
                   for density, distance in entries]
        for (density, distance), (next_density, next_distance) in zip(
                entries, entries[1:]):
            if not density < next_density:
                raise ValueError('Curve densities should be strictly '
                                 'increasing, but found: {} then {}.'
                                 .format(density, next_density))
            if not distance > next_distance:
                raise CurveMonotonicityError(
                        'Mean nearest-neighbor distance should strictly '
                        'decrease with density, but found {} at {} '
                        'then {} at {}.'.format(distance, density,
                                                next_distance, next_density)
                )
        self.geometry, self.entries = geometry, entries
        self.mc_frames_per_entry, self.seed = mc_frames_per_entry, seed

    __repr__ = _generate_repr(__init__)

    def __len__(self) -> int:
        return len(self.entries)


def mean_nn_distance(dataset: _t.Iterable[FrameEmitters],
                     metric: NnMetric = NnMetric.LATERAL2D) -> float:
    """
    Returns mean distance from every emitter to its nearest neighbor
    within the same frame, pooled over all frames with two or more emitters.

    :raises ValueError: if no frame has at least two emitters.

    >>> import numpy as np
    >>> frame = np.array([[0., 0., 0.], [100., 0., 0.], [250., 0., 0.]])
    >>> round(mean_nn_distance([frame]), 6)
    116.666667
    """
    dimension = 2 if NnMetric(metric) is NnMetric.LATERAL2D else 3
    total, count = 0., 0
    for frame in dataset:
        positions = _to_positions(frame)
        if len(positions) < 2:
            continue
        distances, _ = _cKDTree(positions[:, :dimension]).query(
                positions[:, :dimension], k=2
        )
        total += float(distances[:, 1].sum())
        count += len(positions)
    if not count:
        raise ValueError('Nearest-neighbor distance is undefined: '
                         'no frame has at least two emitters.')
    return total / count


def build_csr_curve(geometry: _FrameGeometry,
                    densities: _t.Sequence[float],
                    mc_frames_per_entry: int,
                    seed: int,
                    *,
                    workers: int = 1) -> NnCurve:
    """
    Simulates CSR frames at every density
    and records their lateral mean nearest-neighbor distance.

    ``mc_frames_per_entry`` frames are drawn at densities
    of at least :data:`REFERENCE_DENSITY`,
    sparser entries get as many frames as needed
    to pool the same expected number of distances
    (see :func:`entry_frames_count`).
    Every entry draws its frames from its own substream,
    so the result does not depend on ``workers``.

    :raises CurveMonotonicityError:
        if distances do not strictly decrease,
        which signals too few Monte Carlo frames.
    """
    if mc_frames_per_entry < MIN_MC_FRAMES:
        raise ValueError('At least {} Monte Carlo frames per entry '
                         'are required, but found: {}.'
                         .format(MIN_MC_FRAMES, mc_frames_per_entry))
    if any(not density > 0. for density in densities):
        raise ValueError('Curve densities should be positive, '
                         'but found: {}.'.format(list(densities)))

    def simulate_entry(index: int) -> float:
        rng = _substream(seed, index, _Stage.CURVE)
        density = densities[index]
        return mean_nn_distance(
                _sample_csr(geometry, density, rng)
                for _ in range(entry_frames_count(mc_frames_per_entry,
                                                  density))
        )

    with _ThreadPoolExecutor(max_workers=workers) as executor:
        distances = list(executor.map(simulate_entry, range(len(densities))))
    for density, distance in zip(densities, distances):
        logger.info('CSR density %.4g: mean nearest-neighbor distance '
                    '%.2f nm', density, distance)
    return NnCurve(geometry, list(zip(densities, distances)),
                   mc_frames_per_entry, seed)


def entry_frames_count(mc_frames_per_entry: int, density: float) -> int:
    """
    Returns number of CSR frames which yield on average as many
    nearest-neighbor distances at ``density``
    as ``mc_frames_per_entry`` frames do at :data:`REFERENCE_DENSITY`.

    A frame contributes its emitters count when it has two or more,
    which is ``density * (1 - exp(-density))`` on average.

    >>> entry_frames_count(1000, 16.)
    1000
    >>> entry_frames_count(1000, 1.)
    25312
    """
    return max(mc_frames_per_entry,
               _math.ceil(mc_frames_per_entry
                          * (_distances_per_frame(REFERENCE_DENSITY)
                             / _distances_per_frame(density))))


def nominal_density(dataset: _t.Iterable[FrameEmitters],
                    curve: NnCurve) -> float:
    """
    Returns CSR density whose mean nearest-neighbor distance
    matches the dataset's one.

    Interpolates piecewise-linearly between curve entries
    and extrapolates the outermost segments
    with an :class:`ExtrapolationWarning`.
    """
    if len(curve) < 2:
        raise ValueError('Curve should have at least two entries, '
                         'but found: {}.'.format(len(curve)))
    distance = mean_nn_distance(dataset, NnMetric.LATERAL2D)
    densities, distances = _np.array(curve.entries)[::-1].T
    if distances[0] <= distance <= distances[-1]:
        return float(_np.interp(distance, distances, densities))
    _warnings.warn('Mean nearest-neighbor distance {:.2f} nm is outside '
                   'of the curve range [{:.2f}, {:.2f}] nm, extrapolating.'
                   .format(distance, distances[0], distances[-1]),
                   ExtrapolationWarning)
    start = 0 if distance < distances[0] else len(distances) - 2
    slope = ((densities[start + 1] - densities[start])
             / (distances[start + 1] - distances[start]))
    return max(float(densities[start]
                     + slope * (distance - distances[start])),
               0.)


def _distances_per_frame(density: float) -> float:
    return density * -_math.expm1(-density)


def _to_positions(frame: FrameEmitters) -> _Positions:
    return (frame
            if isinstance(frame, _np.ndarray)
            else _positions_of(frame))
