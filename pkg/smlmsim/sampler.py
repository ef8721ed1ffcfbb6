"""Emitter sampling under complete spatial randomness or helix structures."""
import enum as _enum
import math as _math
import typing as _t

import numpy as _np
import typing_extensions as _te
from reprit.base import generate_repr as _generate_repr

from .core.hints import FloatArray as _FloatArray
from .hints import (Generator as _Generator,
                    Position as _Position,
                    Positions as _Positions)

MAX_REDRAW_ROUNDS = 64


class DegenerateGeometryError(ValueError):
    pass


class FrameGeometry:
    """
    Lateral pixel grid and axial range of the simulated volume.

    >>> geometry = FrameGeometry()
    >>> geometry.width_nm, geometry.height_nm
    (6400.0, 6400.0)
    >>> geometry.contains(0., 6400., 750.)
    True
    """

    __slots__ = ('width_px', 'height_px', 'pixel_size_nm', 'z_min_nm',
                 'z_max_nm')

    def __init__(self,
                 width_px: int = 64,
                 height_px: int = 64,
                 pixel_size_nm: float = 100.,
                 z_min_nm: float = -750.,
                 z_max_nm: float = 750.) -> None:
        if width_px < 8 or height_px < 8:
            raise ValueError('Frame should be at least 8x8 pixels, '
                             'but found: {}x{}.'.format(width_px, height_px))
        if not pixel_size_nm > 0.:
            raise ValueError('Pixel size should be positive, but found: {}.'
                             .format(pixel_size_nm))
        if not z_min_nm < z_max_nm:
            raise ValueError('Axial range should be non-empty, '
                             'but found: [{}, {}].'
                             .format(z_min_nm, z_max_nm))
        self.width_px, self.height_px = int(width_px), int(height_px)
        self.pixel_size_nm = float(pixel_size_nm)
        self.z_min_nm, self.z_max_nm = float(z_min_nm), float(z_max_nm)

    __repr__ = _generate_repr(__init__)

    @_t.overload
    def __eq__(self, other: _te.Self) -> bool:
        ...

    @_t.overload
    def __eq__(self, other: _t.Any) -> _t.Any:
        ...

    def __eq__(self, other: _t.Any) -> _t.Any:
        return ((self.width_px, self.height_px, self.pixel_size_nm,
                 self.z_min_nm, self.z_max_nm)
                == (other.width_px, other.height_px, other.pixel_size_nm,
                    other.z_min_nm, other.z_max_nm)
                if isinstance(other, FrameGeometry)
                else NotImplemented)

    @property
    def height_nm(self) -> float:
        return self.height_px * self.pixel_size_nm

    @property
    def shape(self) -> _t.Tuple[int, int]:
        return self.height_px, self.width_px

    @property
    def width_nm(self) -> float:
        return self.width_px * self.pixel_size_nm

    def contains(self, x_nm: float, y_nm: float, z_nm: float) -> bool:
        return (0. <= x_nm <= self.width_nm
                and 0. <= y_nm <= self.height_nm
                and self.z_min_nm <= z_nm <= self.z_max_nm)

    def contains_all(self, positions: _Positions) -> bool:
        return bool(_np.all(self._lateral_mask(positions)
                            & (positions[:, 2] >= self.z_min_nm)
                            & (positions[:, 2] <= self.z_max_nm)))

    def _lateral_mask(self, positions: _Positions) -> _t.Any:
        return ((positions[:, 0] >= 0.)
                & (positions[:, 0] <= self.width_nm)
                & (positions[:, 1] >= 0.)
                & (positions[:, 1] <= self.height_nm))


class Emitter:
    """One fluorophore activation: frame, position in nm and photon count."""

    __slots__ = 'frame_id', 'x_nm', 'y_nm', 'z_nm', 'photons'

    def __init__(self,
                 frame_id: _t.Optional[int],
                 x_nm: float,
                 y_nm: float,
                 z_nm: float,
                 photons: float) -> None:
        if frame_id is not None and frame_id < 0:
            raise ValueError('Frame id should be non-negative, '
                             'but found: {}.'.format(frame_id))
        if not photons >= 0.:
            raise ValueError('Photon count should be non-negative, '
                             'but found: {}.'.format(photons))
        self.frame_id = frame_id
        self.x_nm, self.y_nm, self.z_nm = float(x_nm), float(y_nm), float(z_nm)
        self.photons = float(photons)

    __repr__ = _generate_repr(__init__)

    @_t.overload
    def __eq__(self, other: _te.Self) -> bool:
        ...

    @_t.overload
    def __eq__(self, other: _t.Any) -> _t.Any:
        ...

    def __eq__(self, other: _t.Any) -> _t.Any:
        return ((self.frame_id, self.x_nm, self.y_nm, self.z_nm, self.photons)
                == (other.frame_id, other.x_nm, other.y_nm, other.z_nm,
                    other.photons)
                if isinstance(other, Emitter)
                else NotImplemented)

    @property
    def position(self) -> _Position:
        return self.x_nm, self.y_nm, self.z_nm

    def with_frame_id(self, frame_id: int) -> 'Emitter':
        return Emitter(frame_id, self.x_nm, self.y_nm, self.z_nm,
                       self.photons)


class HelixParams:
    __slots__ = ('n_structures', 'seeds_per_structure',
                 'strands_per_structure', 'helix_radius_nm', 'pitch_nm',
                 'jitter_sigma_nm')

    def __init__(self,
                 n_structures: int = 3,
                 seeds_per_structure: int = 5000,
                 strands_per_structure: int = 3,
                 helix_radius_nm: float = 25.,
                 pitch_nm: float = 300.,
                 jitter_sigma_nm: float = 5.) -> None:
        for name, count in [('n_structures', n_structures),
                            ('seeds_per_structure', seeds_per_structure),
                            ('strands_per_structure', strands_per_structure)]:
            if count < 1:
                raise ValueError('{} should be positive, but found: {}.'
                                 .format(name, count))
        if not (helix_radius_nm > 0. and pitch_nm > 0.):
            raise ValueError('Helix radius and pitch should be positive, '
                             'but found: {} and {}.'
                             .format(helix_radius_nm, pitch_nm))
        if not jitter_sigma_nm >= 0.:
            raise ValueError('Jitter should be non-negative, but found: {}.'
                             .format(jitter_sigma_nm))
        self.n_structures = int(n_structures)
        self.seeds_per_structure = int(seeds_per_structure)
        self.strands_per_structure = int(strands_per_structure)
        self.helix_radius_nm, self.pitch_nm = (float(helix_radius_nm),
                                               float(pitch_nm))
        self.jitter_sigma_nm = float(jitter_sigma_nm)

    __repr__ = _generate_repr(__init__)

    @_t.overload
    def __eq__(self, other: _te.Self) -> bool:
        ...

    @_t.overload
    def __eq__(self, other: _t.Any) -> _t.Any:
        ...

    def __eq__(self, other: _t.Any) -> _t.Any:
        return (all(getattr(self, name) == getattr(other, name)
                    for name in self.__slots__)
                if isinstance(other, HelixParams)
                else NotImplemented)

    @property
    def total_seeds(self) -> int:
        return self.n_structures * self.seeds_per_structure


class PointCloud:
    """
    Seeds of one simulated scene.

    Besides the points themselves keeps the axis segment
    of every structure and the structure index of every point.
    """

    __slots__ = 'points', 'structure_id', 'params', 'axes', 'labels'

    def __init__(self,
                 points: _Positions,
                 structure_id: int,
                 params: HelixParams,
                 axes: _t.Sequence[_t.Tuple[_FloatArray, _FloatArray]],
                 labels: _t.Any) -> None:
        if len(points) != params.total_seeds:
            raise ValueError('Cloud should contain {} points, but found: {}.'
                             .format(params.total_seeds, len(points)))
        self.points, self.structure_id, self.params = (points, structure_id,
                                                       params)
        self.axes, self.labels = list(axes), labels

    __repr__ = _generate_repr(__init__)

    def __len__(self) -> int:
        return len(self.points)


class PhotonMode(str, _enum.Enum):
    FIXED = 'fixed'
    GAMMA = 'gamma'


class PhotonModel:
    __slots__ = 'mode', 'mean_photons', 'gamma_shape'

    def __init__(self,
                 mode: PhotonMode = PhotonMode.GAMMA,
                 mean_photons: float = 5000.,
                 gamma_shape: float = 3.) -> None:
        if not (mean_photons > 0. and gamma_shape > 0.):
            raise ValueError('Photon mean and gamma shape should be positive, '
                             'but found: {} and {}.'
                             .format(mean_photons, gamma_shape))
        self.mode = PhotonMode(mode)
        self.mean_photons, self.gamma_shape = (float(mean_photons),
                                               float(gamma_shape))

    __repr__ = _generate_repr(__init__)

    @_t.overload
    def __eq__(self, other: _te.Self) -> bool:
        ...

    @_t.overload
    def __eq__(self, other: _t.Any) -> _t.Any:
        ...

    def __eq__(self, other: _t.Any) -> _t.Any:
        return ((self.mode, self.mean_photons, self.gamma_shape)
                == (other.mode, other.mean_photons, other.gamma_shape)
                if isinstance(other, PhotonModel)
                else NotImplemented)


def sample_csr(geometry: FrameGeometry,
               density: float,
               rng: _Generator) -> _Positions:
    """
    Draws one frame of a homogeneous Poisson process over the volume.

    :param geometry: simulated volume.
    :param density: expected number of emitters per frame.
    :param rng: random stream of the frame.
    :returns: positions array of shape ``(count, 3)`` in nm.

    >>> import numpy as np
    >>> sample_csr(FrameGeometry(), 0., np.random.default_rng(0)).shape
    (0, 3)
    """
    if not density >= 0.:
        raise ValueError('Density should be non-negative, but found: {}.'
                         .format(density))
    count = int(rng.poisson(density))
    return rng.uniform(low=(0., 0., geometry.z_min_nm),
                       high=(geometry.width_nm, geometry.height_nm,
                             geometry.z_max_nm),
                       size=(count, 3))


def build_helix_cloud(geometry: FrameGeometry,
                      params: HelixParams,
                      rng: _Generator,
                      *,
                      structure_id: int = 0) -> PointCloud:
    """
    Builds a scene of helical structures spanning the field of view.

    Every structure winds ``params.strands_per_structure`` phase-shifted
    helical strands around a straight axis
    whose endpoints lie on opposite lateral faces of the volume.
    Points leaving the volume laterally are redrawn,
    points leaving it axially are clipped.

    :raises DegenerateGeometryError:
        if a structure cannot be filled within the redraw cap.
    """
    chunks, axes, labels = [], [], []
    for index in range(params.n_structures):
        start, end = _draw_axis(geometry, params.helix_radius_nm, rng)
        chunks.append(_fill_structure(geometry, params, start, end, rng))
        axes.append((start, end))
        labels.append(_np.full(params.seeds_per_structure, index))
    return PointCloud(_np.concatenate(chunks), structure_id, params, axes,
                      _np.concatenate(labels))


def select_frame_emitters(cloud: PointCloud,
                          density: float,
                          rng: _Generator) -> _Positions:
    if not len(cloud):
        raise ValueError('Point cloud should not be empty.')
    if not density >= 0.:
        raise ValueError('Density should be non-negative, but found: {}.'
                         .format(density))
    count = min(int(rng.poisson(density)), len(cloud))
    indices = rng.choice(len(cloud), size=count, replace=False)
    return cloud.points[indices].copy()


def assign_photons(positions: _Positions,
                   model: PhotonModel,
                   rng: _Generator) -> _t.List[Emitter]:
    if model.mode is PhotonMode.FIXED:
        photons = _np.full(len(positions), model.mean_photons)
    else:
        photons = rng.gamma(model.gamma_shape,
                            model.mean_photons / model.gamma_shape,
                            size=len(positions))
    return [Emitter(None, x, y, z, count)
            for (x, y, z), count in zip(positions.tolist(), photons.tolist())]


def positions_of(emitters: _t.Sequence[Emitter]) -> _Positions:
    if not emitters:
        return _np.empty((0, 3))
    return _np.array([emitter.position for emitter in emitters],
                     dtype=_np.float64)


def _axial_offset(geometry: FrameGeometry,
                  radius: float,
                  rng: _Generator) -> float:
    low, high = geometry.z_min_nm + radius, geometry.z_max_nm - radius
    if low > high:
        return (geometry.z_min_nm + geometry.z_max_nm) / 2.
    return float(rng.uniform(low, high))


def _draw_axis(geometry: FrameGeometry,
               radius: float,
               rng: _Generator) -> _t.Tuple[_FloatArray, _FloatArray]:
    z = _axial_offset(geometry, radius, rng)
    width, height = geometry.width_nm, geometry.height_nm
    if rng.random() < 0.5:
        start = (0., rng.uniform(0., height), z)
        end = (width, rng.uniform(0., height), z)
    else:
        start = (rng.uniform(0., width), 0., z)
        end = (rng.uniform(0., width), height, z)
    return _np.array(start), _np.array(end)


def _fill_structure(geometry: FrameGeometry,
                    params: HelixParams,
                    start: _FloatArray,
                    end: _FloatArray,
                    rng: _Generator) -> _Positions:
    length = float(_np.linalg.norm(end - start))
    tangent = (end - start) / length
    normal = _np.cross(tangent, (0., 0., 1.))
    normal /= _np.linalg.norm(normal)
    binormal = _np.cross(tangent, normal)
    accepted, count = [], 0
    for _ in range(MAX_REDRAW_ROUNDS):
        needed = params.seeds_per_structure - count
        strands = rng.integers(0, params.strands_per_structure, size=needed)
        offsets = rng.uniform(0., length, size=needed)
        phases = (2. * _math.pi * offsets / params.pitch_nm
                  + 2. * _math.pi * strands / params.strands_per_structure)
        points = (start + offsets[:, None] * tangent
                  + params.helix_radius_nm
                  * (_np.cos(phases)[:, None] * normal
                     + _np.sin(phases)[:, None] * binormal))
        if params.jitter_sigma_nm:
            points += rng.normal(0., params.jitter_sigma_nm,
                                 size=points.shape)
        _np.clip(points[:, 2], geometry.z_min_nm, geometry.z_max_nm,
                 out=points[:, 2])
        points = points[geometry._lateral_mask(points)]
        accepted.append(points)
        count += len(points)
        if count == params.seeds_per_structure:
            return _np.concatenate(accepted)
    raise DegenerateGeometryError(
            'Could not place {} seeds inside the domain within {} rounds.'
            .format(params.seeds_per_structure, MAX_REDRAW_ROUNDS)
    )
