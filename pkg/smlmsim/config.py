"""Simulation configuration and its INI representation."""
import configparser as _configparser
import enum as _enum
import typing as _t
from pathlib import Path as _Path

import typing_extensions as _te
from reprit.base import generate_repr as _generate_repr

from .camera import CameraModel as _CameraModel
from .core.streams import MAX_SEED as _MAX_SEED
from .optics import AstigmaticPsf as _AstigmaticPsf
from .sampler import (FrameGeometry as _FrameGeometry,
                      HelixParams as _HelixParams,
                      PhotonModel as _PhotonModel)


class FormatError(ValueError):
    pass


class SamplingMode(str, _enum.Enum):
    CSR = 'csr'
    STRUCTURED = 'structured'


class Snr(str, _enum.Enum):
    LOW = 'low'
    MEDIUM = 'medium'
    HIGH = 'high'


SNR_PRESETS: _t.Mapping[Snr, _t.Tuple[float, float]] = {
    Snr.LOW: (1000., 10.),
    Snr.MEDIUM: (5000., 50.),
    Snr.HIGH: (20000., 200.),
}


class SimulationConfig:
    __slots__ = ('geometry', 'psf', 'camera', 'photon_model',
                 'sampling_mode', 'helix', 'density', 'n_frames',
                 'master_seed', 'background_photons')

    def __init__(self,
                 geometry: _FrameGeometry = _FrameGeometry(),
                 psf: _AstigmaticPsf = _AstigmaticPsf(),
                 camera: _CameraModel = _CameraModel(),
                 photon_model: _PhotonModel = _PhotonModel(),
                 sampling_mode: SamplingMode = SamplingMode.CSR,
                 helix: _HelixParams = _HelixParams(),
                 density: float = 5.,
                 n_frames: int = 100,
                 master_seed: int = 0,
                 background_photons: float = 50.) -> None:
        if n_frames < 1:
            raise ValueError('Frames count should be positive, '
                             'but found: {}.'.format(n_frames))
        if not density >= 0.:
            raise ValueError('Density should be non-negative, '
                             'but found: {}.'.format(density))
        if not 0 <= master_seed <= _MAX_SEED:
            raise ValueError('Master seed should be a 64-bit unsigned '
                             'integer, but found: {}.'.format(master_seed))
        if not background_photons >= 0.:
            raise ValueError('Background should be non-negative, '
                             'but found: {}.'.format(background_photons))
        self.geometry, self.psf, self.camera = geometry, psf, camera
        self.photon_model = photon_model
        self.sampling_mode = SamplingMode(sampling_mode)
        self.helix, self.density = helix, float(density)
        self.n_frames, self.master_seed = int(n_frames), int(master_seed)
        self.background_photons = float(background_photons)

    __repr__ = _generate_repr(__init__)

    @_t.overload
    def __eq__(self, other: _te.Self) -> bool:
        ...

    @_t.overload
    def __eq__(self, other: _t.Any) -> _t.Any:
        ...

    def __eq__(self, other: _t.Any) -> _t.Any:
        return (to_dict(self) == to_dict(other)
                if isinstance(other, SimulationConfig)
                else NotImplemented)

    def replace(self, **changes: _t.Any) -> 'SimulationConfig':
        fields = {name: getattr(self, name) for name in self.__slots__}
        fields.update(changes)
        return SimulationConfig(**fields)

    def with_snr(self, snr: Snr) -> 'SimulationConfig':
        mean_photons, background = SNR_PRESETS[Snr(snr)]
        return self.replace(
                photon_model=_PhotonModel(self.photon_model.mode,
                                          mean_photons,
                                          self.photon_model.gamma_shape),
                background_photons=background
        )


_SECTIONS: _t.Mapping[str, _t.Tuple[str, _t.Type[_t.Any]]] = {
    'geometry': ('geometry', _FrameGeometry),
    'psf': ('psf', _AstigmaticPsf),
    'camera': ('camera', _CameraModel),
    'photons': ('photon_model', _PhotonModel),
    'helix': ('helix', _HelixParams),
}


def to_dict(config: SimulationConfig) -> _t.Dict[str, _t.Any]:
    result: _t.Dict[str, _t.Any] = {
        section: {name: _plain(getattr(getattr(config, field), name))
                  for name in cls.__slots__}
        for section, (field, cls) in _SECTIONS.items()
    }
    result['sampling'] = {'mode': config.sampling_mode.value,
                          'density': config.density}
    result['simulation'] = {'n_frames': config.n_frames,
                            'master_seed': config.master_seed,
                            'background_photons': config.background_photons}
    return result


def from_dict(raw: _t.Mapping[str, _t.Mapping[str, _t.Any]]
              ) -> SimulationConfig:
    unknown = set(raw) - {*_SECTIONS, 'sampling', 'simulation'}
    if unknown:
        raise FormatError('Unknown configuration sections: {}.'
                          .format(', '.join(sorted(unknown))))
    simulation = dict(raw.get('simulation', {}))
    photons = dict(raw.get('photons', {}))
    snr = simulation.pop('snr', None)
    if snr is not None:
        mean_photons, background = SNR_PRESETS[_parse(Snr, snr, 'snr')]
        photons.setdefault('mean_photons', mean_photons)
        simulation.setdefault('background_photons', background)
    nested = {}
    for section, (field, cls) in _SECTIONS.items():
        values = photons if section == 'photons' else raw.get(section, {})
        nested[field] = _build(cls, section, values)
    sampling = raw.get('sampling', {})
    _check_keys('sampling', sampling, ('mode', 'density'))
    _check_keys('simulation', simulation,
                ('n_frames', 'master_seed', 'background_photons'))
    arguments = dict(nested)
    if 'mode' in sampling:
        arguments['sampling_mode'] = _parse(SamplingMode, sampling['mode'],
                                            'mode')
    if 'density' in sampling:
        arguments['density'] = float(sampling['density'])
    if 'n_frames' in simulation:
        arguments['n_frames'] = int(simulation['n_frames'])
    if 'master_seed' in simulation:
        arguments['master_seed'] = int(simulation['master_seed'])
    if 'background_photons' in simulation:
        arguments['background_photons'] = float(
                simulation['background_photons']
        )
    return SimulationConfig(**arguments)


def load_config(path: _Path) -> SimulationConfig:
    """
    Reads configuration from an INI document.

    Sections mirror configuration fields,
    absent keys take their defaults.
    """
    parser = _configparser.ConfigParser()
    try:
        with open(path, encoding='utf-8') as file:
            parser.read_file(file)
    except _configparser.Error as error:
        raise FormatError('{}: {}'.format(path, error)) from None
    try:
        return from_dict({section: dict(parser[section])
                          for section in parser.sections()})
    except ValueError as error:
        raise FormatError('{}: {}'.format(path, error)) from None


def dump_config(config: SimulationConfig, path: _Path) -> None:
    parser = _configparser.ConfigParser()
    for section, values in to_dict(config).items():
        parser[section] = {name: str(value) for name, value in values.items()}
    with open(path, 'w', encoding='utf-8', newline='\n') as file:
        parser.write(file)


def _build(cls: _t.Type[_t.Any],
           section: str,
           values: _t.Mapping[str, _t.Any]) -> _t.Any:
    _check_keys(section, values, cls.__slots__)
    defaults = cls()
    arguments = {}
    for name in cls.__slots__:
        default = getattr(defaults, name)
        value = values.get(name, default)
        arguments[name] = (_parse(type(default), value, name)
                           if isinstance(default, _enum.Enum)
                           else type(default)(value))
    return cls(**arguments)


def _check_keys(section: str,
                values: _t.Mapping[str, _t.Any],
                allowed: _t.Iterable[str]) -> None:
    unknown = set(values) - set(allowed)
    if unknown:
        raise FormatError('Unknown keys in section [{}]: {}.'
                          .format(section, ', '.join(sorted(unknown))))


_Enum = _t.TypeVar('_Enum', bound=_enum.Enum)


def _parse(cls: _t.Type[_Enum], value: _t.Any, name: str) -> _Enum:
    try:
        return cls(value)
    except ValueError:
        raise FormatError('Invalid {}: {!r}, expected one of {}.'
                          .format(name, value,
                                  ', '.join(member.value
                                            for member in cls))) from None


def _plain(value: _t.Any) -> _t.Any:
    return value.value if isinstance(value, _enum.Enum) else value
