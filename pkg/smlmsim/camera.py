"""Camera noise chain between expected photons and digital counts."""
import typing as _t

import numpy as _np
import typing_extensions as _te
from reprit.base import generate_repr as _generate_repr

from .hints import Generator as _Generator
from .optics import (Frame as _Frame,
                     FrameKind as _FrameKind)

MAX_ADU = 65535


class CameraModel:
    """
    sCMOS-like camera: shot noise, Gaussian read noise,
    gain and baseline offset, quantized to 16 bits.
    """

    __slots__ = ('read_noise_e', 'gain_adu_per_e', 'baseline_adu',
                 'quantum_efficiency')

    def __init__(self,
                 read_noise_e: float = 3.,
                 gain_adu_per_e: float = 1.,
                 baseline_adu: float = 100.,
                 quantum_efficiency: float = 1.) -> None:
        if not read_noise_e >= 0.:
            raise ValueError('Read noise should be non-negative, '
                             'but found: {}.'.format(read_noise_e))
        if not gain_adu_per_e > 0.:
            raise ValueError('Gain should be positive, but found: {}.'
                             .format(gain_adu_per_e))
        if not baseline_adu >= 0.:
            raise ValueError('Baseline should be non-negative, '
                             'but found: {}.'.format(baseline_adu))
        if not 0. < quantum_efficiency <= 1.:
            raise ValueError('Quantum efficiency should be in (0, 1], '
                             'but found: {}.'.format(quantum_efficiency))
        self.read_noise_e = float(read_noise_e)
        self.gain_adu_per_e = float(gain_adu_per_e)
        self.baseline_adu = float(baseline_adu)
        self.quantum_efficiency = float(quantum_efficiency)

    __repr__ = _generate_repr(__init__)

    @_t.overload
    def __eq__(self, other: _te.Self) -> bool:
        ...

    @_t.overload
    def __eq__(self, other: _t.Any) -> _t.Any:
        ...

    def __eq__(self, other: _t.Any) -> _t.Any:
        return ((self.read_noise_e, self.gain_adu_per_e, self.baseline_adu,
                 self.quantum_efficiency)
                == (other.read_noise_e, other.gain_adu_per_e,
                    other.baseline_adu, other.quantum_efficiency)
                if isinstance(other, CameraModel)
                else NotImplemented)


def apply_noise(expected: _Frame,
                camera: CameraModel,
                rng: _Generator) -> _Frame:
    """
    Draws a noisy 16-bit camera frame from an expected-photons frame.

    :raises ValueError: if the frame already holds camera counts.
    """
    if expected.kind is not _FrameKind.EXPECTED:
        raise ValueError('Noise can only be applied to expected frames, '
                         'but found: {}.'.format(expected.kind.value))
    electrons = rng.poisson(camera.quantum_efficiency * expected.pixels)
    read_noise = rng.normal(0., camera.read_noise_e, size=electrons.shape)
    adu = _np.rint(camera.gain_adu_per_e * (electrons + read_noise)
                   + camera.baseline_adu)
    return _Frame(expected.geometry,
                  _np.clip(adu, 0, MAX_ADU).astype(_np.uint16),
                  _FrameKind.COUNTS)


def photons_from_adu(counts: _Frame, camera: CameraModel) -> _Frame:
    """
    Converts camera counts back to non-negative photo-electron estimates.
    """
    if counts.kind is not _FrameKind.COUNTS:
        raise ValueError('Expected counts frame, but found: {}.'
                         .format(counts.kind.value))
    photons = ((counts.pixels.astype(_np.float64) - camera.baseline_adu)
               / camera.gain_adu_per_e)
    return _Frame(counts.geometry, _np.maximum(photons, 0.),
                  _FrameKind.EXPECTED)
