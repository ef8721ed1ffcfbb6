import math
from typing import Tuple

import numpy as np
from hypothesis import given

from smlmsim.hints import Positions
from smlmsim.sampler import (FrameGeometry,
                             PhotonMode,
                             PhotonModel,
                             assign_photons,
                             positions_of)
from tests import strategies


@given(strategies.geometries_with_positions, strategies.photon_models,
       strategies.seeds)
def test_basic(geometry_with_positions: Tuple[FrameGeometry, Positions],
               model: PhotonModel,
               seed: int) -> None:
    _, positions = geometry_with_positions

    result = assign_photons(positions, model, np.random.default_rng(seed))

    assert len(result) == len(positions)
    assert all(emitter.frame_id is None for emitter in result)
    assert all(emitter.photons >= 0. for emitter in result)
    assert np.array_equal(positions_of(result).reshape(-1, 3), positions)


@given(strategies.geometries_with_positions, strategies.photons_counts)
def test_fixed(geometry_with_positions: Tuple[FrameGeometry, Positions],
               mean_photons: float) -> None:
    _, positions = geometry_with_positions

    result = assign_photons(positions,
                            PhotonModel(PhotonMode.FIXED, mean_photons),
                            np.random.default_rng(0))

    assert all(emitter.photons == mean_photons for emitter in result)


def test_gamma_mean() -> None:
    model = PhotonModel(PhotonMode.GAMMA, 5000., 3.)
    size = 20000
    positions = np.zeros((size, 3))

    result = assign_photons(positions, model, np.random.default_rng(5))

    mean = sum(emitter.photons for emitter in result) / size
    assert abs(mean - model.mean_photons) <= 4. * model.mean_photons / (
        math.sqrt(model.gamma_shape * size)
    )


def test_gamma_variance() -> None:
    model = PhotonModel(PhotonMode.GAMMA, 5000., 3.)
    size = 20000
    positions = np.zeros((size, 3))

    result = assign_photons(positions, model, np.random.default_rng(7))

    variance = float(np.var([emitter.photons for emitter in result]))
    expected = model.mean_photons ** 2 / model.gamma_shape
    assert abs(variance / expected - 1.) < 0.1
