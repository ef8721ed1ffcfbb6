from typing import (Iterator,
                    List)

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smlmsim import localizer
from smlmsim.camera import CameraModel
from smlmsim.config import SimulationConfig
from smlmsim.core.pixels import pixel_edges
from smlmsim.dataset import simulate_frame
from smlmsim.localizer import (FitResult,
                               _log_likelihood_and_gradient,
                               detect_candidates,
                               fit_mle,
                               localize_stack)
from smlmsim.metrics import (jaccard,
                             match,
                             rmse)
from smlmsim.optics import (AstigmaticPsf,
                            Frame,
                            FrameKind,
                            render_frame)
from smlmsim.sampler import (Emitter,
                             FrameGeometry,
                             PhotonModel)


def to_counts(emitters: List[Emitter],
              camera: CameraModel,
              background: float = 10.) -> Frame:
    expected = render_frame(emitters, FrameGeometry(32, 32), AstigmaticPsf(),
                            background)
    return Frame(expected.geometry,
                 np.rint(camera.gain_adu_per_e * expected.pixels
                         + camera.baseline_adu).astype(np.uint16),
                 FrameKind.COUNTS)


@pytest.mark.parametrize('x_nm, y_nm, z_nm',
                         [(1630., 1570., 0.),
                          (1510., 1690., 300.),
                          (1720., 1540., -300.)])
def test_noiseless_fit(x_nm: float, y_nm: float, z_nm: float) -> None:
    camera = CameraModel()
    frame = to_counts([Emitter(0, x_nm, y_nm, z_nm, 20000.)], camera)
    seed = (int(y_nm // 100.), int(x_nm // 100.))

    result = fit_mle(frame, camera, AstigmaticPsf(), seed)

    assert isinstance(result, FitResult)
    assert result.converged
    assert abs(result.x_nm - x_nm) < 5.
    assert abs(result.y_nm - y_nm) < 5.
    assert abs(result.z_nm - z_nm) < 25.
    assert abs(result.photons / 20000. - 1.) < 0.05


@pytest.mark.parametrize('z_nm', [-400., 400.])
def test_axial_sign(z_nm: float) -> None:
    camera = CameraModel()
    frame = to_counts([Emitter(0, 1600., 1600., z_nm, 20000.)], camera)

    result = fit_mle(frame, camera, AstigmaticPsf(), (16, 16))

    assert np.sign(result.z_nm) == np.sign(z_nm)


def test_likelihood_ascent() -> None:
    camera = CameraModel()
    frame = to_counts([Emitter(0, 1555., 1620., 150., 5000.)], camera, 50.)

    result = fit_mle(frame, camera, AstigmaticPsf(), (16, 15))

    assert len(result.history) >= 2
    assert all(next_value >= value
               for value, next_value in zip(result.history,
                                            result.history[1:]))
    assert result.log_likelihood == result.history[-1]


@given(st.floats(-40., 40.), st.floats(-40., 40.), st.floats(-500., 500.),
       st.floats(0.5, 1.5), st.floats(0.5, 1.5))
def test_gradient(dx: float,
                  dy: float,
                  z: float,
                  photons_scale: float,
                  background_scale: float) -> None:
    psf = AstigmaticPsf()
    rng = np.random.default_rng(0)
    expected = render_frame([Emitter(0, 750., 750., 100., 5000.)],
                            FrameGeometry(15, 15), psf, 20.)
    data = rng.poisson(expected.pixels).astype(np.float64)
    edges = pixel_edges(0, 15, 100.)
    parameters = np.array([750. + dx, 750. + dy, z, 5000. * photons_scale,
                           20. * background_scale])

    _, gradient = _log_likelihood_and_gradient(parameters, data, edges,
                                               edges, psf)

    steps = np.array([1e-3, 1e-3, 1e-3, 1e-3, 1e-5])
    numeric = []
    for index, step in enumerate(steps):
        shift = np.zeros(5)
        shift[index] = step
        upper, _ = _log_likelihood_and_gradient(parameters + shift, data,
                                                edges, edges, psf)
        lower, _ = _log_likelihood_and_gradient(parameters - shift, data,
                                                edges, edges, psf)
        numeric.append((upper - lower) / (2. * step))
    assert np.allclose(gradient, numeric, rtol=1e-4, atol=1e-2)


def test_translation() -> None:
    camera = CameraModel()
    psf = AstigmaticPsf()
    first = fit_mle(to_counts([Emitter(0, 1230., 1270., 100., 20000.)],
                              camera), camera, psf, (12, 12))
    second = fit_mle(to_counts([Emitter(0, 1630., 1470., 100., 20000.)],
                               camera), camera, psf, (14, 16))

    assert abs((second.x_nm - first.x_nm) - 400.) < 1.
    assert abs((second.y_nm - first.y_nm) - 200.) < 1.
    assert abs(second.z_nm - first.z_nm) < 5.


def test_empty_window() -> None:
    camera = CameraModel()
    frame = Frame(FrameGeometry(32, 32),
                  np.full((32, 32), 100, dtype=np.uint16), FrameKind.COUNTS)

    with pytest.raises(ValueError):
        fit_mle(frame, camera, AstigmaticPsf(), (16, 16))


def test_detect_single_emitter() -> None:
    camera = CameraModel()
    frame = to_counts([Emitter(0, 1650., 1350., 0., 20000.)], camera)

    result = detect_candidates(frame, camera)

    assert len(result) == 1
    (row, column), = result
    assert abs(row - 13) <= 1 and abs(column - 16) <= 1


def test_detect_flat_frame() -> None:
    camera = CameraModel()

    assert detect_candidates(to_counts([], camera), camera) == []


def test_detect_separation() -> None:
    camera = CameraModel()
    frame = to_counts([Emitter(0, 850., 850., 0., 20000.),
                       Emitter(0, 2350., 2350., 0., 20000.)], camera)

    result = detect_candidates(frame, camera)

    assert len(result) == 2
    (first_row, first_column), (second_row, second_column) = result
    assert ((first_row - second_row) ** 2
            + (first_column - second_column) ** 2) >= 25


def test_localize_stack() -> None:
    config = SimulationConfig(photon_model=PhotonModel(mean_photons=20000.),
                              density=0.38, n_frames=300, master_seed=8,
                              background_photons=10.)
    simulated = [simulate_frame(config, frame_id)
                 for frame_id in range(config.n_frames)]
    ground_truth = [emitters for emitters, _ in simulated]

    predictions = localize_stack([frame for _, frame in simulated],
                                 config.camera, config.psf, workers=4)

    assert len(predictions) == config.n_frames
    assert all(emitter.frame_id == frame_id
               for frame_id, frame in enumerate(predictions)
               for emitter in frame)
    result = match(ground_truth, predictions)
    assert jaccard(result) >= 0.95
    lateral, _, _ = rmse(result)
    assert lateral <= 15.


def scripted_log_likelihoods(monkeypatch: pytest.MonkeyPatch,
                             values: List[float]) -> None:
    script: Iterator[float] = iter(values)
    monkeypatch.setattr(localizer, '_is_small_step', lambda *_: True)
    monkeypatch.setattr(localizer, '_poisson_log_likelihood',
                        lambda *_: next(script, values[-1]))


def test_rejected_step_does_not_converge(monkeypatch: pytest.MonkeyPatch
                                         ) -> None:
    camera = CameraModel()
    frame = to_counts([Emitter(0, 1600., 1600., 0., 20000.)], camera)
    scripted_log_likelihoods(monkeypatch, [0., -1., 1.])

    result = fit_mle(frame, camera, AstigmaticPsf(), (16, 16))

    assert result.converged
    assert result.iterations == 2
    assert result.history == (0., 1.)


def test_rounding_loss_converges(monkeypatch: pytest.MonkeyPatch) -> None:
    camera = CameraModel()
    frame = to_counts([Emitter(0, 1600., 1600., 0., 20000.)], camera)
    scripted_log_likelihoods(monkeypatch, [1e5, 1e5 - 1e-9])

    result = fit_mle(frame, camera, AstigmaticPsf(), (16, 16))

    assert result.converged
    assert result.iterations == 1
    assert result.history == (1e5,)


def test_no_progress(monkeypatch: pytest.MonkeyPatch) -> None:
    camera = CameraModel()
    frame = to_counts([Emitter(0, 1600., 1600., 0., 20000.)], camera)
    scripted_log_likelihoods(monkeypatch, [0., -1.])

    result = fit_mle(frame, camera, AstigmaticPsf(), (16, 16))

    assert not result.converged
    assert result.history == (0.,)
