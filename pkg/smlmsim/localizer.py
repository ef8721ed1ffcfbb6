"""Baseline localizer: peak detection and single-emitter Poisson MLE fits."""
import logging as _logging
import math as _math
import typing as _t
from concurrent.futures import ThreadPoolExecutor as _ThreadPoolExecutor

import numpy as _np
from reprit.base import generate_repr as _generate_repr
from scipy.ndimage import (gaussian_filter as _gaussian_filter,
                           maximum_filter as _maximum_filter)

from .camera import (CameraModel as _CameraModel,
                     photons_from_adu as _photons_from_adu)
from .core.hints import FloatArray as _FloatArray
from .core.pixels import (axis_derivatives as _axis_derivatives,
                          pixel_edges as _pixel_edges)
from .hints import PixelPosition as _PixelPosition
from .optics import (AstigmaticPsf as _AstigmaticPsf,
                     Frame as _Frame,
                     sigma_xy as _sigma_xy)
from .sampler import Emitter as _Emitter

MAX_ITERATIONS = 200
MIN_SEPARATION_PX = 5
MIN_WINDOW_PX = 9
POSITION_TOLERANCE_NM = 0.01
RELATIVE_TOLERANCE = 1e-6

_INITIAL_DAMPING = 1e-2
_LIKELIHOOD_ROUNDING = 1e-12
_MAX_DAMPING = 1e12
_MIN_BACKGROUND = 1e-6
_MIN_PHOTONS = 1.

logger = _logging.getLogger(__name__)


class FitResult:
    """
    Outcome of a single-emitter fit.

    ``history`` holds the log-likelihood after every accepted iteration,
    starting from the initial guess.
    """

    __slots__ = ('x_nm', 'y_nm', 'z_nm', 'photons', 'background',
                 'converged', 'iterations', 'log_likelihood', 'history')

    def __init__(self,
                 x_nm: float,
                 y_nm: float,
                 z_nm: float,
                 photons: float,
                 background: float,
                 converged: bool,
                 iterations: int,
                 log_likelihood: float,
                 history: _t.Sequence[float] = ()) -> None:
        self.x_nm, self.y_nm, self.z_nm = x_nm, y_nm, z_nm
        self.photons, self.background = photons, background
        self.converged, self.iterations = converged, iterations
        self.log_likelihood, self.history = log_likelihood, tuple(history)

    __repr__ = _generate_repr(__init__)


def detect_candidates(frame: _Frame,
                      camera: _CameraModel,
                      threshold_sigma: float = 4.,
                      *,
                      psf: _AstigmaticPsf = _AstigmaticPsf()
                      ) -> _t.List[_PixelPosition]:
    """
    Finds bright local maxima of the smoothed photon image.

    Maxima must exceed the median background
    by ``threshold_sigma`` of its shot noise,
    and accepted maxima are at least 5 pixels apart,
    brighter ones taking precedence.

    :returns: ``(row, column)`` pixel positions.
    """
    photons = _photons_from_adu(frame, camera).pixels
    background = float(_np.median(photons))
    smoothed = _gaussian_filter(
            photons, psf.sigma0_nm / frame.geometry.pixel_size_nm,
            mode='nearest'
    )
    threshold = background + threshold_sigma * _math.sqrt(background)
    peaks = ((smoothed == _maximum_filter(smoothed, size=3, mode='nearest'))
             & (smoothed > threshold))
    rows, columns = _np.nonzero(peaks)
    order = _np.argsort(-smoothed[rows, columns], kind='stable')
    result: _t.List[_PixelPosition] = []
    for row, column in zip(rows[order].tolist(), columns[order].tolist()):
        if all((row - other_row) ** 2 + (column - other_column) ** 2
               >= MIN_SEPARATION_PX ** 2
               for other_row, other_column in result):
            result.append((row, column))
    return result


def fit_mle(frame: _Frame,
            camera: _CameraModel,
            psf: _AstigmaticPsf,
            seed_px: _PixelPosition,
            window_px: int = 15) -> FitResult:
    """
    Fits position, photons and background of a single emitter
    by maximizing Poisson likelihood of a window around ``seed_px``.

    Uses Levenberg-Marquardt damped Fisher scoring with analytic derivatives
    of the pixel-integrated astigmatic Gaussian.
    Only steps that do not decrease the likelihood are accepted,
    and the fit converges on a small accepted step
    or on a small rejected one whose likelihood loss is rounding error.

    :raises ValueError: if the window has no signal at all.
    """
    geometry = frame.geometry
    photons = _photons_from_adu(frame, camera).pixels
    row_start, row_stop = _window(seed_px[0], window_px, geometry.height_px)
    column_start, column_stop = _window(seed_px[1], window_px,
                                        geometry.width_px)
    data = photons[row_start:row_stop, column_start:column_stop]
    if not data.any():
        raise ValueError('Fit window at {} has no signal.'.format(seed_px))
    row_edges = _pixel_edges(row_start, row_stop, geometry.pixel_size_nm)
    column_edges = _pixel_edges(column_start, column_stop,
                                geometry.pixel_size_nm)
    parameters = _initial_parameters(data, row_edges, column_edges)
    values = data.ravel()
    mu, jacobian = _model(parameters, row_edges, column_edges, psf)
    log_likelihood = _poisson_log_likelihood(values, mu)
    history = [log_likelihood]
    damping, converged, iterations = _INITIAL_DAMPING, False, 0
    while iterations < MAX_ITERATIONS and damping < _MAX_DAMPING:
        iterations += 1
        gradient = jacobian.T @ (values / mu - 1.)
        information = jacobian.T @ (jacobian / mu[:, None])
        diagonal = _np.diag(information)
        scale = _np.where(diagonal > 0., diagonal, 1.)
        try:
            step = _np.linalg.solve(information + damping * _np.diag(scale),
                                    gradient)
        except _np.linalg.LinAlgError:
            damping *= 10.
            continue
        candidate = _constrain(parameters + step)
        step = candidate - parameters
        candidate_mu, candidate_jacobian = _model(candidate, row_edges,
                                                  column_edges, psf)
        candidate_log_likelihood = _poisson_log_likelihood(values,
                                                           candidate_mu)
        small = damping <= 1. and _is_small_step(step, parameters)
        if candidate_log_likelihood < log_likelihood:
            if small and _math.isclose(candidate_log_likelihood,
                                       log_likelihood,
                                       rel_tol=_LIKELIHOOD_ROUNDING):
                converged = True
                break
            damping *= 10.
            continue
        parameters, mu, jacobian = candidate, candidate_mu, candidate_jacobian
        log_likelihood = candidate_log_likelihood
        history.append(log_likelihood)
        damping = max(damping / 10., 1e-9)
        if small:
            converged = True
            break
    x, y, z, signal, background = parameters.tolist()
    return FitResult(x, y, z, signal, background, converged, iterations,
                     log_likelihood, history)


def localize_stack(frames: _t.Sequence[_Frame],
                   camera: _CameraModel,
                   psf: _AstigmaticPsf,
                   *,
                   threshold_sigma: float = 4.,
                   window_px: int = 15,
                   workers: int = 1) -> _t.List[_t.List[_Emitter]]:
    """
    Detects and fits emitters on every frame,
    dropping non-converged and out-of-domain fits.

    Frame ids are positions in ``frames``.
    """

    def localize(frame_id: int) -> _t.List[_Emitter]:
        frame = frames[frame_id]
        result, dropped = [], 0
        for seed in detect_candidates(frame, camera, threshold_sigma,
                                      psf=psf):
            try:
                fit = fit_mle(frame, camera, psf, seed, window_px)
            except ValueError:
                dropped += 1
                continue
            if not (fit.converged
                    and frame.geometry.contains(fit.x_nm, fit.y_nm,
                                                fit.z_nm)):
                dropped += 1
                continue
            result.append(_Emitter(frame_id, fit.x_nm, fit.y_nm, fit.z_nm,
                                   fit.photons))
        if dropped:
            logger.debug('Frame %d: dropped %d fits.', frame_id, dropped)
        return result

    with _ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(localize, range(len(frames))))


def _constrain(parameters: _FloatArray) -> _FloatArray:
    parameters[3] = max(parameters[3], _MIN_PHOTONS)
    parameters[4] = max(parameters[4], _MIN_BACKGROUND)
    return parameters


def _initial_parameters(data: _FloatArray,
                        row_edges: _FloatArray,
                        column_edges: _FloatArray) -> _FloatArray:
    background = max(float(_np.median(data)), _MIN_BACKGROUND)
    signal = _np.clip(data - background, 0., None)
    weights = signal if signal.any() else data
    row_centers = (row_edges[:-1] + row_edges[1:]) / 2.
    column_centers = (column_edges[:-1] + column_edges[1:]) / 2.
    total = weights.sum()
    return _np.array([(weights.sum(axis=0) @ column_centers) / total,
                      (weights.sum(axis=1) @ row_centers) / total,
                      0.,
                      max(float(data.sum()) - background * data.size,
                          _MIN_PHOTONS),
                      background])


def _is_small_step(step: _FloatArray, parameters: _FloatArray) -> bool:
    return bool(_np.all(_np.abs(step[:3]) < POSITION_TOLERANCE_NM)
                and abs(step[3]) < RELATIVE_TOLERANCE * parameters[3]
                and abs(step[4]) < RELATIVE_TOLERANCE * parameters[4])


def _log_likelihood_and_gradient(parameters: _FloatArray,
                                 data: _FloatArray,
                                 row_edges: _FloatArray,
                                 column_edges: _FloatArray,
                                 psf: _AstigmaticPsf
                                 ) -> _t.Tuple[float, _FloatArray]:
    values = data.ravel()
    mu, jacobian = _model(parameters, row_edges, column_edges, psf)
    return (_poisson_log_likelihood(values, mu),
            jacobian.T @ (values / mu - 1.))


def _model(parameters: _FloatArray,
           row_edges: _FloatArray,
           column_edges: _FloatArray,
           psf: _AstigmaticPsf) -> _t.Tuple[_FloatArray, _FloatArray]:
    x, y, z, signal, background = parameters.tolist()
    sigma_x, sigma_y = _sigma_xy(z, psf)
    sigma_x, sigma_y = float(sigma_x), float(sigma_y)
    columns, columns_by_x, columns_by_sigma = _axis_derivatives(
            column_edges, x, sigma_x
    )
    rows, rows_by_y, rows_by_sigma = _axis_derivatives(row_edges, y, sigma_y)
    focal_scale = psf.sigma0_nm ** 2 / psf.d_nm ** 2
    sigma_x_by_z = focal_scale * (z - psf.gamma_nm) / sigma_x
    sigma_y_by_z = focal_scale * (z + psf.gamma_nm) / sigma_y
    shape = _np.outer(rows, columns)
    jacobian = _np.stack(
            [signal * _np.outer(rows, columns_by_x),
             signal * _np.outer(rows_by_y, columns),
             signal * (sigma_x_by_z * _np.outer(rows, columns_by_sigma)
                       + sigma_y_by_z * _np.outer(rows_by_sigma, columns)),
             shape,
             _np.ones_like(shape)],
            axis=-1
    ).reshape(-1, 5)
    return (signal * shape + background).ravel(), jacobian


def _poisson_log_likelihood(values: _FloatArray, mu: _FloatArray) -> float:
    return float(_np.sum(values * _np.log(mu) - mu))


def _window(center: int, size: int, limit: int) -> _t.Tuple[int, int]:
    half = size // 2
    start, stop = max(center - half, 0), min(center + half + 1, limit)
    minimum = min(MIN_WINDOW_PX, limit)
    if stop - start < minimum:
        if start == 0:
            stop = minimum
        else:
            start = stop - minimum
    return start, stop
