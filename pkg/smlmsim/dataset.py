"""On-the-fly dataset generation, density sweeps and their calibration."""
import csv as _csv
import logging as _logging
import math as _math
import typing as _t
from concurrent.futures import (FIRST_COMPLETED as _FIRST_COMPLETED,
                                Future as _Future,
                                ThreadPoolExecutor as _ThreadPoolExecutor,
                                wait as _wait)
from pathlib import Path as _Path

import numpy as _np
import tifffile as _tifffile

from .camera import apply_noise as _apply_noise
from .config import (SamplingMode as _SamplingMode,
                     SimulationConfig as _SimulationConfig)
from .core.reorder import ReorderBuffer as _ReorderBuffer
from .core.streams import (Stage as _Stage,
                           substream as _substream)
from .density import (NnCurve as _NnCurve,
                      nominal_density as _nominal_density)
from .formats import (CSV_HEADER as _CSV_HEADER,
                      FORMAT_VERSION as _FORMAT_VERSION,
                      DatasetManifest as _DatasetManifest,
                      FrameHasher as _FrameHasher,
                      emitter_row as _emitter_row,
                      frame_bytes as _frame_bytes,
                      group_by_frame as _group_by_frame,
                      load_manifest as _load_manifest,
                      read_frames as _read_frames,
                      read_emitters as _read_emitters,
                      write_manifest as _write_manifest,
                      _write_json)
from .hints import Positions as _Positions
from .optics import (Frame as _Frame,
                     render_frame as _render_frame)
from .sampler import (Emitter as _Emitter,
                      PointCloud as _PointCloud,
                      assign_photons as _assign_photons,
                      build_helix_cloud as _build_helix_cloud,
                      sample_csr as _sample_csr,
                      select_frame_emitters as _select_frame_emitters)

FRAME_FILE_NAME = 'frames.raw'
GT_FILE_NAME = 'ground_truth.csv'
MANIFEST_FILE_NAME = 'manifest.json'
SWEEP_FILE_NAME = 'sweep.json'
TIFF_FILE_NAME = 'frames.tif'
SWEEP_RANGE = (0.38, 13.)
SWEEP_SIZE = 9

logger = _logging.getLogger(__name__)


def regenerate_cloud(config: _SimulationConfig,
                     frame_id: int,
                     stage: _Stage = _Stage.CLOUD) -> _PointCloud:
    """Rebuilds the point cloud a structured frame was sampled from."""
    return _build_helix_cloud(config.geometry, config.helix,
                              _substream(config.master_seed, frame_id, stage),
                              structure_id=frame_id)


def frame_positions(config: _SimulationConfig, frame_id: int) -> _Positions:
    selection = _substream(config.master_seed, frame_id, _Stage.SELECTION)
    if config.sampling_mode is _SamplingMode.STRUCTURED:
        return _select_frame_emitters(regenerate_cloud(config, frame_id),
                                      config.density, selection)
    return _sample_csr(config.geometry, config.density, selection)


def simulate_frame(config: _SimulationConfig,
                   frame_id: int) -> _t.Tuple[_t.List[_Emitter], _Frame]:
    """
    Simulates ground truth and the noisy camera frame of ``frame_id``.

    Every stage draws from its own substream of the master seed,
    so frames can be produced in any order by any number of workers.
    """
    positions = frame_positions(config, frame_id)
    if not config.geometry.contains_all(positions):
        raise RuntimeError('Frame {} has emitters outside of the domain.'
                           .format(frame_id))
    emitters = [emitter.with_frame_id(frame_id)
                for emitter in _assign_photons(
                    positions, config.photon_model,
                    _substream(config.master_seed, frame_id, _Stage.PHOTONS)
            )]
    expected = _render_frame(emitters, config.geometry, config.psf,
                             config.background_photons)
    counts = _apply_noise(expected, config.camera,
                          _substream(config.master_seed, frame_id,
                                     _Stage.NOISE))
    return emitters, counts


def generate_dataset(config: _SimulationConfig,
                     out_dir: _Path,
                     *,
                     workers: int = 1,
                     tiff: bool = False) -> _DatasetManifest:
    """
    Generates ``config.n_frames`` frames into ``out_dir``.

    Writes raw little-endian 16-bit frames, the ground-truth CSV
    and the manifest.
    Frames are simulated concurrently and written in frame order
    by a single writer, so output bytes do not depend on ``workers``.
    """
    out_dir = _Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    hasher = _FrameHasher()
    buffer: _ReorderBuffer[_t.Tuple[_t.List[_Emitter], _Frame]] = (
        _ReorderBuffer()
    )
    window = 4 * max(workers, 1)
    stack = []
    logger.info('Generating %d %s frames into %s.', config.n_frames,
                config.sampling_mode.value, out_dir)
    with open(out_dir / FRAME_FILE_NAME, 'wb') as frames_file, \
            open(out_dir / GT_FILE_NAME, 'w', encoding='utf-8',
                 newline='') as gt_file, \
            _ThreadPoolExecutor(max_workers=workers) as executor:
        writer = _csv.writer(gt_file, lineterminator='\n')
        writer.writerow(_CSV_HEADER)
        pending: _t.Dict[_Future[_t.Tuple[_t.List[_Emitter], _Frame]],
                         int] = {}
        next_frame_id = 0
        while next_frame_id < config.n_frames or pending:
            while (next_frame_id < config.n_frames
                   and len(pending) + len(buffer) < window):
                pending[executor.submit(simulate_frame, config,
                                        next_frame_id)] = next_frame_id
                next_frame_id += 1
            done, _ = _wait(pending, return_when=_FIRST_COMPLETED)
            for future in done:
                buffer.push(pending.pop(future), future.result())
            for emitters, frame in buffer.release():
                data = _frame_bytes(frame)
                frames_file.write(data)
                hasher.update(data)
                writer.writerows(_emitter_row(emitter)
                                 for emitter in emitters)
                if tiff:
                    stack.append(frame.pixels)
    if tiff:
        _tifffile.imwrite(out_dir / TIFF_FILE_NAME, _np.stack(stack),
                          photometric='minisblack')
    manifest = _DatasetManifest(config, FRAME_FILE_NAME, GT_FILE_NAME,
                                _FORMAT_VERSION, hasher.hexdigest())
    _write_manifest(manifest, out_dir / MANIFEST_FILE_NAME)
    logger.info('Generated %d frames, checksum %s.', config.n_frames,
                manifest.checksum)
    return manifest


def sweep_targets(start: float = SWEEP_RANGE[0],
                  stop: float = SWEEP_RANGE[1],
                  size: int = SWEEP_SIZE) -> _t.List[float]:
    """
    Returns nominal densities spaced geometrically between the bounds.

    >>> targets = sweep_targets()
    >>> len(targets), targets[0], targets[-1]
    (9, 0.38, 13.0)
    """
    return [float(value) for value in _np.geomspace(start, stop, size)]


def pilot_positions(config: _SimulationConfig,
                    pilot_frames: int) -> _t.List[_Positions]:
    result = []
    for frame_id in range(pilot_frames):
        rng = _substream(config.master_seed, frame_id, _Stage.PILOT)
        if config.sampling_mode is _SamplingMode.STRUCTURED:
            cloud = _build_helix_cloud(config.geometry, config.helix, rng)
            result.append(_select_frame_emitters(cloud, config.density, rng))
        else:
            result.append(_sample_csr(config.geometry, config.density, rng))
    return result


def calibrate_density(config: _SimulationConfig,
                      target: float,
                      curve: _NnCurve,
                      *,
                      pilot_frames: int = 400,
                      tolerance: float = 0.02,
                      max_rounds: int = 30) -> float:
    """
    Finds sampling density whose nominal density matches ``target``.

    CSR datasets are their own reference, so the target is returned as is.
    Structured datasets are bisected in log-density
    over positions-only pilot simulations
    which reuse the same random streams in every round.
    """
    if config.sampling_mode is _SamplingMode.CSR:
        return target
    low, high = _math.log(target / 100.), _math.log(target * 1.5)
    middle = (low + high) / 2.
    for _ in range(max_rounds):
        middle = (low + high) / 2.
        density = _math.exp(middle)
        try:
            measured = _nominal_density(
                    pilot_positions(config.replace(density=density),
                                    pilot_frames),
                    curve
            )
        except ValueError:
            low = middle
            continue
        if abs(measured / target - 1.) <= tolerance:
            break
        if measured < target:
            low = middle
        else:
            high = middle
    logger.info('Nominal density %.4g calibrated to sampling density %.4g.',
                target, _math.exp(middle))
    return _math.exp(middle)


class SweepEntry(_t.NamedTuple):
    target: float
    density: float
    measured: _t.Optional[float]
    manifest: _DatasetManifest


def run_sweep(config: _SimulationConfig,
              out_dir: _Path,
              curve: _NnCurve,
              *,
              targets: _t.Optional[_t.Sequence[float]] = None,
              workers: int = 1,
              pilot_frames: int = 400) -> _t.List[SweepEntry]:
    """
    Generates one dataset per nominal density target
    and measures the nominal density it actually achieved.
    """
    out_dir = _Path(out_dir)
    result = []
    for index, target in enumerate(targets or sweep_targets()):
        density = calibrate_density(config, target, curve,
                                    pilot_frames=pilot_frames)
        dataset_dir = out_dir / 'density_{:02d}'.format(index)
        manifest = generate_dataset(config.replace(density=density),
                                    dataset_dir, workers=workers)
        ground_truth = _group_by_frame(
                _read_emitters(dataset_dir / GT_FILE_NAME), config.n_frames
        )
        try:
            measured: _t.Optional[float] = _nominal_density(ground_truth,
                                                            curve)
        except ValueError:
            measured = None
        logger.info('Sweep %d: target %.4g, sampling density %.4g, '
                    'measured %s.', index, target, density, measured)
        result.append(SweepEntry(target, density, measured, manifest))
    _write_json([{'target': entry.target,
                  'density': entry.density,
                  'measured': entry.measured,
                  'directory': 'density_{:02d}'.format(index)}
                 for index, entry in enumerate(result)],
                out_dir / SWEEP_FILE_NAME)
    return result


def load_dataset(manifest_path: _Path,
                 *,
                 verify: bool = True
                 ) -> _t.Tuple[_DatasetManifest, _t.List[_Frame],
                               _t.List[_t.List[_Emitter]]]:
    """
    Loads a generated dataset with its frames
    and ground truth grouped by frame.

    :raises ChecksumError:
        if ``verify`` is set and frame bytes differ from the recorded ones.
    """
    manifest_path = _Path(manifest_path)
    manifest = _load_manifest(manifest_path, verify=verify)
    directory = manifest_path.parent
    frames = _read_frames(directory / manifest.frame_file,
                          manifest.config.geometry)
    ground_truth = _group_by_frame(
            _read_emitters(directory / manifest.gt_file), len(frames)
    )
    return manifest, frames, ground_truth
