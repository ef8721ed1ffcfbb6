"""Evaluation grid over sampling modes, SNR presets and densities."""
import json as _json
import logging as _logging
import typing as _t
from pathlib import Path as _Path

from .config import (SamplingMode as _SamplingMode,
                     SimulationConfig as _SimulationConfig,
                     Snr as _Snr)
from .dataset import (MANIFEST_FILE_NAME as _MANIFEST_FILE_NAME,
                      calibrate_density as _calibrate_density,
                      generate_dataset as _generate_dataset,
                      load_dataset as _load_dataset,
                      sweep_targets as _sweep_targets)
from .density import NnCurve as _NnCurve
from .localizer import localize_stack as _localize_stack
from .metrics import (MatchTolerance as _MatchTolerance,
                      build_report as _build_report,
                      match as _match,
                      rmse_axes as _rmse_axes)

RESULTS_FILE_NAME = 'benchmark.jsonl'

logger = _logging.getLogger(__name__)


def run_benchmark(config: _SimulationConfig,
                  out_dir: _Path,
                  curve: _NnCurve,
                  *,
                  targets: _t.Optional[_t.Sequence[float]] = None,
                  snr_levels: _t.Sequence[_Snr] = tuple(_Snr),
                  sampling_modes: _t.Sequence[_SamplingMode] = tuple(
                          _SamplingMode
                  ),
                  tolerance: _MatchTolerance = _MatchTolerance(),
                  workers: int = 1,
                  pilot_frames: int = 400) -> _t.List[_t.Dict[str, _t.Any]]:
    """
    Generates, localizes and evaluates a dataset for every
    sampling mode, SNR preset and nominal density target.

    Every cell is appended to ``benchmark.jsonl`` in ``out_dir``
    as soon as it is evaluated.

    :returns: rows in the order they were written.
    """
    out_dir = _Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    targets = _sweep_targets() if targets is None else list(targets)
    rows = []
    with open(out_dir / RESULTS_FILE_NAME, 'w', encoding='utf-8',
              newline='\n') as results_file:
        for mode in sampling_modes:
            for snr in snr_levels:
                cell_config = config.replace(
                        sampling_mode=_SamplingMode(mode)
                ).with_snr(snr)
                for index, target in enumerate(targets):
                    row = _evaluate_cell(
                            cell_config, target,
                            out_dir / '{}_{}_{:02d}'.format(
                                    _SamplingMode(mode).value,
                                    _Snr(snr).value, index
                            ),
                            curve, tolerance, workers, pilot_frames
                    )
                    row.update(sampling_mode=_SamplingMode(mode).value,
                               snr=_Snr(snr).value, target_density=target)
                    results_file.write(_json.dumps(row, sort_keys=True)
                                       + '\n')
                    results_file.flush()
                    logger.info('%s/%s at %.4g: JI %.3f.',
                                row['sampling_mode'], row['snr'], target,
                                row['ji'])
                    rows.append(row)
    return rows


def _evaluate_cell(config: _SimulationConfig,
                   target: float,
                   directory: _Path,
                   curve: _NnCurve,
                   tolerance: _MatchTolerance,
                   workers: int,
                   pilot_frames: int) -> _t.Dict[str, _t.Any]:
    density = _calibrate_density(config, target, curve,
                                 pilot_frames=pilot_frames)
    config = config.replace(density=density)
    _generate_dataset(config, directory, workers=workers)
    _, frames, ground_truth = _load_dataset(directory / _MANIFEST_FILE_NAME,
                                            verify=False)
    predictions = _localize_stack(frames, config.camera, config.psf,
                                  workers=workers)
    result = _match(ground_truth, predictions, tolerance)
    report = _build_report(ground_truth, predictions,
                           config.geometry.pixel_size_nm,
                           tolerance=tolerance, curve=curve, matched=result)
    row = report.as_dict()
    row['rmse_x_nm'], row['rmse_y_nm'], row['rmse_z_nm'] = (
        _rmse_axes(result) if result.pairs else (None, None, None)
    )
    row['sampling_density'] = density
    return row
