"""Command-line interface."""
import argparse as _argparse
import json as _json
import logging as _logging
import sys as _sys
import typing as _t
from pathlib import Path as _Path

from . import __version__
from .benchmark import run_benchmark as _run_benchmark
from .config import (SamplingMode as _SamplingMode,
                     SimulationConfig as _SimulationConfig,
                     Snr as _Snr,
                     load_config as _load_config)
from .dataset import (generate_dataset as _generate_dataset,
                      load_dataset as _load_dataset,
                      run_sweep as _run_sweep,
                      sweep_targets as _sweep_targets)
from .density import (build_csr_curve as _build_csr_curve,
                      nominal_density as _nominal_density)
from .formats import (group_by_frame as _group_by_frame,
                      load_curve as _load_curve,
                      read_emitters as _read_emitters,
                      save_curve as _save_curve,
                      write_emitters as _write_emitters,
                      write_report as _write_report)
from .localizer import localize_stack as _localize_stack
from .metrics import (MatchTolerance as _MatchTolerance,
                      build_report as _build_report)
from .rendering import render_reconstruction as _render_reconstruction

CURVE_DENSITIES = _sweep_targets(1., 16., 9)

logger = _logging.getLogger(__name__)


def main(argv: _t.Optional[_t.Sequence[str]] = None) -> int:
    """
    Runs the command given by ``argv``.

    :returns: process exit code.
    """
    arguments = _parser().parse_args(argv)
    _logging.basicConfig(
            level=(_logging.WARNING, _logging.INFO,
                   _logging.DEBUG)[min(arguments.verbose, 2)],
            format='%(asctime)s %(levelname)s %(name)s: %(message)s'
    )
    try:
        config = _load_settings(arguments)
        arguments.handler(arguments, config)
    except (OSError, ValueError) as error:
        _sys.stderr.write(_json.dumps({'error': type(error).__name__,
                                       'message': str(error)})
                          + '\n')
        return 1
    return 0


def _benchmark(arguments: _argparse.Namespace,
               config: _SimulationConfig) -> None:
    _run_benchmark(config, arguments.out, _load_curve(arguments.curve),
                   targets=arguments.targets,
                   snr_levels=arguments.snr or tuple(_Snr),
                   sampling_modes=arguments.modes or tuple(_SamplingMode),
                   tolerance=_MatchTolerance(arguments.lateral_tolerance,
                                             arguments.axial_tolerance),
                   workers=arguments.threads,
                   pilot_frames=arguments.pilot_frames)


def _build_curve(arguments: _argparse.Namespace,
                 config: _SimulationConfig) -> None:
    curve = _build_csr_curve(config.geometry,
                             arguments.densities or CURVE_DENSITIES,
                             arguments.mc_frames, config.master_seed,
                             workers=arguments.threads)
    _save_curve(curve, arguments.out)


def _apply_curve(arguments: _argparse.Namespace,
                 config: _SimulationConfig) -> None:
    ground_truth = _group_by_frame(_read_emitters(arguments.gt))
    _print_json({'nominal_density': _nominal_density(
            ground_truth, _load_curve(arguments.curve)
    )})


def _evaluate(arguments: _argparse.Namespace,
              config: _SimulationConfig) -> None:
    ground_truth = _group_by_frame(_read_emitters(arguments.gt))
    predictions = _group_by_frame(_read_emitters(arguments.pred))
    if len(predictions) > len(ground_truth):
        logger.warning('Predictions reference frame %d, '
                       'but ground truth ends at frame %d.',
                       len(predictions) - 1, len(ground_truth) - 1)
    report = _build_report(
            ground_truth, predictions, config.geometry.pixel_size_nm,
            tolerance=_MatchTolerance(arguments.lateral_tolerance,
                                      arguments.axial_tolerance),
            curve=(None
                   if arguments.curve is None
                   else _load_curve(arguments.curve))
    )
    if arguments.out is None:
        _print_json(report.as_dict())
    else:
        _write_report(report, arguments.out)


def _generate(arguments: _argparse.Namespace,
              config: _SimulationConfig) -> None:
    _generate_dataset(config, arguments.out, workers=arguments.threads,
                      tiff=arguments.tiff)


def _localize(arguments: _argparse.Namespace,
              config: _SimulationConfig) -> None:
    manifest, frames, _ = _load_dataset(arguments.manifest)
    predictions = _localize_stack(frames, manifest.config.camera,
                                  manifest.config.psf,
                                  threshold_sigma=arguments.threshold,
                                  window_px=arguments.window,
                                  workers=arguments.threads)
    _write_emitters(arguments.out, (emitter
                                    for frame in predictions
                                    for emitter in frame))


def _render(arguments: _argparse.Namespace,
            config: _SimulationConfig) -> None:
    _render_reconstruction(arguments.pred, config.geometry,
                           arguments.upsample, arguments.out)


def _sweep(arguments: _argparse.Namespace,
           config: _SimulationConfig) -> None:
    _run_sweep(config, arguments.out, _load_curve(arguments.curve),
               targets=arguments.targets, workers=arguments.threads,
               pilot_frames=arguments.pilot_frames)


def _load_settings(arguments: _argparse.Namespace) -> _SimulationConfig:
    config = (_SimulationConfig()
              if arguments.config is None
              else _load_config(arguments.config))
    if arguments.seed is not None:
        config = config.replace(master_seed=arguments.seed)
    return config


def _parser() -> _argparse.ArgumentParser:
    parser = _argparse.ArgumentParser(
            prog='smlmsim',
            description='Simulates, localizes and evaluates '
                        'single-molecule localization microscopy datasets.'
    )
    parser.add_argument('--version', action='version', version=__version__)
    parser.add_argument('--config', type=_Path,
                        help='INI configuration file.')
    parser.add_argument('--seed', type=int,
                        help='master seed overriding the configuration.')
    parser.add_argument('--threads', type=_positive, default=1,
                        help='worker threads count.')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='log INFO messages, DEBUG when repeated.')
    commands = parser.add_subparsers(dest='command', required=True)

    generate = commands.add_parser('generate', help='generate a dataset.')
    generate.add_argument('--out', type=_Path, required=True)
    generate.add_argument('--tiff', action='store_true',
                          help='also write a multi-page TIFF stack.')
    generate.set_defaults(handler=_generate)

    sweep = commands.add_parser(
            'sweep', help='generate datasets over nominal densities.'
    )
    sweep.add_argument('--out', type=_Path, required=True)
    _add_grid_arguments(sweep)
    sweep.set_defaults(handler=_sweep)

    density = commands.add_parser(
            'density', help='build or apply a nearest-neighbor curve.'
    )
    density_commands = density.add_subparsers(dest='action', required=True)
    build = density_commands.add_parser('build')
    build.add_argument('--out', type=_Path, required=True)
    build.add_argument('--densities', type=float, nargs='+')
    build.add_argument('--mc-frames', type=_positive, default=2000,
                       help='simulated frames per entry at densities '
                            'of 16 and above, more for sparser ones.')
    build.set_defaults(handler=_build_curve)
    apply = density_commands.add_parser('apply')
    apply.add_argument('--gt', type=_Path, required=True)
    apply.add_argument('--curve', type=_Path, required=True)
    apply.set_defaults(handler=_apply_curve)

    localize = commands.add_parser('localize',
                                   help='localize emitters of a dataset.')
    localize.add_argument('--manifest', type=_Path, required=True)
    localize.add_argument('--out', type=_Path, required=True)
    localize.add_argument('--threshold', type=float, default=4.,
                          help='detection threshold in background sigmas.')
    localize.add_argument('--window', type=_positive, default=15,
                          help='fit window size in pixels.')
    localize.set_defaults(handler=_localize)

    evaluate = commands.add_parser('evaluate',
                                   help='score predictions against '
                                        'ground truth.')
    evaluate.add_argument('--gt', type=_Path, required=True)
    evaluate.add_argument('--pred', type=_Path, required=True)
    evaluate.add_argument('--curve', type=_Path)
    evaluate.add_argument('--out', type=_Path)
    _add_tolerance_arguments(evaluate)
    evaluate.set_defaults(handler=_evaluate)

    render = commands.add_parser('render',
                                 help='render a reconstruction image.')
    render.add_argument('--pred', type=_Path, required=True)
    render.add_argument('--out', type=_Path, required=True)
    render.add_argument('--upsample', type=_positive, default=10)
    render.set_defaults(handler=_render)

    benchmark = commands.add_parser(
            'benchmark', help='evaluate the baseline localizer over '
                              'sampling modes, SNR levels and densities.'
    )
    benchmark.add_argument('--out', type=_Path, required=True)
    benchmark.add_argument('--snr', type=_Snr, nargs='+',
                           choices=list(_Snr))
    benchmark.add_argument('--modes', type=_SamplingMode, nargs='+',
                           choices=list(_SamplingMode))
    _add_grid_arguments(benchmark)
    _add_tolerance_arguments(benchmark)
    benchmark.set_defaults(handler=_benchmark)
    return parser


def _add_grid_arguments(parser: _argparse.ArgumentParser) -> None:
    parser.add_argument('--curve', type=_Path, required=True)
    parser.add_argument('--targets', type=float, nargs='+',
                        help='nominal densities, '
                             'nine between 0.38 and 13 by default.')
    parser.add_argument('--pilot-frames', type=_positive, default=400)


def _add_tolerance_arguments(parser: _argparse.ArgumentParser) -> None:
    parser.add_argument('--lateral-tolerance', type=float, default=250.)
    parser.add_argument('--axial-tolerance', type=float, default=500.)


def _positive(value: str) -> int:
    result = int(value)
    if result < 1:
        raise _argparse.ArgumentTypeError('should be positive, '
                                          'but found: {}'.format(value))
    return result


def _print_json(value: _t.Any) -> None:
    _sys.stdout.write(_json.dumps(value, indent=2, sort_keys=True) + '\n')
