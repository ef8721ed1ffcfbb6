"""File formats: emitter CSV, raw frames, JSON manifests, curves, reports."""
import csv as _csv
import hashlib as _hashlib
import json as _json
import typing as _t
from pathlib import Path as _Path

import numpy as _np
from reprit.base import generate_repr as _generate_repr

from .config import (FormatError as _FormatError,
                     SimulationConfig as _SimulationConfig,
                     from_dict as _config_from_dict,
                     to_dict as _config_to_dict)
from .density import NnCurve as _NnCurve
from .metrics import MetricsReport as _MetricsReport
from .optics import (Frame as _Frame,
                     FrameKind as _FrameKind)
from .sampler import (Emitter as _Emitter,
                      FrameGeometry as _FrameGeometry)

CSV_HEADER = ('frame', 'x_nm', 'y_nm', 'z_nm', 'photons')
FORMAT_VERSION = 1
FRAME_DTYPE = _np.dtype('<u2')


class ChecksumError(ValueError):
    pass


class DatasetManifest:
    """
    Description of a generated dataset,
    file names are relative to the manifest's directory.
    """

    __slots__ = ('config', 'frame_file', 'gt_file', 'format_version',
                 'checksum')

    def __init__(self,
                 config: _SimulationConfig,
                 frame_file: str,
                 gt_file: str,
                 format_version: int,
                 checksum: str) -> None:
        self.config, self.frame_file, self.gt_file = (config, frame_file,
                                                      gt_file)
        self.format_version, self.checksum = format_version, checksum

    __repr__ = _generate_repr(__init__)

    def as_dict(self) -> _t.Dict[str, _t.Any]:
        geometry = self.config.geometry
        return {'format_version': self.format_version,
                'config': _config_to_dict(self.config),
                'frame_file': self.frame_file,
                'gt_file': self.gt_file,
                'checksum': self.checksum,
                'width_px': geometry.width_px,
                'height_px': geometry.height_px,
                'n_frames': self.config.n_frames,
                'dtype': FRAME_DTYPE.str}


class FrameHasher:
    """Running 64-bit digest of frame file bytes."""

    __slots__ = '_digest',

    def __init__(self) -> None:
        self._digest = _hashlib.blake2b(digest_size=8)

    def update(self, data: bytes) -> None:
        self._digest.update(data)

    def hexdigest(self) -> str:
        return self._digest.hexdigest()


def frame_bytes(frame: _Frame) -> bytes:
    if frame.kind is not _FrameKind.COUNTS:
        raise ValueError('Only counts frames can be stored, but found: {}.'
                         .format(frame.kind.value))
    return _np.ascontiguousarray(frame.pixels, dtype=FRAME_DTYPE).tobytes()


def file_checksum(path: _Path) -> str:
    hasher = FrameHasher()
    with open(path, 'rb') as file:
        for chunk in iter(lambda: file.read(1 << 20), b''):
            hasher.update(chunk)
    return hasher.hexdigest()


def read_frames(path: _Path,
                geometry: _FrameGeometry) -> _t.List[_Frame]:
    data = _np.fromfile(path, dtype=FRAME_DTYPE)
    frame_size = geometry.width_px * geometry.height_px
    if data.size % frame_size:
        raise _FormatError('{}: size {} is not a multiple of the frame size '
                           '{}.'.format(path, data.size, frame_size))
    return [_Frame(geometry, pixels.astype(_np.uint16), _FrameKind.COUNTS)
            for pixels in data.reshape(-1, *geometry.shape)]


def write_emitters(path: _Path, emitters: _t.Iterable[_Emitter]) -> None:
    with open(path, 'w', encoding='utf-8', newline='') as file:
        writer = _csv.writer(file, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        writer.writerows(emitter_row(emitter) for emitter in emitters)


def emitter_row(emitter: _Emitter) -> _t.Tuple[str, ...]:
    if emitter.frame_id is None:
        raise ValueError('Emitter should have a frame id to be stored.')
    return (str(emitter.frame_id), '{:.3f}'.format(emitter.x_nm),
            '{:.3f}'.format(emitter.y_nm), '{:.3f}'.format(emitter.z_nm),
            '{:.2f}'.format(emitter.photons))


def read_emitters(path: _Path) -> _t.List[_Emitter]:
    """
    Reads emitters from a CSV file with the mandatory header
    ``frame,x_nm,y_nm,z_nm,photons``.

    :raises FormatError: naming the offending line.
    """
    result = []
    with open(path, encoding='utf-8', newline='') as file:
        reader = _csv.reader(file)
        header = next(reader, None)
        if header is None or tuple(field.strip() for field in header) != (
                CSV_HEADER):
            raise _FormatError('{}:1: expected header {!r}, but found: {!r}.'
                               .format(path, ','.join(CSV_HEADER), header))
        for row in reader:
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise _FormatError('{}:{}: expected {} fields, but found {}.'
                                   .format(path, reader.line_num,
                                           len(CSV_HEADER), len(row)))
            try:
                result.append(_Emitter(int(row[0]), float(row[1]),
                                       float(row[2]), float(row[3]),
                                       float(row[4])))
            except ValueError as error:
                raise _FormatError('{}:{}: {}'.format(path, reader.line_num,
                                                      error)) from None
    return result


def group_by_frame(emitters: _t.Iterable[_Emitter],
                   n_frames: _t.Optional[int] = None
                   ) -> _t.List[_t.List[_Emitter]]:
    """
    Groups emitters into per-frame lists indexed by frame id,
    keeping file order within a frame.
    """
    emitters = list(emitters)
    size = max((_t.cast(int, emitter.frame_id) + 1 for emitter in emitters),
               default=0)
    if n_frames is not None:
        size = max(size, n_frames)
    result: _t.List[_t.List[_Emitter]] = [[] for _ in range(size)]
    for emitter in emitters:
        result[_t.cast(int, emitter.frame_id)].append(emitter)
    return result


def write_manifest(manifest: DatasetManifest, path: _Path) -> None:
    _write_json(manifest.as_dict(), path)


def load_manifest(path: _Path,
                  *,
                  verify: bool = True) -> DatasetManifest:
    """
    Reads a dataset manifest.

    :raises ChecksumError:
        if ``verify`` is set and the frame file digest differs.
    """
    raw = _read_json(path)
    try:
        version = int(raw['format_version'])
        if version != FORMAT_VERSION:
            raise _FormatError('Unsupported format version: {}.'
                               .format(version))
        manifest = DatasetManifest(_config_from_dict(raw['config']),
                                   str(raw['frame_file']),
                                   str(raw['gt_file']), version,
                                   str(raw['checksum']))
    except (KeyError, TypeError) as error:
        raise _FormatError('{}: malformed manifest: {}.'
                           .format(path, error)) from None
    if verify:
        actual = file_checksum(_Path(path).parent / manifest.frame_file)
        if actual != manifest.checksum:
            raise ChecksumError('{}: frame file checksum {} does not match '
                                'recorded {}.'
                                .format(path, actual, manifest.checksum))
    return manifest


def save_curve(curve: _NnCurve, path: _Path) -> None:
    geometry = curve.geometry
    _write_json({'format_version': FORMAT_VERSION,
                 'geometry': {name: getattr(geometry, name)
                              for name in _FrameGeometry.__slots__},
                 'entries': [list(entry) for entry in curve.entries],
                 'mc_frames_per_entry': curve.mc_frames_per_entry,
                 'seed': curve.seed},
                path)


def load_curve(path: _Path) -> _NnCurve:
    raw = _read_json(path)
    try:
        if int(raw['format_version']) != FORMAT_VERSION:
            raise _FormatError('{}: unsupported format version: {}.'
                               .format(path, raw['format_version']))
        return _NnCurve(_FrameGeometry(**raw['geometry']),
                        [(density, distance)
                         for density, distance in raw['entries']],
                        int(raw['mc_frames_per_entry']), raw['seed'])
    except (KeyError, TypeError) as error:
        raise _FormatError('{}: malformed curve: {}.'
                           .format(path, error)) from None


def write_report(report: _MetricsReport, path: _Path) -> None:
    _write_json(report.as_dict(), path)


def _read_json(path: _Path) -> _t.Any:
    with open(path, encoding='utf-8') as file:
        try:
            return _json.load(file)
        except _json.JSONDecodeError as error:
            raise _FormatError('{}:{}: {}'.format(path, error.lineno,
                                                  error.msg)) from None


def _write_json(value: _t.Any, path: _Path) -> None:
    with open(path, 'w', encoding='utf-8', newline='\n') as file:
        _json.dump(value, file, indent=2, sort_keys=True)
        file.write('\n')
