import json
import tempfile
from pathlib import Path
from typing import List

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smlmsim.config import (FormatError,
                            SimulationConfig)
from smlmsim.dataset import (MANIFEST_FILE_NAME,
                             generate_dataset)
from smlmsim.density import NnCurve
from smlmsim.formats import (CSV_HEADER,
                             ChecksumError,
                             file_checksum,
                             group_by_frame,
                             load_curve,
                             load_manifest,
                             read_emitters,
                             read_frames,
                             save_curve,
                             write_emitters)
from smlmsim.sampler import (Emitter,
                             FrameGeometry)

emitters_lists = st.lists(
        st.builds(Emitter, st.integers(0, 100), st.floats(0., 1e4),
                  st.floats(0., 1e4), st.floats(-750., 750.),
                  st.floats(0., 1e5)),
        max_size=20
)


@given(emitters_lists)
def test_emitters_round_trip(emitters: List[Emitter]) -> None:
    with tempfile.TemporaryDirectory() as directory:
        path = Path(directory) / 'emitters.csv'
        write_emitters(path, emitters)

        result = read_emitters(path)

    assert len(result) == len(emitters)
    for read, written in zip(result, emitters):
        assert read.frame_id == written.frame_id
        assert np.allclose(read.position, written.position, rtol=0.,
                           atol=5e-4 + 1e-9)
        assert abs(read.photons - written.photons) <= 5e-3 + 1e-9


def test_emitters_file_layout(tmp_path: Path) -> None:
    path = tmp_path / 'emitters.csv'

    write_emitters(path, [Emitter(3, 1.5, 2.25, -3.125, 100.)])

    assert path.read_bytes() == (','.join(CSV_HEADER).encode()
                                 + b'\n3,1.500,2.250,-3.125,100.00\n')


def test_emitters_without_frame(tmp_path: Path) -> None:
    with pytest.raises(ValueError):
        write_emitters(tmp_path / 'emitters.csv',
                       [Emitter(None, 0., 0., 0., 1.)])


@pytest.mark.parametrize('content, line',
                         [('x,y\n', 1),
                          ('frame,x_nm,y_nm,z_nm,photons\n0,1,2,3,4\n'
                           '1,2,3\n', 3),
                          ('frame,x_nm,y_nm,z_nm,photons\n0,1,2,3,4\n'
                           '0,1,2,3,4\nzero,1,2,3,4\n', 4)])
def test_read_emitters_errors(tmp_path: Path,
                              content: str,
                              line: int) -> None:
    path = tmp_path / 'emitters.csv'
    path.write_text(content, encoding='utf-8')

    with pytest.raises(FormatError, match=':{}:'.format(line)):
        read_emitters(path)


def test_group_by_frame() -> None:
    emitters = [Emitter(2, 0., 0., 0., 1.), Emitter(0, 1., 0., 0., 1.),
                Emitter(2, 2., 0., 0., 1.)]

    result = group_by_frame(emitters, 4)

    assert [len(frame) for frame in result] == [1, 0, 2, 0]
    assert result[2] == [emitters[0], emitters[2]]


def test_curve_round_trip(tmp_path: Path) -> None:
    curve = NnCurve(FrameGeometry(16, 24), [(1., 900.5), (2., 700.25)], 1000,
                    5)
    path = tmp_path / 'curve.json'

    save_curve(curve, path)
    result = load_curve(path)

    assert result.geometry == curve.geometry
    assert result.entries == curve.entries
    assert result.mc_frames_per_entry == curve.mc_frames_per_entry
    assert result.seed == curve.seed


def test_malformed_json(tmp_path: Path) -> None:
    path = tmp_path / 'curve.json'
    path.write_text('{\n"entries": [\n', encoding='utf-8')

    with pytest.raises(FormatError, match='curve.json'):
        load_curve(path)


@pytest.fixture
def dataset_dir(tmp_path: Path) -> Path:
    generate_dataset(SimulationConfig(FrameGeometry(16, 16), n_frames=3,
                                      master_seed=9),
                     tmp_path)
    return tmp_path


def test_manifest(dataset_dir: Path) -> None:
    result = load_manifest(dataset_dir / MANIFEST_FILE_NAME)

    assert result.config == SimulationConfig(FrameGeometry(16, 16),
                                             n_frames=3, master_seed=9)
    assert result.checksum == file_checksum(dataset_dir / result.frame_file)
    raw = json.loads((dataset_dir / MANIFEST_FILE_NAME).read_text('utf-8'))
    assert (raw['width_px'], raw['height_px'], raw['n_frames']) == (16, 16, 3)
    assert raw['dtype'] == '<u2'


def test_manifest_checksum_mismatch(dataset_dir: Path) -> None:
    manifest = load_manifest(dataset_dir / MANIFEST_FILE_NAME)
    frame_path = dataset_dir / manifest.frame_file
    data = bytearray(frame_path.read_bytes())
    data[0] ^= 1
    frame_path.write_bytes(bytes(data))

    with pytest.raises(ChecksumError):
        load_manifest(dataset_dir / MANIFEST_FILE_NAME)
    assert load_manifest(dataset_dir / MANIFEST_FILE_NAME,
                         verify=False).checksum == manifest.checksum


def test_read_frames(dataset_dir: Path) -> None:
    manifest = load_manifest(dataset_dir / MANIFEST_FILE_NAME)

    result = read_frames(dataset_dir / manifest.frame_file,
                         manifest.config.geometry)

    assert len(result) == 3
    assert all(frame.pixels.shape == (16, 16) for frame in result)
    with pytest.raises(FormatError):
        read_frames(dataset_dir / manifest.frame_file, FrameGeometry(10, 10))
