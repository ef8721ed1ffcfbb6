import json
import warnings
from pathlib import Path
from typing import (Any,
                    Dict)

import numpy as np

from smlmsim.benchmark import (RESULTS_FILE_NAME,
                               run_benchmark)
from smlmsim.config import (SamplingMode,
                            SimulationConfig,
                            Snr)
from smlmsim.dataset import MANIFEST_FILE_NAME
from smlmsim.density import (ExtrapolationWarning,
                             build_csr_curve)
from smlmsim.sampler import FrameGeometry


def test_basic(tmp_path: Path) -> None:
    geometry = FrameGeometry(16, 16)
    config = SimulationConfig(geometry, n_frames=4, master_seed=8)
    curve = build_csr_curve(geometry, list(np.geomspace(2., 16., 4)), 1000, 0)

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', ExtrapolationWarning)
        result = run_benchmark(config, tmp_path, curve, targets=[1., 3.],
                               snr_levels=[Snr.HIGH, Snr.LOW],
                               sampling_modes=[SamplingMode.CSR])

    assert len(result) == 4
    assert [(row['snr'], row['target_density']) for row in result] == [
        ('high', 1.), ('high', 3.), ('low', 1.), ('low', 3.)
    ]
    assert all(row['sampling_mode'] == 'csr' for row in result)
    assert all(row['sampling_density'] == row['target_density']
               for row in result)
    assert all(0. <= row['ji'] <= 1. for row in result)
    assert all(axes_consistent(row) for row in result)
    lines = (tmp_path / RESULTS_FILE_NAME).read_text(
            encoding='utf-8'
    ).splitlines()
    assert [json.loads(line) for line in lines] == result
    assert (tmp_path / 'csr_low_01' / MANIFEST_FILE_NAME).exists()


def axes_consistent(row: Dict[str, Any]) -> bool:
    axes = (row['rmse_x_nm'], row['rmse_y_nm'], row['rmse_z_nm'])
    return (all(value is None for value in axes)
            if row['n_tp'] == 0
            else all(value >= 0. for value in axes))
