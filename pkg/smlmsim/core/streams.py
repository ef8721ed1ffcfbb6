import enum as _enum

import numpy as _np

MAX_SEED = 2 ** 64 - 1


class Stage(_enum.IntEnum):
    CLOUD = 0
    SELECTION = 1
    PHOTONS = 2
    NOISE = 3
    CURVE = 4
    PILOT = 5


def substream(master_seed: int,
              frame_id: int,
              stage: Stage) -> _np.random.Generator:
    if not 0 <= master_seed <= MAX_SEED:
        raise ValueError('Master seed should be in [0, {}], but found: {}.'
                         .format(MAX_SEED, master_seed))
    if frame_id < 0:
        raise ValueError('Frame id should be non-negative, but found: {}.'
                         .format(frame_id))
    sequence = _np.random.SeedSequence([master_seed, frame_id, int(stage)])
    return _np.random.Generator(_np.random.Philox(sequence))
