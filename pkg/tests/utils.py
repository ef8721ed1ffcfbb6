import math
from itertools import permutations
from typing import (List,
                    Sequence,
                    Tuple)

import numpy as np
from hypothesis.strategies import SearchStrategy
from scipy.integrate import quad

from smlmsim.hints import Positions
from smlmsim.metrics import MatchTolerance
from smlmsim.optics import (AstigmaticPsf,
                            sigma_xy)
from smlmsim.sampler import (Emitter,
                             FrameGeometry)

Strategy = SearchStrategy
PositionsPair = Tuple[Positions, Positions]
FramesPair = Tuple[List[Positions], List[Positions]]
GeometryWithPositions = Tuple[FrameGeometry, Positions]


def equivalence(left_statement: bool, right_statement: bool) -> bool:
    return left_statement is right_statement


def implication(antecedent: bool, consequent: bool) -> bool:
    return not antecedent or consequent


def brute_force_match(ground_truth: Positions,
                      predictions: Positions,
                      tolerance: MatchTolerance) -> Tuple[int, float]:
    """
    Returns the largest number of gated pairs
    and the smallest total distance among matchings of that size.
    """
    if not (len(ground_truth) and len(predictions)):
        return 0, 0.
    transposed = len(ground_truth) > len(predictions)
    smaller, larger = ((predictions, ground_truth)
                       if transposed
                       else (ground_truth, predictions))
    best = (0, 0.)
    for assignment in permutations(range(len(larger)), len(smaller)):
        count, total = 0, 0.
        for index, other_index in enumerate(assignment):
            offset = larger[other_index] - smaller[index]
            if (math.hypot(offset[0], offset[1]) <= tolerance.lateral_nm
                    and abs(offset[2]) <= tolerance.axial_nm):
                count += 1
                total += float(np.linalg.norm(offset))
        if count > best[0] or count == best[0] and total < best[1]:
            best = (count, total)
    return best


def brute_force_mean_nn_distance(frames: Sequence[Positions],
                                 dimension: int = 2) -> float:
    distances = []
    for positions in frames:
        if len(positions) < 2:
            continue
        for index, position in enumerate(positions):
            distances.append(min(
                    float(np.linalg.norm(position[:dimension]
                                         - other[:dimension]))
                    for other_index, other in enumerate(positions)
                    if other_index != index
            ))
    return sum(distances) / len(distances)


def quadrature_frame(emitter: Emitter,
                     geometry: FrameGeometry,
                     psf: AstigmaticPsf) -> np.ndarray:
    """Integrates the emitter's Gaussian over every pixel numerically."""
    sigma_x, sigma_y = sigma_xy(emitter.z_nm, psf)
    columns = [_gaussian_integral(edge, edge + geometry.pixel_size_nm,
                                  emitter.x_nm, float(sigma_x))
               for edge in geometry.pixel_size_nm
               * np.arange(geometry.width_px)]
    rows = [_gaussian_integral(edge, edge + geometry.pixel_size_nm,
                               emitter.y_nm, float(sigma_y))
            for edge in geometry.pixel_size_nm * np.arange(geometry.height_px)]
    return emitter.photons * np.outer(rows, columns)


def _gaussian_integral(start: float,
                       stop: float,
                       center: float,
                       sigma: float) -> float:
    value, _ = quad(lambda point: (math.exp(-0.5 * ((point - center) / sigma)
                                            ** 2)
                                   / (sigma * math.sqrt(2. * math.pi))),
                    start, stop, epsabs=1e-13, epsrel=1e-12)
    return value
