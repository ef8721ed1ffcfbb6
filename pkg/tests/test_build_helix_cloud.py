import numpy as np
import pytest
from hypothesis import given

from smlmsim.core.streams import (Stage,
                                  substream)
from smlmsim.sampler import (DegenerateGeometryError,
                             FrameGeometry,
                             HelixParams,
                             PointCloud,
                             build_helix_cloud)
from tests import strategies


@given(strategies.geometries, strategies.helices, strategies.seeds)
def test_basic(geometry: FrameGeometry,
               params: HelixParams,
               seed: int) -> None:
    result = build_helix_cloud(geometry, params,
                               substream(seed, 0, Stage.CLOUD),
                               structure_id=7)

    assert isinstance(result, PointCloud)
    assert len(result) == params.total_seeds
    assert result.structure_id == 7
    assert len(result.axes) == params.n_structures
    assert geometry.contains_all(result.points)
    assert np.array_equal(np.bincount(result.labels,
                                      minlength=params.n_structures),
                          np.full(params.n_structures,
                                  params.seeds_per_structure))


@given(strategies.geometries, strategies.seeds)
def test_spanning(geometry: FrameGeometry, seed: int) -> None:
    params = HelixParams(seeds_per_structure=500)

    result = build_helix_cloud(geometry, params,
                               substream(seed, 0, Stage.CLOUD))

    for index in range(params.n_structures):
        points = result.points[result.labels == index]
        extents = points.max(axis=0) - points.min(axis=0)
        assert max(extents[0] / geometry.width_nm,
                   extents[1] / geometry.height_nm) >= 0.9


@given(strategies.geometries, strategies.seeds)
def test_zero_jitter(geometry: FrameGeometry, seed: int) -> None:
    params = HelixParams(seeds_per_structure=200, jitter_sigma_nm=0.)

    result = build_helix_cloud(geometry, params,
                               substream(seed, 0, Stage.CLOUD))

    for index, (start, end) in enumerate(result.axes):
        tangent = (end - start) / np.linalg.norm(end - start)
        points = result.points[result.labels == index]
        distances = np.linalg.norm(np.cross(points - start, tangent), axis=1)
        assert np.allclose(distances, params.helix_radius_nm, atol=1e-6)


@given(strategies.seeds)
def test_determinism(seed: int) -> None:
    geometry, params = FrameGeometry(), HelixParams(seeds_per_structure=100)

    first = build_helix_cloud(geometry, params,
                              substream(seed, 0, Stage.CLOUD))
    second = build_helix_cloud(geometry, params,
                               substream(seed, 0, Stage.CLOUD))

    assert np.array_equal(first.points, second.points)


def test_degenerate_geometry() -> None:
    params = HelixParams(n_structures=1, seeds_per_structure=1000,
                         helix_radius_nm=1e6)

    with pytest.raises(DegenerateGeometryError):
        build_helix_cloud(FrameGeometry(8, 8), params,
                          np.random.default_rng(0))
