from .base import (cameras,
                   densities,
                   depths,
                   frames_ids,
                   geometries,
                   geometries_with_positions,
                   helices,
                   interior_emitters,
                   match_frames_pairs,
                   match_positions,
                   match_positions_pairs,
                   nn_frames,
                   photon_models,
                   photons_counts,
                   psfs,
                   reorder_permutations,
                   seeds,
                   translations,
                   unit_emitters)
