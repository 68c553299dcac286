"""Point-cloud segmentation error analysis.

Boundary pseudo-label computation over a uniform spatial grid, the four
fine-grained segmentation error metrics (RErr / DErr / FErr / MErr) next to
mIoU / mAcc / oAcc, deterministic synthetic scenes with targeted label
corruption, and forward attention / loss kernels.
"""

import json as _json

from ._segerr import (
    AffineStack,
    Component,
    EvalConfig,
    InternalError,
    IoError,
    LabelField,
    MetricsReport,
    PointCloud,
    SpatialGrid,
    ValidationError,
    affine_apply,
    aggregate,
    binary_boundary_zone,
    boundary_loss,
    brute_force_neighbors,
    build_grid,
    compute_boundary_mask,
    compute_boundary_mask_brute,
    corrupt_labels,
    dice_term,
    evaluate_scene,
    extract_components,
    fused_attention,
    make_config,
    make_random_stack,
    plurality_predicted_label,
    radius_neighbors,
    read_matrix_stack,
    read_report,
    read_scene,
    semantic_loss,
    split_queues,
    write_matrix_stack,
    write_report,
    write_scene,
)
from ._segerr import generate_scene as _generate_scene_json

__all__ = [name for name in dir() if not name.startswith("_")] + ["generate_scene"]


def generate_scene(spec):
    """Generate a synthetic scene from a spec dict or JSON string."""
    if isinstance(spec, dict):
        spec = _json.dumps(spec)
    return _generate_scene_json(spec)
