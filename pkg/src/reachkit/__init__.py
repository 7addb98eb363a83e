"""Reach estimation, tangent stratification and related geometry for finite point sets."""

from .cloud import PointCloud, StratumLabel, neighbors, stratify, tangent_cones, tangent_field
from .cones import ConvexCone, cone_distance, fullness, related, simplex_volume
from .errors import ReachkitError
from .grassmann import Subspace, gap_distance, gj_norm, orthogonal_complement, orthonormalize, projector
from .reach import ReachEstimate, federer_reach, midpoint_reach, projection_uniqueness_reach

__version__ = "0.1.0"

__all__ = [
    "ConvexCone",
    "PointCloud",
    "ReachEstimate",
    "ReachkitError",
    "StratumLabel",
    "Subspace",
    "cone_distance",
    "federer_reach",
    "fullness",
    "gap_distance",
    "gj_norm",
    "midpoint_reach",
    "neighbors",
    "orthogonal_complement",
    "orthonormalize",
    "projection_uniqueness_reach",
    "projector",
    "related",
    "simplex_volume",
    "stratify",
    "tangent_cones",
    "tangent_field",
]
