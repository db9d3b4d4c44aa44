"""Reconstruction of convex constant-curvature Lorentzian tetrahedra.

Four closing SO+(1,2) face holonomies (or SL(2,R) spin lifts) determine a
unique strictly convex tetrahedron in dS3 or AdS3; the converse map computes
the based face holonomies of an embedded tetrahedron.  Exact rational and
floating backends, a FastAPI service (holotet.service:app), and a CLI
(`holotet`) wrap the core pipeline.
"""

from .backend import Tolerances
from .errors import HolotetError
from .forward import Tetrahedron, face_holonomies, roundtrip, signed_area, transport
from .lorentz import GramData, Inertia, inertia_of, principal_minors, sylvester_factor
from .reconstruct import (
    ReconstructionReport,
    reconstruct,
    reconstructed_gram,
    select_branch,
    spin_reconstruct,
    triple_products,
    vertices_from_normals,
)
from .sectors import SectorReport, classify_sector, dual_vertex_type
from .sl2r import SpinHolonomy, connected_trace2, connected_trace3, lift, project, spin_exp
from .so12 import NormalData, VectorHolonomy, check_so12, exp_axis, exp_parabolic, fixed_line

__version__ = "0.1.0"

__all__ = [
    "Tolerances", "HolotetError", "Tetrahedron", "face_holonomies", "roundtrip",
    "signed_area", "transport", "GramData", "Inertia", "inertia_of",
    "principal_minors", "sylvester_factor", "ReconstructionReport", "reconstruct",
    "reconstructed_gram", "select_branch", "spin_reconstruct", "triple_products",
    "vertices_from_normals", "SectorReport", "classify_sector", "dual_vertex_type",
    "SpinHolonomy", "connected_trace2", "connected_trace3", "lift", "project",
    "spin_exp", "NormalData", "VectorHolonomy", "check_so12", "exp_axis",
    "exp_parabolic", "fixed_line", "__version__",
]
