"""Indices of symmetric periodic orbits on linear symplectic R^2n.

Computes the Hörmander index of a symmetric return map and its iterates via
a Chebyshev closed formula, and verifies it against two independent
first-principles oracles: a Duistermaat quadratic-form construction and a
crossing-form Maslov index engine for pairs of Lagrangian paths.  A small
pipeline produces real return maps from Hamiltonian systems that carry an
antisymplectic involution.
"""

__version__ = "0.1.0"

from .halfint import HalfInteger
from .linalg import Inertia, inertia, is_symplectic, signature, symplectic_inverse
from .returnmap import (
    NondegeneracyReport,
    ReturnMapBlocks,
    nondegeneracy_check,
    random_return_map,
    rotation_blocks,
    validate_blocks,
)
from .chebyshev import ChebKind, cheb_matrix, cheb_scalar, cheb_trig_reference, iterate_blocks
from .hormander import (
    IndexMethod,
    IndexResult,
    closed_form_v,
    hormander_index_formula,
    hormander_index_quadratic_form,
    hormander_sign_matrix,
)
from .maslov import (
    CrossingRecord,
    LagrangianFrame,
    LagrangianPath,
    SymplecticPath,
    conley_zehnder,
    generate_symplectic_path,
    graph_frame,
    hormander_via_paths,
    lagrangian_maslov,
    maslov_index,
)
from .orbits import (
    SymmetricOrbit,
    TransverseSection,
    build_transverse_section,
    find_symmetric_orbit,
    integrate_with_variations,
    reduced_monodromy,
)
from .systems import HamiltonianSystem, henon_heiles_system, oscillator_system
from .verify import run_verification

__all__ = [
    "HalfInteger",
    "Inertia",
    "inertia",
    "signature",
    "is_symplectic",
    "symplectic_inverse",
    "ReturnMapBlocks",
    "NondegeneracyReport",
    "validate_blocks",
    "random_return_map",
    "nondegeneracy_check",
    "rotation_blocks",
    "ChebKind",
    "cheb_scalar",
    "cheb_matrix",
    "cheb_trig_reference",
    "iterate_blocks",
    "IndexMethod",
    "IndexResult",
    "hormander_sign_matrix",
    "hormander_index_formula",
    "hormander_index_quadratic_form",
    "closed_form_v",
    "CrossingRecord",
    "LagrangianFrame",
    "LagrangianPath",
    "SymplecticPath",
    "graph_frame",
    "maslov_index",
    "conley_zehnder",
    "lagrangian_maslov",
    "generate_symplectic_path",
    "hormander_via_paths",
    "SymmetricOrbit",
    "TransverseSection",
    "integrate_with_variations",
    "find_symmetric_orbit",
    "build_transverse_section",
    "reduced_monodromy",
    "HamiltonianSystem",
    "oscillator_system",
    "henon_heiles_system",
    "run_verification",
    "__version__",
]
