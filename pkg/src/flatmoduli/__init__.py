"""Flat connections on compact surfaces, made executable.

Concrete groups U(n), SU(n) and SO(3); root systems and Weyl elements without
fixed vectors; numerical solutions of surface-group relations; the
component labels of the solution spaces; explicit certified paths.
"""

from .errors import FlatModuliError
from .homotopy import GroupPath, certify_path, deform_to_semisimple, path_even, path_odd
from .lie_core import (
    AlgebraElement,
    GroupElement,
    GroupSpec,
    group_exp,
    group_log,
    haar_sample,
    project_pi,
    split_central,
)
from .rootsys import (
    RootSystem,
    WeylElement,
    build_root_system,
    build_weyl_element,
    solve_translation,
    torus_representative,
    verify_no_unit_eigenvalue,
)
from .solver import SolverConfig, SolverReport, commutator_preimage, solve_relation
from .surface import (
    SurfaceSig,
    TuplePoint,
    commutator_mu,
    relation_differential,
    relation_residual,
    relation_value,
)
from .topology import (
    FiniteAbelianGroup,
    ObstructionClass,
    count_components,
    lift_obstruction,
    obstruction,
    obstruction_is_locally_constant_check,
    quotient_by_squares,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement", "FiniteAbelianGroup", "FlatModuliError", "GroupElement", "GroupPath",
    "GroupSpec", "ObstructionClass", "RootSystem", "SolverConfig", "SolverReport", "SurfaceSig",
    "TuplePoint", "WeylElement", "build_root_system", "build_weyl_element", "certify_path",
    "commutator_mu", "commutator_preimage", "count_components", "deform_to_semisimple",
    "group_exp", "group_log", "haar_sample", "lift_obstruction", "obstruction",
    "obstruction_is_locally_constant_check", "path_even", "path_odd", "project_pi",
    "quotient_by_squares", "relation_differential", "relation_residual", "relation_value",
    "solve_relation", "solve_translation", "split_central", "torus_representative",
    "verify_no_unit_eigenvalue",
]
