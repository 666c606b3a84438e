"""Symmetric wedge-wave asymptotics of a nearly flat elastic wedge.

The package computes, cross-validates, and independently verifies the chain
from the Rayleigh surface-wave baseline to the trapped wedge mode: material
constants and the certified Rayleigh speed, the exact exponential-sum calculus
of the Rayleigh profile, the operator-pencil coefficient b, the matching
constant cv_plus, the eigenvalue correction lambda1 and the dimensionless
speed deficit theta, and a finite-element eigensolver confirming an eigenvalue
below the cutoff with gap ~ eps^2 * lambda1.
"""

from .asymptotics import (
    AsymptoticCoefficients,
    compute_coefficients,
    compute_cu_plus,
    compute_cv_plus,
    compute_cv_plus_closed,
    compute_lambda1,
    compute_theta,
    predicted_decay_rate,
    wedge_speed_sq,
)
from .errors import (
    AboveCutoff,
    AssemblyFailure,
    ConstraintViolation,
    DegenerateDenominator,
    GridTooCoarse,
    MeshGenFailure,
    NoConvergence,
    NotIntegrable,
    NotTrapped,
    RootBracketFailure,
    TruncationSuspect,
    WedgeWaveError,
)
from .expsum import ExpSum, integrate_halfline, integrate_halfline_quadrature
from .fem import (
    AssembledSystem,
    SweepReport,
    WedgeEigenResult,
    assemble,
    default_mesh_spec,
    find_wedge_mode,
    localization_metric,
    solve_smallest,
    sweep_epsilon,
)
from .material import (
    IsotropicMaterial,
    RayleighSolution,
    check_rayleigh_identity,
    from_poisson,
    make_material,
    rayleigh_function,
    solve_rayleigh,
)
from .mesh import TriangleMesh, WedgeMeshSpec, build_mesh, load_mesh, save_mesh
from .mode import ModeField, build_uR, build_vR, norm_U0_sq, stress
from .pencil import (
    HalfLineGrid,
    PencilOperator,
    StripScanReport,
    assemble_pencil,
    compute_b_closed,
    compute_b_quadrature,
    default_xi_samples,
    form_lower_bound,
    min_singular_scan,
    residual_eigenpair,
    residual_jordan,
)

__version__ = "0.1.0"
