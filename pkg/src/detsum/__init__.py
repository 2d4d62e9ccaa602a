"""Inverse determinant sums, unit growth and DMT checks for algebraic space-time lattice codes."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DependentBasis,
    DetsumError,
    InsufficientRange,
    NvdViolation,
    OutOfRegime,
    RadiusTooLarge,
    ZeroDeterminantEncountered,
)
from .lattice import MatrixLattice, build_lattice, flatten, point_from_coeffs  # noqa: E402
from .constructions import BuiltinCode, builtin, nvd_check  # noqa: E402
from .enumeration import enumerate_ball, norm_power_sum, shell_counts  # noqa: E402
from .sums import dedekind_zeta_qi_truncated, inverse_det_sum, unit_count, unit_orbit_count  # noqa: E402
from .asymptotics import (  # noqa: E402
    code_dmt_segment,
    dmt_sum_lower_exponent,
    fit_growth,
    optimal_dmt,
    predicted_exponent,
    union_bound_eval,
)
from .lie_volume import build_root_data, unit_growth_prediction, volume_exponent  # noqa: E402

__all__ = [
    "BuiltinCode",
    "DependentBasis",
    "DetsumError",
    "InsufficientRange",
    "MatrixLattice",
    "NvdViolation",
    "OutOfRegime",
    "RadiusTooLarge",
    "ZeroDeterminantEncountered",
    "build_lattice",
    "build_root_data",
    "builtin",
    "code_dmt_segment",
    "dedekind_zeta_qi_truncated",
    "dmt_sum_lower_exponent",
    "enumerate_ball",
    "fit_growth",
    "flatten",
    "inverse_det_sum",
    "norm_power_sum",
    "nvd_check",
    "optimal_dmt",
    "point_from_coeffs",
    "predicted_exponent",
    "shell_counts",
    "union_bound_eval",
    "unit_count",
    "unit_growth_prediction",
    "unit_orbit_count",
    "volume_exponent",
]
