"""Schrodinger bridge toolkit.

Thin Python layer over the C++ core: reference kernels, the boundary-data
system, bridge propagation, diffusion sampling, Hopf-Cole maps and the
closed-form gallery suites.
"""

import json as _json

from . import _core
from ._core import (
    BoundaryLeakError,
    ConfigError,
    Error,
    Grid1D,
    IncompatibilityError,
    Kernel,
    MissingFileError,
    NonConvergenceError,
    NormalizationError,
    NumericDomainError,
    OrderingError,
    PositivityError,
    PropagationConsistencyError,
    TimeGrid,
    ValidationError,
    burgers_residual,
    check_chapman_kolmogorov,
    extract_forward_drift,
    hopf_cole_forward,
    hopf_cole_inverse,
    kernel_tags,
    propagate_backward,
    propagate_forward,
    short_time_moments,
    simulate,
    solve_boundary_system,
    solve_bridge,
)

gallery = _core.gallery


def run_config(text, out_dir):
    """Run a ``key = value`` configuration and return the parsed report."""
    return _json.loads(_core.run_config(text, str(out_dir)))


__all__ = [name for name in dir() if not name.startswith("_")]
