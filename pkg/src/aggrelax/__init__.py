"""Finite-volume schemes for the relaxed aggregation equation in one dimension."""
from .errors import CFLViolation, ConvergenceFailure, InvalidParameter, SubcharacteristicViolation
from .mesh import (
    ZERO_INFLOW,
    AtomicMeasure,
    GhostData,
    Grid,
    State,
    deposit,
    from_diagonal,
    to_diagonal,
    total_mass,
)
from .potentials import Potential, newtonian, quadratic

__version__ = "0.1.0"
