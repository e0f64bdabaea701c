"""Numerical toolkit for modular soft-rigid hybrid robot fingers.

Covers actuator-length/joint-angle kinematics, workspace manipulability
analysis, hydraulic and pneumatic actuator models, stiffness/compliance
matrix chains, piston-position calibration, and a compliant-motion
simulator.  See the README for the model conventions.
"""

from softfinger._kernels import BACKEND
from softfinger.errors import (
    ConfigError,
    DegenerateFit,
    DegenerateGeometry,
    DimensionMismatch,
    NoConvergence,
    NonMonotonicMap,
    NonPhysicalState,
    NoRealRoot,
    NumericalBlowup,
    OutOfWorkspace,
    SingularConfiguration,
    SingularStiffness,
    SoftFingerError,
)
from softfinger.geometry import FingerGeometry, load_geometry, reference_geometry

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigError",
    "DegenerateFit",
    "DegenerateGeometry",
    "DimensionMismatch",
    "FingerGeometry",
    "NoConvergence",
    "NonMonotonicMap",
    "NonPhysicalState",
    "NoRealRoot",
    "NumericalBlowup",
    "OutOfWorkspace",
    "SingularConfiguration",
    "SingularStiffness",
    "SoftFingerError",
    "__version__",
    "load_geometry",
    "reference_geometry",
]
