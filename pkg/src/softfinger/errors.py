"""Exception hierarchy for the toolkit.

``ConfigError`` covers bad input files / parameters (CLI exit code 2); every
other ``SoftFingerError`` subclass is a numerical failure (CLI exit code 3).
"""


class SoftFingerError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(SoftFingerError):
    """Invalid configuration: bad file, schema violation, bad parameter."""


class DegenerateGeometry(ConfigError):
    """Geometry parameters produce a zero or negative actuator length."""


class NonMonotonicMap(ConfigError):
    """Fingertip-joint actuator length is not monotone over the joint limits.

    Raised during geometry validation, never at solve time.
    """


class NoConvergence(SoftFingerError):
    """Iterative solver exhausted its iteration budget."""


class OutOfWorkspace(SoftFingerError):
    """Requested actuator lengths have no solution inside the joint limits."""


class SingularConfiguration(SoftFingerError):
    """Actuator-to-joint Jacobian determinant below the singularity threshold."""

    def __init__(self, msg, theta1=None, theta2=None):
        super().__init__(msg)
        self.theta1 = theta1
        self.theta2 = theta2


class DegenerateFit(SoftFingerError):
    """Regression input has no variation along the independent axis."""


class NonPhysicalState(SoftFingerError):
    """Model state left its physical domain (e.g. non-positive diameter)."""


class NoRealRoot(SoftFingerError):
    """Displacement outside the range where the chamber model has a solution."""


class SingularStiffness(SoftFingerError):
    """Stiffness/compliance matrix is singular or too ill-conditioned to invert."""


class DimensionMismatch(SoftFingerError):
    """Vector/matrix operands have incompatible shapes."""


class NumericalBlowup(SoftFingerError):
    """Simulation velocities exceeded the configured bound (dt too large).

    Carries the simulation time ``t`` at which the bound was crossed.
    """

    def __init__(self, msg, t=None):
        super().__init__(msg)
        self.t = t
