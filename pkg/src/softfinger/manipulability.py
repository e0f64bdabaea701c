"""Workspace manipulability maps and actuator-motion curves.

Manipulability here is the 2x2 actuator-to-joint determinant measure of
the paired base actuators: M = |det d(th)/d(l)| = 1 / |det d(l)/d(th)|.
High M means little actuator motion produces much joint motion.
"""

import dataclasses
import enum
import math

import numpy as np

from softfinger import calibration, csvio, errors, kinematics
from softfinger._kernels import kernels

# |det dl/dth| below this (mm^2/rad^2) counts as singular
SINGULAR_DET = 1e-12

GRID_CSV_HEADER = ("theta1_deg", "theta2_deg", "m_norm")
TRACE_CSV_HEADER = ("free_angle_deg", "l1_mm", "l2_mm", "nam_mm")


class FixedJoint(enum.Enum):
    THETA1 = "theta1"
    THETA2 = "theta2"


@dataclasses.dataclass(frozen=True)
class WorkspaceGrid:
    """Manipulability sampled on a joint-angle box.

    theta1/theta2 are strictly increasing sample vectors (radians);
    values[i, j] is the measure at (theta1[i], theta2[j]).
    """

    theta1: np.ndarray
    theta2: np.ndarray
    values: np.ndarray
    normalized: bool

    def rows(self):
        """Long-format (theta1_deg, theta2_deg, value) row iterator."""
        for i, t1 in enumerate(self.theta1):
            for j, t2 in enumerate(self.theta2):
                yield math.degrees(t1), math.degrees(t2), self.values[i, j]


@dataclasses.dataclass(frozen=True)
class ContourTrace:
    """Actuator-space curve swept by one free joint at a fixed other joint.

    nam is the normalized actuator motion: Euclidean distance in (l1, l2)
    space from the first sample of the sweep.
    """

    fixed_joint: FixedJoint
    fixed_value: float
    free_angle: np.ndarray
    l1: np.ndarray
    l2: np.ndarray
    nam: np.ndarray

    @property
    def motion(self) -> np.ndarray:
        return self.nam


@dataclasses.dataclass(frozen=True)
class TipCurve:
    """Fingertip joint angle against its actuator length over the limits."""

    free_angle: np.ndarray
    l3: np.ndarray

    @property
    def motion(self) -> np.ndarray:
        """Length change from the first sample, mm."""
        return self.l3 - self.l3[0]


def _absdet(geom, th1: float, th2: float) -> float:
    try:
        _l1, _l2, j11, j12, j21, j22 = kernels.dual_jacobian(
            *kinematics._pk(geom), th1, th2
        )
    except ValueError as exc:
        raise errors.DegenerateGeometry(str(exc)) from exc
    return abs(j11 * j22 - j12 * j21)


def manipulability(geom, th1: float, th2: float) -> float:
    """M = 1/|det d(l1,l2)/d(th1,th2)| at one configuration."""
    d = _absdet(geom, th1, th2)
    if d < SINGULAR_DET:
        raise errors.SingularConfiguration(
            f"|det| = {d:.3e} mm^2/rad^2 below the singularity threshold",
            th1, th2,
        )
    return 1.0 / d


def normalized_manipulability(geom, th1: float, th2: float) -> float:
    """M(th1, th2) / M(0, 0); invariant under uniform geometry scaling."""
    d0 = _absdet(geom, 0.0, 0.0)
    d = _absdet(geom, th1, th2)
    if d0 < SINGULAR_DET:
        raise errors.SingularConfiguration(
            "singular at the normalization point (0, 0)", 0.0, 0.0
        )
    if d < SINGULAR_DET:
        raise errors.SingularConfiguration(
            f"|det| = {d:.3e} mm^2/rad^2 below the singularity threshold",
            th1, th2,
        )
    return d0 / d


def _box_samples(lim: float, n: int) -> np.ndarray:
    # integer-centred so an odd n hits 0.0 exactly and the ends hit +/-lim
    den = n - 1
    return np.array([lim * ((2 * i - den) / den) for i in range(n)])


def sweep_workspace(geom, n1: int = 41, n2: int = 41, normalized: bool = True) -> WorkspaceGrid:
    """Sample the manipulability measure on an n1 x n2 joint-limit box."""
    if n1 < 2 or n2 < 2:
        raise errors.ConfigError("grid needs at least 2 samples per axis")
    lim = geom.limit_rad
    th1s = _box_samples(lim, n1)
    th2s = _box_samples(lim, n2)
    dets = np.empty((n1, n2))
    kernels.det_grid(
        *kinematics._pk(geom),
        np.ascontiguousarray(th1s),
        np.ascontiguousarray(th2s),
        dets,
    )
    bad = np.argwhere(dets < SINGULAR_DET)
    if bad.size:
        i, j = bad[0]
        raise errors.SingularConfiguration(
            "singular cell inside the travel box",
            float(th1s[i]), float(th2s[j]),
        )
    if normalized:
        values = _absdet(geom, 0.0, 0.0) / dets
    else:
        values = 1.0 / dets
    return WorkspaceGrid(theta1=th1s, theta2=th2s, values=values, normalized=normalized)


def contour_fixed(geom, fixed_joint: FixedJoint, fixed_value: float, n: int = 81) -> ContourTrace:
    """Sweep the free base joint over its limits at one fixed joint value."""
    if n < 2:
        raise errors.ConfigError("trace needs at least 2 samples")
    fixed_joint = FixedJoint(fixed_joint)
    lim = geom.limit_rad
    if not (math.isfinite(fixed_value) and abs(fixed_value) <= lim):
        raise errors.ConfigError("fixed joint value must lie inside the travel limits")
    free = _box_samples(lim, n)
    l1 = np.empty(n)
    l2 = np.empty(n)
    for i, a in enumerate(free):
        if fixed_joint is FixedJoint.THETA1:
            pair = kinematics.paired_lengths(geom, fixed_value, float(a))
        else:
            pair = kinematics.paired_lengths(geom, float(a), fixed_value)
        l1[i], l2[i] = pair
    d1 = l1 - l1[0]
    d2 = l2 - l2[0]
    nam = np.sqrt(d1 * d1 + d2 * d2)
    return ContourTrace(
        fixed_joint=fixed_joint,
        fixed_value=fixed_value,
        free_angle=free,
        l1=l1,
        l2=l2,
        nam=nam,
    )


def single_joint_curve(geom, n: int = 81) -> TipCurve:
    """Sweep the distal joint over its limits, recording l3."""
    if n < 2:
        raise errors.ConfigError("curve needs at least 2 samples")
    free = _box_samples(geom.limit_rad, n)
    l3 = np.array([kinematics.tip_length(geom, float(a)) for a in free])
    return TipCurve(free_angle=free, l3=l3)


def slope_estimate(trace):
    """Least-squares slope (degrees/mm) and r^2 of joint angle vs motion.

    Accepts a ContourTrace or TipCurve.  Raises DegenerateFit when the
    motion values carry no variation.
    """
    motion = np.asarray(trace.motion, dtype=float)
    if motion.size < 3:
        raise errors.ConfigError("slope estimate needs at least 3 samples")
    angles_deg = np.degrees(np.asarray(trace.free_angle, dtype=float))
    fit = calibration.fit_affine(motion, angles_deg)
    return fit.k, fit.r2


def write_grid_csv(grid: WorkspaceGrid, path) -> None:
    csvio.write_rows(path, GRID_CSV_HEADER, grid.rows())


def write_trace_csv(trace: ContourTrace, path) -> None:
    rows = zip(np.degrees(trace.free_angle), trace.l1, trace.l2, trace.nam)
    csvio.write_rows(path, TRACE_CSV_HEADER, rows)
