"""Actuator-space kinematics of one finger module.

A module has three joints: yaw (th1) and pitch (th2) at the base, both
driven by a pair of antagonistic linear actuators with lengths (l1, l2),
and a distal pitch (th3) driven by a single actuator of length l3.
Angles are radians, lengths millimetres.
"""

import math

import numpy as np

from softfinger import errors
from softfinger._kernels import kernels

DUAL_INVERSE_TOL = 1e-12
DUAL_INVERSE_MAX_ITER = 50
TIP_INVERSE_TOL = 1e-12
TIP_INVERSE_MAX_ITER = 80
# slack on the travel-limit check after an inverse solve, radians
_LIMIT_SLACK = 1e-6


def _pk(geom):
    # kernel argument pack for the paired base actuators
    return (
        geom.r_bend,
        geom.d1,
        geom.d2,
        geom.s_mount,
        geom.spacing,
        geom.a_variant == "yaw",
    )


def _tk(geom):
    # kernel argument pack for the fingertip actuator
    return geom.r_bend, geom.d3, geom.d4


def anchor_offsets(geom, th1: float, th2: float):
    """Offsets (A, H, V) from a fixed anchor to its moving attachment.

    A is the out-of-plane component, H the reach along the deflected link,
    V half the anchor spacing.
    """
    return kernels.dual_offsets(
        geom.r_bend, geom.d1, geom.d2, geom.spacing,
        geom.a_variant == "yaw", th1, th2,
    )


def paired_lengths(geom, th1: float, th2: float):
    """Lengths (l1, l2) of the paired base actuators at (th1, th2)."""
    l1sq, l2sq = kernels.dual_lengths_sq(*_pk(geom), th1, th2)
    if l1sq <= 0.0 or l2sq <= 0.0:
        raise errors.DegenerateGeometry("paired actuator length vanished")
    return math.sqrt(l1sq), math.sqrt(l2sq)


def paired_jacobian(geom, th1: float, th2: float) -> np.ndarray:
    """2x2 Jacobian d(l1, l2)/d(th1, th2), analytic."""
    try:
        _l1, _l2, j11, j12, j21, j22 = kernels.dual_jacobian(*_pk(geom), th1, th2)
    except ValueError as exc:
        raise errors.DegenerateGeometry(str(exc)) from exc
    return np.array([[j11, j12], [j21, j22]])


def paired_angles(
    geom,
    l1: float,
    l2: float,
    guess=(0.0, 0.0),
    tol: float = DUAL_INVERSE_TOL,
    max_iter: int = DUAL_INVERSE_MAX_ITER,
):
    """Joint angles (th1, th2) whose paired lengths equal (l1, l2).

    Damped Newton on the squared-length residual.  Raises OutOfWorkspace
    when the solution lies outside the travel limits, NoConvergence when
    the iteration budget runs out, SingularConfiguration when the solve
    hits a singular Jacobian.
    """
    if not (math.isfinite(l1) and math.isfinite(l2) and l1 > 0.0 and l2 > 0.0):
        raise errors.ConfigError("target actuator lengths must be positive")
    th1, th2, resid, _n, status = kernels.dual_inverse(
        *_pk(geom), l1, l2, guess[0], guess[1], tol, max_iter
    )
    if status == 2:
        raise errors.SingularConfiguration(
            "singular length Jacobian during inverse solve", th1, th2
        )
    if status != 0:
        raise errors.NoConvergence(
            f"inverse solve stalled, squared-length residual {resid:.3e}"
        )
    lim = geom.limit_rad + _LIMIT_SLACK
    if abs(th1) > lim or abs(th2) > lim:
        raise errors.OutOfWorkspace(
            "lengths ({:.6g}, {:.6g}) mm solve to angles outside the travel "
            "limits".format(l1, l2)
        )
    return th1, th2


def tip_length(geom, th3: float) -> float:
    """Length l3 of the fingertip actuator at th3."""
    return kernels.single_length(*_tk(geom), th3)


def tip_slope(geom, th3: float) -> float:
    """dl3/dth3 at th3, analytic."""
    try:
        _l3, dl3 = kernels.single_derivative(*_tk(geom), th3)
    except ValueError as exc:
        raise errors.DegenerateGeometry(str(exc)) from exc
    return dl3


def tip_angle(
    geom,
    l3: float,
    tol: float = TIP_INVERSE_TOL,
    max_iter: int = TIP_INVERSE_MAX_ITER,
) -> float:
    """Joint angle th3 whose fingertip-actuator length equals l3.

    Newton safeguarded by bisection on the (monotone) travel bracket.
    Raises OutOfWorkspace for lengths outside the reachable range.
    """
    if not (math.isfinite(l3) and l3 > 0.0):
        raise errors.ConfigError("target actuator length must be positive")
    lim = geom.limit_rad
    th3, _resid, status = kernels.single_inverse(
        *_tk(geom), l3, -lim, lim, tol, max_iter
    )
    if status == 3:
        raise errors.OutOfWorkspace(
            f"length {l3:.6g} mm is outside the fingertip actuator's range"
        )
    if status != 0:
        raise errors.NoConvergence("fingertip inverse solve stalled")
    return th3


def actuator_jacobian(geom, q) -> np.ndarray:
    """3x3 Jacobian d(l1, l2, l3)/d(th1, th2, th3).

    Block diagonal: the paired actuators do not see th3 and the fingertip
    actuator does not see th1 or th2.
    """
    th1, th2, th3 = q
    jac = np.zeros((3, 3))
    jac[:2, :2] = paired_jacobian(geom, th1, th2)
    jac[2, 2] = tip_slope(geom, th3)
    return jac


def fingertip_position(geom, q) -> np.ndarray:
    """Fingertip position (x, y, z) in the base frame, mm."""
    a1, a2, a3 = geom.link_lengths
    return np.array(kernels.fingertip(a1, a2, a3, q[0], q[1], q[2]))


def fingertip_jacobian(geom, q, step: float = 1e-6) -> np.ndarray:
    """3x3 fingertip Jacobian dp/dq by central differences, mm/rad."""
    a1, a2, a3 = geom.link_lengths
    vals = kernels.task_jacobian_fd(a1, a2, a3, q[0], q[1], q[2], step)
    return np.array(vals).reshape(3, 3)
