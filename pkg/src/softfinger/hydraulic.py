"""Hydraulic chamber mechanics and the stiffness/compliance matrix chain.

A closed elastomer chamber (conical frustum, thin wall) holds a fixed
liquid volume.  Stretching it axially by delta_y forces the wall
diameters to change, which a thin-wall pressure balance ties to an
internal pressure P and hence a restoring force.  The same chamber
compliance, folded through the actuator Jacobian, yields joint-space and
task-space stiffness matrices.

Units: MPa (= N/mm^2) for pressure and modulus, mm for lengths, so
pressure times area is newtons with no conversion factors.
"""

import dataclasses
import json
import math
import warnings

import numpy as np

from softfinger import errors, kinematics

# condition number above which a stiffness matrix counts as singular
COND_LIMIT = 1e12


@dataclasses.dataclass(frozen=True)
class HydraulicChamber:
    """Frustum chamber at rest: modulus E (MPa), wall t, inner minor/major
    diameters d0 <= D0, height h0 (mm)."""

    E: float = 2.0
    t: float = 1.5
    d0: float = 8.0
    D0: float = 12.0
    h0: float = 20.0

    def __post_init__(self):
        for name in ("E", "t", "h0"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0.0):
                raise errors.ConfigError(f"chamber {name} must be finite and > 0")
        if not (
            isinstance(self.d0, (int, float))
            and isinstance(self.D0, (int, float))
            and math.isfinite(self.d0)
            and math.isfinite(self.D0)
            and 0.0 < self.d0 <= self.D0
        ):
            raise errors.ConfigError("chamber diameters must satisfy 0 < d0 <= D0")
        if self.t > self.d0 / 5.0:
            warnings.warn(
                "wall thickness t exceeds d0/5; thin-wall assumptions are "
                "questionable for this chamber",
                stacklevel=2,
            )

    @property
    def V0(self) -> float:
        """Enclosed volume at rest, mm^3."""
        return frustum_volume(self.h0, self.D0, self.d0)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def chamber_from_dict(raw: dict) -> HydraulicChamber:
    if not isinstance(raw, dict):
        raise errors.ConfigError("chamber config must be a JSON object")
    known = {f.name for f in dataclasses.fields(HydraulicChamber)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise errors.ConfigError(f"unknown chamber keys: {', '.join(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise errors.ConfigError(f"chamber {key} must be a number")
        kwargs[key] = float(value)
    return HydraulicChamber(**kwargs)


def load_chamber(path) -> HydraulicChamber:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise errors.ConfigError(f"cannot read chamber file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise errors.ConfigError(f"chamber file is not valid JSON: {exc}") from exc
    return chamber_from_dict(raw)


def frustum_volume(h: float, Dmaj: float, dmin: float) -> float:
    """Volume of a conical frustum of height h and end diameters Dmaj, dmin."""
    return (math.pi * h / 3.0) * (
        (Dmaj / 2.0) * (Dmaj / 2.0)
        + (dmin / 2.0) * (dmin / 2.0)
        + Dmaj * dmin / 4.0
    )


def hoop_stress(P: float, r: float, t: float) -> float:
    """Thin-wall hoop stress P*r/t."""
    if t <= 0.0:
        raise errors.ConfigError("wall thickness must be > 0")
    return P * r / t


def deformed_diameters(P: float, chamber: HydraulicChamber):
    """Inner diameters (Dmaj, dmin) under internal pressure P.

    Linear-elastic thin-wall stretch: each diameter grows by
    (2P/(E t)) * (diameter/2)^2.  Raises NonPhysicalState when a diameter
    is pressed to zero or below.
    """
    scale = 2.0 * P / (chamber.E * chamber.t)
    dmin = chamber.d0 + scale * (chamber.d0 / 2.0) * (chamber.d0 / 2.0)
    Dmaj = chamber.D0 + scale * (chamber.D0 / 2.0) * (chamber.D0 / 2.0)
    if dmin <= 0.0 or Dmaj <= 0.0:
        raise errors.NonPhysicalState(
            f"pressure {P:.6g} MPa collapses a chamber diameter"
        )
    return Dmaj, dmin


def solve_hydraulic_force(chamber: HydraulicChamber, delta_y: float):
    """Restoring force and pressure for an axial stretch of delta_y mm.

    Volume conservation with pressure-dependent diameters reduces to a
    quadratic a*P^2 + b*P + c = 0; the root continuous with P = 0 at
    delta_y = 0 (the minimal-|P| root) is physical.  Returns (F_h, P)
    with F_h = -(pi d0^2 / 4) * P.

    Raises NoRealRoot when delta_y is outside the model's validity and
    NonPhysicalState when the root collapses a diameter.
    """
    h = chamber.h0 + delta_y
    if not (math.isfinite(h) and h > 0.0):
        raise errors.ConfigError("stretched height h0 + delta_y must be > 0")
    et2 = 2.0 * chamber.E * chamber.t
    c_d = chamber.d0 * chamber.d0 / et2
    c_D = chamber.D0 * chamber.D0 / et2
    a = c_D * c_D + c_d * c_d + c_D * c_d
    b = (
        2.0 * chamber.D0 * c_D
        + 2.0 * chamber.d0 * c_d
        + chamber.D0 * c_d
        + chamber.d0 * c_D
    )
    sum0 = (
        chamber.D0 * chamber.D0
        + chamber.d0 * chamber.d0
        + chamber.D0 * chamber.d0
    )
    c = sum0 * (1.0 - chamber.h0 / h)
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise errors.NoRealRoot(
            f"no real pressure solves the volume constraint at "
            f"delta_y = {delta_y:.6g} mm"
        )
    # cancellation-safe root pair: large root from the sign-matched
    # formula, small root from the product identity
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    if q == 0.0:
        # b = 0 and disc = 0: double root at the origin
        P = 0.0
    else:
        small = c / q
        large = q / a
        P = small if abs(small) <= abs(large) else large
    deformed_diameters(P, chamber)
    F_h = -(math.pi * chamber.d0 * chamber.d0 / 4.0) * P
    return F_h, P


def propose_hydraulic_compliance(chamber: HydraulicChamber, probe_mm: float = 0.05) -> float:
    """Estimate chamber compliance C_h = d(delta_y)/dF at rest, mm/N.

    Central difference of the force law; user-supplied values take
    precedence over this proposal.
    """
    if not (0.0 < probe_mm < chamber.h0):
        raise errors.ConfigError("probe_mm must be in (0, h0)")
    f_plus, _ = solve_hydraulic_force(chamber, probe_mm)
    f_minus, _ = solve_hydraulic_force(chamber, -probe_mm)
    df = (f_plus - f_minus) / (2.0 * probe_mm)
    if df == 0.0:
        raise errors.NonPhysicalState("force law has zero slope at rest")
    return 1.0 / df


@dataclasses.dataclass(frozen=True)
class ComplianceParams:
    """Actuator compliance: C_h (mm/N), effective area A_eff (mm^2)."""

    C_h: float
    A_eff: float

    def __post_init__(self):
        for name in ("C_h", "A_eff"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0.0):
                raise errors.ConfigError(f"{name} must be finite and > 0")

    @property
    def C_l(self) -> float:
        """Effective linear compliance C_h / A_eff (length per pressure)."""
        return self.C_h / self.A_eff


def effective_linear_compliance(params: ComplianceParams) -> float:
    return params.C_l


def _gram(J: np.ndarray) -> np.ndarray:
    # column Gram matrix built entrywise so it is symmetric to the bit
    m = J.shape[1]
    g = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            v = float(J[:, i] @ J[:, j])
            g[i, j] = v
            g[j, i] = v
    return g


def joint_stiffness(J, C_l: float) -> np.ndarray:
    """Joint-space stiffness K_q = (1/C_l) J^T J; symmetric PSD."""
    if not (math.isfinite(C_l) and C_l > 0.0):
        raise errors.ConfigError("C_l must be finite and > 0")
    jm = np.asarray(J, dtype=float)
    if jm.ndim != 2:
        raise errors.DimensionMismatch("actuator Jacobian must be a matrix")
    return _gram(jm) / C_l


def joint_compliance(K_q) -> np.ndarray:
    """C_q = K_q^-1, symmetrized; SingularStiffness above the condition cap."""
    kq = np.asarray(K_q, dtype=float)
    if kq.ndim != 2 or kq.shape[0] != kq.shape[1]:
        raise errors.DimensionMismatch("K_q must be square")
    cond = np.linalg.cond(kq)
    if not np.isfinite(cond) or cond >= COND_LIMIT:
        raise errors.SingularStiffness(
            f"K_q condition number {cond:.3e} exceeds {COND_LIMIT:.0e}"
        )
    cq = np.linalg.inv(kq)
    return 0.5 * (cq + cq.T)


def torque_deviation(J, C_l: float, delta_q) -> np.ndarray:
    """Joint torque change for a joint deflection: K_q @ delta_q."""
    dq = np.asarray(delta_q, dtype=float)
    kq = joint_stiffness(J, C_l)
    if dq.shape != (kq.shape[0],):
        raise errors.DimensionMismatch("delta_q length must match K_q")
    return kq @ dq


@dataclasses.dataclass(frozen=True)
class TaskSpace:
    """Task-space stiffness/compliance pair.

    k_a_is_pseudoinverse marks a singular C_a whose K_a had to fall back
    to the Moore-Penrose pseudo-inverse.
    """

    K_a: np.ndarray
    C_a: np.ndarray
    k_a_is_pseudoinverse: bool


def task_space_transform(K_q, C_q, J_a) -> TaskSpace:
    """Map joint-space compliance through the task Jacobian J_a.

    C_a = J_a C_q J_a^T (congruence); K_a = C_a^-1 where that exists,
    else the pseudo-inverse with the flag set.  For square invertible
    J_a this satisfies J_a^-1 C_a J_a^-T = C_q.
    """
    cq = np.asarray(C_q, dtype=float)
    ja = np.asarray(J_a, dtype=float)
    if cq.ndim != 2 or cq.shape[0] != cq.shape[1]:
        raise errors.DimensionMismatch("C_q must be square")
    if ja.ndim != 2 or ja.shape[1] != cq.shape[0]:
        raise errors.DimensionMismatch("J_a columns must match C_q")
    x = ja @ cq @ ja.T
    ca = 0.5 * (x + x.T)
    cond = np.linalg.cond(ca)
    if np.isfinite(cond) and cond < COND_LIMIT:
        ka = np.linalg.inv(ca)
        ka = 0.5 * (ka + ka.T)
        pseudo = False
    else:
        ka = np.linalg.pinv(ca, hermitian=True)
        ka = 0.5 * (ka + ka.T)
        pseudo = True
    return TaskSpace(K_a=ka, C_a=ca, k_a_is_pseudoinverse=pseudo)


@dataclasses.dataclass(frozen=True)
class StiffnessSet:
    """Full chain at one configuration: actuator Jacobian J, joint-space
    K_q/C_q, task Jacobian J_a, task-space K_a/C_a."""

    J: np.ndarray
    K_q: np.ndarray
    C_q: np.ndarray
    J_a: np.ndarray
    K_a: np.ndarray
    C_a: np.ndarray
    k_a_is_pseudoinverse: bool


def stiffness_chain(geom, q, params: ComplianceParams, jac_step: float = 1e-6) -> StiffnessSet:
    """Evaluate the whole chain J -> K_q -> C_q -> (K_a, C_a) at q."""
    jac = kinematics.actuator_jacobian(geom, q)
    kq = joint_stiffness(jac, params.C_l)
    cq = joint_compliance(kq)
    ja = kinematics.fingertip_jacobian(geom, q, step=jac_step)
    task = task_space_transform(kq, cq, ja)
    return StiffnessSet(
        J=jac,
        K_q=kq,
        C_q=cq,
        J_a=ja,
        K_a=task.K_a,
        C_a=task.C_a,
        k_a_is_pseudoinverse=task.k_a_is_pseudoinverse,
    )
