"""Compliant-motion simulation of one finger.

Each joint is driven toward a commanded angle through a linear torsional
spring (the compliance of the soft actuators), so the finger deviates
under load instead of tracking rigidly.  Dynamics are deliberately
simple: diagonal joint inertia with link point masses for gravity, so
velocity-product terms vanish and the model stays transparent.  The
integrator is semi-implicit Euler, which keeps the spring energy bounded.

Scenario scripts are piecewise phases: the command ramps linearly to the
phase target while a constant external fingertip force acts.
"""

import dataclasses
import json
import math

import numpy as np

from softfinger import csvio, errors, kinematics
from softfinger._kernels import kernels

TRAJECTORY_CSV_HEADER = (
    "t_s",
    "theta1_deg", "theta2_deg", "theta3_deg",
    "cmd1_deg", "cmd2_deg", "cmd3_deg",
)

# N*mm*s^2 per kg*mm^2
_INERTIA_SCALE = 1e-3


def _vec3(value, name):
    try:
        out = tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise errors.ConfigError(f"{name} must be a 3-vector of numbers") from exc
    if len(out) != 3 or not all(math.isfinite(v) for v in out):
        raise errors.ConfigError(f"{name} must be a 3-vector of finite numbers")
    return out


@dataclasses.dataclass(frozen=True)
class SimParams:
    """Simulation constants.

    inertia       per-joint rotary inertia, kg*mm^2
    k_joint       per-joint drive stiffness, N*mm/rad
    damping       per-joint viscous coefficient, N*mm*s/rad; None picks
                  critical-ish damping (zeta = 0.7) from k and inertia
    gravity       gravity vector in the base frame, mm/s^2
    link_masses   point mass at each link's distal end, kg
    dt            integrator step, s
    speed_limit   |joint speed| bound; exceeding it raises NumericalBlowup
    record_stride record every n-th step
    jac_step      finite-difference step for the fingertip Jacobian, rad
    """

    inertia: tuple = (5.0, 4.0, 3.0)
    k_joint: tuple = (50.0, 50.0, 50.0)
    damping: tuple = None
    gravity: tuple = (0.0, 0.0, -9810.0)
    link_masses: tuple = (0.008, 0.006, 0.004)
    dt: float = 1e-3
    speed_limit: float = 1e3
    record_stride: int = 1
    jac_step: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "inertia", _vec3(self.inertia, "inertia"))
        object.__setattr__(self, "k_joint", _vec3(self.k_joint, "k_joint"))
        object.__setattr__(self, "gravity", _vec3(self.gravity, "gravity"))
        object.__setattr__(self, "link_masses", _vec3(self.link_masses, "link_masses"))
        if self.damping is not None:
            object.__setattr__(self, "damping", _vec3(self.damping, "damping"))
            if any(v < 0.0 for v in self.damping):
                raise errors.ConfigError("damping must be >= 0")
        if any(v <= 0.0 for v in self.inertia):
            raise errors.ConfigError("inertia must be > 0")
        if any(v < 0.0 for v in self.k_joint):
            raise errors.ConfigError("k_joint must be >= 0")
        if any(v < 0.0 for v in self.link_masses):
            raise errors.ConfigError("link_masses must be >= 0")
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise errors.ConfigError("dt must be finite and > 0")
        if not (math.isfinite(self.speed_limit) and self.speed_limit > 0.0):
            raise errors.ConfigError("speed_limit must be > 0")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise errors.ConfigError("record_stride must be an integer >= 1")
        if not (math.isfinite(self.jac_step) and self.jac_step > 0.0):
            raise errors.ConfigError("jac_step must be finite and > 0")

    def inertia_nmm(self) -> tuple:
        """Inertia in torque-consistent units, N*mm*s^2/rad."""
        return tuple(v * _INERTIA_SCALE for v in self.inertia)

    def effective_damping(self) -> tuple:
        """Explicit damping, or zeta = 0.7 derived from k and inertia."""
        if self.damping is not None:
            return self.damping
        return tuple(
            2.0 * 0.7 * math.sqrt(k * i)
            for k, i in zip(self.k_joint, self.inertia_nmm())
        )


@dataclasses.dataclass(frozen=True)
class SimState:
    """Instantaneous state: time, angles, speeds, commanded angles."""

    t: float
    theta: np.ndarray
    theta_dot: np.ndarray
    theta_cmd: np.ndarray


def elastic_torque(k_joint, theta_cmd, theta) -> np.ndarray:
    """Drive torque -k*(theta - theta_cmd), componentwise."""
    k = np.asarray(k_joint, dtype=float)
    cmd = np.asarray(theta_cmd, dtype=float)
    th = np.asarray(theta, dtype=float)
    if not (k.shape == cmd.shape == th.shape):
        raise errors.DimensionMismatch("k, theta_cmd, theta must share a shape")
    return -k * (th - cmd)


def quasistatic_deflection(K_q, J_a, f_ext) -> np.ndarray:
    """Static joint deflection K_q^-1 J_a^T f under a task-space force."""
    kq = np.asarray(K_q, dtype=float)
    ja = np.asarray(J_a, dtype=float)
    f = np.asarray(f_ext, dtype=float)
    if kq.ndim != 2 or kq.shape[0] != kq.shape[1]:
        raise errors.DimensionMismatch("K_q must be square")
    if ja.ndim != 2 or ja.shape[1] != kq.shape[0]:
        raise errors.DimensionMismatch("J_a columns must match K_q")
    if f.shape != (ja.shape[0],):
        raise errors.DimensionMismatch("force length must match J_a rows")
    cond = np.linalg.cond(kq)
    if not np.isfinite(cond) or cond >= 1e12:
        raise errors.SingularStiffness(
            f"K_q condition number {cond:.3e} is too large"
        )
    return np.linalg.solve(kq, ja.T @ f)


def gravity_torques(geom, params: SimParams, q) -> np.ndarray:
    """Generalized gravity torque on each joint at q, N*mm."""
    a1, a2, a3 = geom.link_lengths
    return np.array(
        kernels.gravity_rhs(
            a1, a2, a3, *params.link_masses, *params.gravity, q[0], q[1], q[2]
        )
    )


def _phase_args(geom, params: SimParams):
    a1, a2, a3 = geom.link_lengths
    return (
        a1, a2, a3,
        *params.link_masses,
        *params.gravity,
        *params.inertia_nmm(),
        *params.effective_damping(),
        *params.k_joint,
    )


def step(state: SimState, params: SimParams, geom, tau_ext=None) -> SimState:
    """Advance one dt with constant command and external joint torque."""
    if tau_ext is None:
        ex = (0.0, 0.0, 0.0)
    else:
        ex = _vec3(tau_ext, "tau_ext")
    th = np.array(state.theta, dtype=float)
    om = np.array(state.theta_dot, dtype=float)
    cmd = np.asarray(state.theta_cmd, dtype=float)
    rec_t = np.empty(1)
    rec_th = np.empty((1, 3))
    rec_om = np.empty((1, 3))
    rec_cmd = np.empty((1, 3))
    _n, blow = kernels.sim_phase(
        *_phase_args(geom, params),
        params.dt, 1,
        th, om,
        cmd[0], cmd[1], cmd[2],
        cmd[0], cmd[1], cmd[2],
        0.0, 0.0, 0.0,
        ex[0], ex[1], ex[2],
        params.jac_step, params.speed_limit, float(state.t), 1,
        rec_t, rec_th, rec_om, rec_cmd, 0,
    )
    if blow >= 0:
        t_hit = state.t + blow * params.dt
        raise errors.NumericalBlowup(
            f"joint speed exceeded {params.speed_limit:g} rad/s at "
            f"t = {t_hit:.6g} s; reduce dt", t_hit,
        )
    return SimState(
        t=float(rec_t[0]), theta=th, theta_dot=om, theta_cmd=np.array(cmd)
    )


@dataclasses.dataclass(frozen=True)
class ScenarioPhase:
    """One scenario segment ending at t_end_s: the command ramps linearly
    to theta_cmd (radians) while tip_force (N, base frame) acts."""

    t_end_s: float
    theta_cmd: tuple
    tip_force: tuple


@dataclasses.dataclass(frozen=True)
class Scenario:
    phases: tuple
    theta_start: tuple = (0.0, 0.0, 0.0)


def scenario_from_dict(raw: dict) -> Scenario:
    """Parse a scenario script (angles in degrees on disk)."""
    if not isinstance(raw, dict):
        raise errors.ConfigError("scenario must be a JSON object")
    unknown = sorted(set(raw) - {"phases", "theta_start_deg"})
    if unknown:
        raise errors.ConfigError(f"unknown scenario keys: {', '.join(unknown)}")
    phases_raw = raw.get("phases")
    if not isinstance(phases_raw, list) or not phases_raw:
        raise errors.ConfigError("scenario needs a non-empty 'phases' list")
    start = _vec3(raw.get("theta_start_deg", (0.0, 0.0, 0.0)), "theta_start_deg")
    phases = []
    prev_end = 0.0
    for idx, ph in enumerate(phases_raw):
        if not isinstance(ph, dict):
            raise errors.ConfigError(f"phase {idx} must be an object")
        unknown = sorted(set(ph) - {"t_end_s", "theta_cmd_deg", "tip_force_N"})
        if unknown:
            raise errors.ConfigError(
                f"phase {idx}: unknown keys: {', '.join(unknown)}"
            )
        missing = {"t_end_s", "theta_cmd_deg", "tip_force_N"} - set(ph)
        if missing:
            raise errors.ConfigError(
                f"phase {idx}: missing keys: {', '.join(sorted(missing))}"
            )
        t_end = ph["t_end_s"]
        if isinstance(t_end, bool) or not isinstance(t_end, (int, float)) \
                or not math.isfinite(t_end) or t_end <= prev_end:
            raise errors.ConfigError(
                f"phase {idx}: t_end_s must be finite and increase across phases"
            )
        cmd = _vec3(ph["theta_cmd_deg"], f"phase {idx} theta_cmd_deg")
        force = _vec3(ph["tip_force_N"], f"phase {idx} tip_force_N")
        phases.append(
            ScenarioPhase(
                t_end_s=float(t_end),
                theta_cmd=tuple(math.radians(v) for v in cmd),
                tip_force=force,
            )
        )
        prev_end = float(t_end)
    return Scenario(
        phases=tuple(phases),
        theta_start=tuple(math.radians(v) for v in start),
    )


def load_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise errors.ConfigError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise errors.ConfigError(f"scenario file is not valid JSON: {exc}") from exc
    return scenario_from_dict(raw)


@dataclasses.dataclass(frozen=True)
class Trajectory:
    """Recorded run: times, joint angles, speeds, commands (radians)."""

    t: np.ndarray
    theta: np.ndarray
    theta_dot: np.ndarray
    theta_cmd: np.ndarray

    def final_state(self) -> SimState:
        return SimState(
            t=float(self.t[-1]),
            theta=self.theta[-1].copy(),
            theta_dot=self.theta_dot[-1].copy(),
            theta_cmd=self.theta_cmd[-1].copy(),
        )

    def rows(self):
        for i in range(self.t.size):
            yield (
                self.t[i],
                math.degrees(self.theta[i, 0]),
                math.degrees(self.theta[i, 1]),
                math.degrees(self.theta[i, 2]),
                math.degrees(self.theta_cmd[i, 0]),
                math.degrees(self.theta_cmd[i, 1]),
                math.degrees(self.theta_cmd[i, 2]),
            )


def write_trajectory_csv(traj: Trajectory, path) -> None:
    csvio.write_rows(path, TRAJECTORY_CSV_HEADER, traj.rows())


def _phase_steps(scenario: Scenario, dt: float):
    counts = []
    t_prev = 0.0
    for idx, ph in enumerate(scenario.phases):
        span = ph.t_end_s - t_prev
        n = int(round(span / dt))
        if n < 1:
            raise errors.ConfigError(
                f"phase {idx} spans {span:.6g} s, shorter than dt = {dt:g} s"
            )
        counts.append(n)
        t_prev = ph.t_end_s
    return counts


def run_scenario(scenario: Scenario, params: SimParams, geom) -> Trajectory:
    """Integrate all phases; record follows params.record_stride.

    The command starts at the initial pose and ramps linearly to each
    phase target in turn.  Raises NumericalBlowup (with the simulation
    time attached) if any joint speed crosses params.speed_limit.
    """
    counts = _phase_steps(scenario, params.dt)
    stride = params.record_stride
    per_phase = [
        n // stride + (0 if n % stride == 0 else 1) for n in counts
    ]
    total = 1 + sum(per_phase)
    rec_t = np.empty(total)
    rec_th = np.empty((total, 3))
    rec_om = np.empty((total, 3))
    rec_cmd = np.empty((total, 3))
    th = np.array(scenario.theta_start, dtype=float)
    om = np.zeros(3)
    cmd_prev = tuple(scenario.theta_start)
    rec_t[0] = 0.0
    rec_th[0] = th
    rec_om[0] = om
    rec_cmd[0] = cmd_prev
    pos = 1
    t0 = 0.0
    base_args = _phase_args(geom, params)
    for ph, n in zip(scenario.phases, counts):
        n_rec, blow = kernels.sim_phase(
            *base_args,
            params.dt, n,
            th, om,
            cmd_prev[0], cmd_prev[1], cmd_prev[2],
            ph.theta_cmd[0], ph.theta_cmd[1], ph.theta_cmd[2],
            ph.tip_force[0], ph.tip_force[1], ph.tip_force[2],
            0.0, 0.0, 0.0,
            params.jac_step, params.speed_limit, t0, stride,
            rec_t, rec_th, rec_om, rec_cmd, pos,
        )
        if blow >= 0:
            t_hit = t0 + blow * params.dt
            raise errors.NumericalBlowup(
                f"joint speed exceeded {params.speed_limit:g} rad/s at "
                f"t = {t_hit:.6g} s; reduce dt", t_hit,
            )
        pos += n_rec
        t0 = t0 + n * params.dt
        cmd_prev = ph.theta_cmd
    return Trajectory(
        t=rec_t[:pos].copy(),
        theta=rec_th[:pos].copy(),
        theta_dot=rec_om[:pos].copy(),
        theta_cmd=rec_cmd[:pos].copy(),
    )


def settle(
    theta_cmd,
    params: SimParams,
    geom,
    tip_force=(0.0, 0.0, 0.0),
    duration_s: float = 5.0,
    theta_start=None,
):
    """Hold one command and force until t = duration_s; returns the final
    SimState.  Convenience wrapper used to find steady states."""
    cmd = _vec3(theta_cmd, "theta_cmd")
    start = cmd if theta_start is None else _vec3(theta_start, "theta_start")
    scenario = Scenario(
        phases=(
            ScenarioPhase(
                t_end_s=float(duration_s),
                theta_cmd=cmd,
                tip_force=_vec3(tip_force, "tip_force"),
            ),
        ),
        theta_start=start,
    )
    traj = run_scenario(scenario, params, geom)
    return traj.final_state()


def tip_torques(geom, params: SimParams, q, tip_force) -> np.ndarray:
    """Joint torques produced by a fingertip force, J_a^T f with the same
    finite-difference Jacobian the integrator uses."""
    ja = kinematics.fingertip_jacobian(geom, q, step=params.jac_step)
    return ja.T @ np.asarray(tip_force, dtype=float)
