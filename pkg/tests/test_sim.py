import math

import numpy as np
import pytest

from softfinger import csvio, errors, kinematics as kin, sim
from softfinger.sim import Scenario, ScenarioPhase, SimParams, SimState

import oracles

# K^-1 J_a^T f at q = (5, 8, 12) deg, k = diag(50), f = (0.4, -0.2, 0.3) N,
# from 40-digit arithmetic
QS_DEFLECTION = np.array(
    [-0.34436551368161302, -0.33994931534311939, -0.16489337747166989]
)


def make_state(theta, cmd=None, t=0.0):
    th = np.asarray(theta, dtype=float)
    return SimState(
        t=t,
        theta=th.copy(),
        theta_dot=np.zeros(3),
        theta_cmd=th.copy() if cmd is None else np.asarray(cmd, dtype=float),
    )


def test_params_defaults_and_derived():
    p = SimParams()
    assert p.inertia == (5.0, 4.0, 3.0)
    assert p.inertia_nmm() == (5e-3, 4e-3, 3e-3)
    # absent damping: critical-ratio 0.7 per joint
    want = tuple(2.0 * 0.7 * math.sqrt(k * i) for k, i in zip(p.k_joint, p.inertia_nmm()))
    assert p.effective_damping() == want
    p2 = SimParams(damping=(1.0, 2.0, 3.0))
    assert p2.effective_damping() == (1.0, 2.0, 3.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"dt": 0.0},
        {"dt": -1e-3},
        {"inertia": (0.0, 4.0, 3.0)},
        {"k_joint": (50.0, -1.0, 50.0)},
        {"speed_limit": 0.0},
        {"record_stride": 0},
        {"gravity": (0.0, 0.0)},
    ],
)
def test_params_validation(kwargs):
    with pytest.raises(errors.ConfigError):
        SimParams(**kwargs)


def test_elastic_torque():
    tau = sim.elastic_torque((50.0, 60.0), (0.25, 0.5), (0.0, 0.75))
    assert np.array_equal(tau, [12.5, -15.0])
    with pytest.raises(errors.DimensionMismatch):
        sim.elastic_torque((50.0,), (0.25, 0.5), (0.0, 0.75))


def test_quasistatic_deflection_fixture(geom):
    ja = kin.fingertip_jacobian(geom, np.radians([5.0, 8.0, 12.0]))
    d = sim.quasistatic_deflection(np.diag([50.0] * 3), ja, (0.4, -0.2, 0.3))
    assert np.max(np.abs(d - QS_DEFLECTION)) < 1e-9


def test_quasistatic_deflection_checks():
    with pytest.raises(errors.SingularStiffness):
        sim.quasistatic_deflection(np.diag([1.0, 1.0, 0.0]), np.eye(3), (1.0, 0.0, 0.0))
    with pytest.raises(errors.DimensionMismatch):
        sim.quasistatic_deflection(np.eye(3), np.eye(3), (1.0, 0.0))


def test_gravity_torques_match_potential_gradient(geom, rng):
    p = SimParams(gravity=(1200.0, -800.0, -9810.0))
    for q in rng.uniform(-0.3, 0.3, size=(10, 3)):
        tau = sim.gravity_torques(geom, p, q)
        fd = oracles.gravity_fd(geom.link_lengths, p.link_masses, p.gravity, q)
        assert np.max(np.abs(tau - fd)) < 1e-8


def test_gravity_torques_zero_without_gravity(geom):
    p = SimParams(gravity=(0.0, 0.0, 0.0))
    assert np.array_equal(sim.gravity_torques(geom, p, (0.2, -0.1, 0.3)), np.zeros(3))


def test_step_advances_time_and_relaxes(geom):
    p = SimParams()
    st = make_state((0.0, 0.0, 0.0), cmd=np.radians([10.0, 0.0, 0.0]))
    st = sim.step(st, p, geom)
    assert st.t == p.dt
    assert st.theta_dot[0] > 0.0
    for _ in range(4000):
        st = sim.step(st, p, geom)
    assert abs(st.theta[0] - math.radians(10.0)) < 1e-6


def test_step_external_torque_shifts_equilibrium(geom):
    p = SimParams(gravity=(0.0, 0.0, 0.0))
    st = make_state((0.0, 0.0, 0.0))
    for _ in range(4000):
        st = sim.step(st, p, geom, tau_ext=(0.5, 0.0, 0.0))
    # k*theta = tau_ext at rest
    assert st.theta[0] == pytest.approx(0.5 / 50.0, rel=1e-6)


def test_step_blowup_raises_with_time(geom):
    p = SimParams(dt=0.05)
    st = make_state((0.0, 0.0, 0.0), cmd=np.radians([15.0, 0.0, 0.0]))
    with pytest.raises(errors.NumericalBlowup) as exc:
        for _ in range(200):
            st = sim.step(st, p, geom)
    assert exc.value.t is not None and exc.value.t > 0.0


def test_scenario_from_dict_round_trip():
    raw = {
        "theta_start_deg": [1.0, 2.0, 3.0],
        "phases": [
            {"t_end_s": 1.0, "theta_cmd_deg": [10.0, 0.0, 0.0], "tip_force_N": [0.0, 0.0, 0.0]},
            {"t_end_s": 2.5, "theta_cmd_deg": [10.0, 5.0, 0.0], "tip_force_N": [0.1, 0.0, -0.2]},
        ],
    }
    sc = sim.scenario_from_dict(raw)
    assert len(sc.phases) == 2
    assert sc.theta_start == pytest.approx(np.radians([1.0, 2.0, 3.0]))
    assert sc.phases[1].t_end_s == 2.5
    assert sc.phases[1].tip_force == (0.1, 0.0, -0.2)
    assert sc.phases[0].theta_cmd == pytest.approx((math.radians(10.0), 0.0, 0.0))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda r: r.update({"extra": 1}),
        lambda r: r["phases"][0].update({"extra": 1}),
        lambda r: r["phases"][0].pop("t_end_s"),
        lambda r: r["phases"][0].update({"t_end_s": 3.0}),
        lambda r: r.update({"phases": []}),
        lambda r: r["phases"][0].update({"theta_cmd_deg": [1.0, 2.0]}),
    ],
)
def test_scenario_from_dict_rejects_bad_input(mutate):
    raw = {
        "theta_start_deg": [0.0, 0.0, 0.0],
        "phases": [
            {"t_end_s": 1.0, "theta_cmd_deg": [10.0, 0.0, 0.0], "tip_force_N": [0.0, 0.0, 0.0]},
            {"t_end_s": 2.0, "theta_cmd_deg": [0.0, 0.0, 0.0], "tip_force_N": [0.0, 0.0, 0.0]},
        ],
    }
    mutate(raw)
    with pytest.raises(errors.ConfigError):
        sim.scenario_from_dict(raw)


def test_packaged_demo_scenario_loads():
    from importlib import resources

    with resources.as_file(
        resources.files("softfinger.data").joinpath("demo_scenario.json")
    ) as path:
        sc = sim.load_scenario(path)
    assert len(sc.phases) == 3
    assert sc.phases[-1].t_end_s == 4.5


def test_run_scenario_records_and_ramps(geom):
    sc = Scenario(
        phases=(
            ScenarioPhase(t_end_s=0.5, theta_cmd=(0.2, 0.1, 0.0), tip_force=(0.0, 0.0, 0.0)),
        ),
        theta_start=(0.0, 0.0, 0.0),
    )
    p = SimParams()
    traj = sim.run_scenario(sc, p, geom)
    assert traj.t.size == 501
    assert traj.t[0] == 0.0 and traj.t[-1] == 0.5
    assert np.array_equal(traj.theta[0], [0.0, 0.0, 0.0])
    # the command ramps linearly: row i holds cmd at fraction i/500
    for i in (1, 100, 250, 500):
        assert traj.theta_cmd[i, 0] == 0.2 * (i / 500)
    assert traj.theta_cmd[-1, 1] == 0.1


def test_run_scenario_stride_bookkeeping(geom):
    sc = Scenario(
        phases=(
            ScenarioPhase(t_end_s=0.25, theta_cmd=(0.1, 0.0, 0.0), tip_force=(0.0, 0.0, 0.0)),
            ScenarioPhase(t_end_s=0.5, theta_cmd=(0.0, 0.0, 0.0), tip_force=(0.0, 0.0, 0.0)),
        ),
        theta_start=(0.0, 0.0, 0.0),
    )
    traj = sim.run_scenario(sc, SimParams(record_stride=7), geom)
    # 250 steps per phase: 35 stride hits plus the phase-end record
    assert traj.t.size == 1 + 2 * 36
    assert traj.t[-1] == 0.5
    assert np.all(np.diff(traj.t) > 0.0)


def test_run_scenario_repeats_bitwise(geom):
    sc = Scenario(
        phases=(
            ScenarioPhase(t_end_s=0.3, theta_cmd=(0.2, 0.1, -0.05), tip_force=(0.1, 0.0, -0.05)),
        ),
        theta_start=(0.0, 0.0, 0.0),
    )
    a = sim.run_scenario(sc, SimParams(), geom)
    b = sim.run_scenario(sc, SimParams(), geom)
    assert np.array_equal(a.theta, b.theta)
    assert np.array_equal(a.theta_dot, b.theta_dot)


def test_run_scenario_rejects_short_phase(geom):
    sc = Scenario(
        phases=(ScenarioPhase(t_end_s=1e-5, theta_cmd=(0.0,) * 3, tip_force=(0.0,) * 3),),
        theta_start=(0.0, 0.0, 0.0),
    )
    with pytest.raises(errors.ConfigError):
        sim.run_scenario(sc, SimParams(), geom)


def test_run_scenario_blowup(geom):
    sc = Scenario(
        phases=(ScenarioPhase(t_end_s=2.0, theta_cmd=(0.3, 0.0, 0.0), tip_force=(0.0,) * 3),),
        theta_start=(0.0, 0.0, 0.0),
    )
    with pytest.raises(errors.NumericalBlowup) as exc:
        sim.run_scenario(sc, SimParams(dt=0.05), geom)
    assert exc.value.t is not None


def test_step_then_hold_converges_to_command(geom):
    # fast ramp then a long hold: the damped system dies onto the command
    cmd = (math.radians(8.0), math.radians(-5.0), math.radians(10.0))
    sc = Scenario(
        phases=(
            ScenarioPhase(t_end_s=0.1, theta_cmd=cmd, tip_force=(0.0,) * 3),
            ScenarioPhase(t_end_s=2.0, theta_cmd=cmd, tip_force=(0.0,) * 3),
        ),
        theta_start=(0.0, 0.0, 0.0),
    )
    end = sim.run_scenario(sc, SimParams(gravity=(0.0, 0.0, 0.0)), geom).final_state()
    assert np.max(np.abs(end.theta - np.asarray(cmd))) < 1e-9
    assert np.max(np.abs(end.theta_dot)) < 1e-9


def test_settle_under_force_matches_quasistatic(geom):
    # small force keeps the deflection in the linear regime
    f = (0.002, -0.001, 0.0015)
    cmd = np.radians([8.0, 10.0, 12.0])
    p = SimParams(gravity=(0.0, 0.0, 0.0))
    end = sim.settle(cmd, p, geom, tip_force=f, duration_s=3.0)
    want = sim.quasistatic_deflection(
        np.diag(p.k_joint), kin.fingertip_jacobian(geom, cmd), f
    )
    assert np.max(np.abs((end.theta - cmd) - want)) < 1e-4


def test_energy_conservation_undamped(geom):
    # single free joint, k = 50, I = 5e-3: period 2*pi/100
    T = 2.0 * math.pi / 100.0
    p = SimParams(damping=(0.0, 0.0, 0.0), gravity=(0.0, 0.0, 0.0), dt=T / 1000.0)
    st = make_state((0.1, 0.0, 0.0), cmd=(0.0, 0.0, 0.0))
    E0 = 0.5 * 50.0 * 0.1 ** 2
    for _ in range(2):
        for _ in range(1000):
            st = sim.step(st, p, geom)
        E = 0.5 * 5e-3 * st.theta_dot[0] ** 2 + 0.5 * 50.0 * st.theta[0] ** 2
        assert abs(E - E0) / E0 < 0.01


def test_tip_torques(geom):
    q = np.radians([5.0, 8.0, 12.0])
    f = (0.4, -0.2, 0.3)
    want = kin.fingertip_jacobian(geom, q).T @ np.asarray(f)
    assert np.array_equal(sim.tip_torques(geom, SimParams(), q, f), want)


def test_trajectory_csv_round_trip(geom, tmp_path):
    sc = Scenario(
        phases=(ScenarioPhase(t_end_s=0.05, theta_cmd=(0.1, 0.0, 0.0), tip_force=(0.0,) * 3),),
        theta_start=(0.0, 0.0, 0.0),
    )
    traj = sim.run_scenario(sc, SimParams(), geom)
    path = tmp_path / "traj.csv"
    sim.write_trajectory_csv(traj, path)
    rows = csvio.read_float_table(path, sim.TRAJECTORY_CSV_HEADER)
    assert len(rows) == traj.t.size
    assert rows[10][0] == traj.t[10]
    assert rows[10][1] == math.degrees(traj.theta[10, 0])


def test_final_state_is_a_copy(geom):
    sc = Scenario(
        phases=(ScenarioPhase(t_end_s=0.05, theta_cmd=(0.1, 0.0, 0.0), tip_force=(0.0,) * 3),),
        theta_start=(0.0, 0.0, 0.0),
    )
    traj = sim.run_scenario(sc, SimParams(), geom)
    end = traj.final_state()
    end.theta[0] = 99.0
    assert traj.theta[-1, 0] != 99.0
