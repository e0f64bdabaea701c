import math

import numpy as np
import pytest

from softfinger import csvio, errors, kinematics as kin, manipulability as man
from softfinger.geometry import FingerGeometry

# slopes (degrees/mm) recomputed independently with numpy.polyfit on
# 40-digit lengths; stable fixtures for the reference geometry
PAIR_SLOPES = {
    -15.0: 3.5531733593224506,
    -10.0: 3.5512219758106607,
    -5.0: 3.5500757969216967,
    0.0: 3.549698136826305,
    5.0: 3.5500757969216967,
    10.0: 3.5512219758106607,
    15.0: 3.5531733593224506,
}
TIP_SLOPE = 5.021603166212449


def test_rest_manipulability_exact(geom):
    # |det J|(0,0) = spacing * r_bend = 161 exactly in floats
    assert man.manipulability(geom, 0.0, 0.0) == 1.0 / 161.0
    assert man.normalized_manipulability(geom, 0.0, 0.0) == 1.0


def test_reciprocal_identity(geom, rng):
    for th1, th2 in rng.uniform(-geom.limit_rad, geom.limit_rad, size=(50, 2)):
        J = kin.paired_jacobian(geom, th1, th2)
        det = abs(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
        assert man.manipulability(geom, th1, th2) * det == pytest.approx(1.0, abs=1e-12)


def test_sweep_grid_layout(geom):
    grid = man.sweep_workspace(geom, n1=21, n2=11)
    lim = geom.limit_rad
    assert grid.values.shape == (21, 11)
    assert grid.theta1[0] == -lim and grid.theta1[-1] == lim
    assert grid.theta2[0] == -lim and grid.theta2[-1] == lim
    assert grid.theta1[10] == 0.0 and grid.theta2[5] == 0.0
    assert grid.normalized
    rows = list(grid.rows())
    assert len(rows) == 21 * 11
    assert rows[0][0] == -geom.limit_deg


def test_sweep_center_cell_exactly_one(geom):
    grid = man.sweep_workspace(geom)
    assert grid.values[20, 20] == 1.0


def test_sweep_matches_pointwise(geom):
    grid = man.sweep_workspace(geom, n1=5, n2=5)
    for i, t1 in enumerate(grid.theta1):
        for j, t2 in enumerate(grid.theta2):
            assert grid.values[i, j] == man.normalized_manipulability(
                geom, float(t1), float(t2)
            )


def test_sweep_raw_values(geom):
    grid = man.sweep_workspace(geom, n1=5, n2=5, normalized=False)
    assert not grid.normalized
    for i, t1 in enumerate(grid.theta1):
        for j, t2 in enumerate(grid.theta2):
            assert grid.values[i, j] == man.manipulability(geom, float(t1), float(t2))


def test_sweep_scale_invariance_bitwise(geom):
    a = man.sweep_workspace(geom)
    b = man.sweep_workspace(geom.scaled(2.0))
    assert np.array_equal(a.values, b.values)


def test_sweep_rejects_tiny_grid(geom):
    with pytest.raises(errors.ConfigError):
        man.sweep_workspace(geom, n1=1)


def test_singular_cell_raises_with_location():
    # near-zero anchor spacing collapses |det| ~ spacing * r_bend at (0,0)
    g = FingerGeometry(spacing=1e-14)
    with pytest.raises(errors.SingularConfiguration) as exc:
        man.sweep_workspace(g)
    assert exc.value.theta1 is not None
    assert abs(exc.value.theta1) <= g.limit_rad


def test_manipulability_singular_raises():
    g = FingerGeometry(spacing=1e-14)
    with pytest.raises(errors.SingularConfiguration):
        man.manipulability(g, 0.0, 0.0)


def test_contour_lengths_and_nam(geom):
    tr = man.contour_fixed(geom, man.FixedJoint.THETA1, math.radians(10), n=21)
    assert tr.fixed_joint is man.FixedJoint.THETA1
    assert tr.nam[0] == 0.0
    for i, a in enumerate(tr.free_angle):
        l1, l2 = kin.paired_lengths(geom, tr.fixed_value, float(a))
        assert tr.l1[i] == l1 and tr.l2[i] == l2
        want = math.sqrt((l1 - tr.l1[0]) ** 2 + (l2 - tr.l2[0]) ** 2)
        assert tr.nam[i] == pytest.approx(want, rel=1e-15, abs=0.0)
    assert np.array_equal(tr.motion, tr.nam)


def test_contour_fixed_theta2_sweeps_theta1(geom):
    tr = man.contour_fixed(geom, "theta2", math.radians(-5), n=9)
    for i, a in enumerate(tr.free_angle):
        l1, l2 = kin.paired_lengths(geom, float(a), tr.fixed_value)
        assert tr.l1[i] == l1 and tr.l2[i] == l2


def test_contour_rejects_out_of_limit_fixed_value(geom):
    with pytest.raises(errors.ConfigError):
        man.contour_fixed(geom, man.FixedJoint.THETA1, math.radians(25))


def test_single_joint_curve(geom):
    curve = man.single_joint_curve(geom, n=17)
    assert curve.motion[0] == 0.0
    for i, a in enumerate(curve.free_angle):
        assert curve.l3[i] == kin.tip_length(geom, float(a))
    assert np.all(np.diff(curve.l3) > 0.0)


@pytest.mark.parametrize("fixed_deg", sorted(PAIR_SLOPES))
def test_pair_slope_fixtures(geom, fixed_deg):
    tr = man.contour_fixed(geom, man.FixedJoint.THETA1, math.radians(fixed_deg))
    slope, r2 = man.slope_estimate(tr)
    assert slope == pytest.approx(PAIR_SLOPES[fixed_deg], abs=1e-9)
    assert r2 > 0.98


def test_tip_slope_fixture(geom):
    slope, r2 = man.slope_estimate(man.single_joint_curve(geom))
    assert slope == pytest.approx(TIP_SLOPE, abs=1e-9)
    assert r2 > 0.98


def test_slope_estimate_deterministic(geom):
    tr1 = man.contour_fixed(geom, man.FixedJoint.THETA1, math.radians(5))
    tr2 = man.contour_fixed(geom, man.FixedJoint.THETA1, math.radians(5))
    assert man.slope_estimate(tr1) == man.slope_estimate(tr2)


def test_slope_estimate_needs_samples(geom):
    tr = man.contour_fixed(geom, man.FixedJoint.THETA1, 0.0, n=2)
    with pytest.raises(errors.ConfigError):
        man.slope_estimate(tr)


def test_grid_csv_round_trip(geom, tmp_path):
    grid = man.sweep_workspace(geom, n1=5, n2=7)
    path = tmp_path / "grid.csv"
    man.write_grid_csv(grid, path)
    rows = csvio.read_float_table(path, man.GRID_CSV_HEADER)
    assert len(rows) == 35
    # repr round trip keeps every value bit-exact
    assert rows[0][2] == grid.values[0, 0]
    assert rows[-1][2] == grid.values[-1, -1]


def test_trace_csv_round_trip(geom, tmp_path):
    tr = man.contour_fixed(geom, man.FixedJoint.THETA2, 0.0, n=9)
    path = tmp_path / "trace.csv"
    man.write_trace_csv(tr, path)
    rows = csvio.read_float_table(path, man.TRACE_CSV_HEADER)
    assert len(rows) == 9
    assert rows[3][1] == tr.l1[3]
    assert rows[3][3] == tr.nam[3]
