import math

import numpy as np
import pytest

from softfinger import errors, kinematics as kin
from softfinger.geometry import FingerGeometry

import oracles

# independently recomputed lengths (40-digit arithmetic, rotation-matrix
# point construction) on the reference geometry
L1_AT_10_15 = 38.247641107200185473
L2_AT_10_15 = 40.670342374157498706
L1_AT_7_M12 = 33.218607057445629088
L2_AT_7_M12 = 34.921797100727878784
L3_AT_12 = 42.809105599631537478
L3_AT_4 = 41.292653296719893153


def test_rest_lengths_exact(geom):
    # straight pose: l1 = l2 = d1 + d2 - s_mount, l3 = d3 + d4
    assert kin.paired_lengths(geom, 0.0, 0.0) == (36.5, 36.5)
    assert kin.tip_length(geom, 0.0) == 40.5


def test_rest_jacobian_exact(geom):
    J = kin.paired_jacobian(geom, 0.0, 0.0)
    assert J.shape == (2, 2)
    assert np.array_equal(J, [[-7.0, 11.5], [7.0, 11.5]])
    assert kin.tip_slope(geom, 0.0) == 11.5


def test_lengths_match_independent_construction(geom):
    l1, l2 = kin.paired_lengths(geom, math.radians(10), math.radians(15))
    assert l1 == pytest.approx(L1_AT_10_15, rel=1e-13)
    assert l2 == pytest.approx(L2_AT_10_15, rel=1e-13)
    l1, l2 = kin.paired_lengths(geom, math.radians(7), math.radians(-12))
    assert l1 == pytest.approx(L1_AT_7_M12, rel=1e-13)
    assert l2 == pytest.approx(L2_AT_7_M12, rel=1e-13)
    assert kin.tip_length(geom, math.radians(12)) == pytest.approx(L3_AT_12, rel=1e-13)
    assert kin.tip_length(geom, math.radians(4)) == pytest.approx(L3_AT_4, rel=1e-13)


def test_pitch_variant_mirror_symmetry(geom, rng):
    # swapping th1 -> -th1 swaps the two actuators bit-for-bit
    for th1, th2 in rng.uniform(-geom.limit_rad, geom.limit_rad, size=(50, 2)):
        a = kin.paired_lengths(geom, th1, th2)
        b = kin.paired_lengths(geom, -th1, th2)
        assert a[0] == b[1] and a[1] == b[0]


def test_yaw_variant_differs_off_axis(geom):
    gy = FingerGeometry(a_variant="yaw")
    assert kin.paired_lengths(gy, 0.0, 0.0) == kin.paired_lengths(geom, 0.0, 0.0)
    assert kin.paired_lengths(gy, 0.2, 0.1) != kin.paired_lengths(geom, 0.2, 0.1)


@pytest.mark.parametrize("variant", ["pitch", "yaw"])
def test_jacobian_matches_finite_differences(variant, rng):
    g = FingerGeometry(a_variant=variant)
    for th1, th2 in rng.uniform(-g.limit_rad, g.limit_rad, size=(25, 2)):
        J = kin.paired_jacobian(g, th1, th2)
        fd = oracles.pair_fd_jacobian(g, th1, th2)
        assert np.allclose(J, fd, rtol=1e-7, atol=1e-7)


def test_tip_slope_matches_finite_differences(geom, rng):
    for th3 in rng.uniform(-geom.limit_rad, geom.limit_rad, size=25):
        assert kin.tip_slope(geom, th3) == pytest.approx(
            oracles.tip_fd_slope(geom, th3), rel=1e-7
        )


def test_paired_angles_round_trip(geom, rng):
    for th1, th2 in rng.uniform(-geom.limit_rad, geom.limit_rad, size=(50, 2)):
        l1, l2 = kin.paired_lengths(geom, th1, th2)
        r1, r2 = kin.paired_angles(geom, l1, l2)
        assert abs(r1 - th1) < 1e-9 and abs(r2 - th2) < 1e-9


def test_paired_angles_honors_guess(geom):
    th = (math.radians(18), math.radians(-16))
    l1, l2 = kin.paired_lengths(geom, *th)
    r = kin.paired_angles(geom, l1, l2, guess=(th[0] - 0.01, th[1] + 0.01))
    assert abs(r[0] - th[0]) < 1e-9 and abs(r[1] - th[1]) < 1e-9


def test_paired_angles_out_of_workspace(geom):
    l1, l2 = kin.paired_lengths(geom, math.radians(25), 0.0)
    with pytest.raises(errors.OutOfWorkspace):
        kin.paired_angles(geom, l1, l2)


def test_paired_angles_no_convergence(geom):
    l1, l2 = kin.paired_lengths(geom, math.radians(18), math.radians(-17))
    with pytest.raises(errors.NoConvergence):
        kin.paired_angles(geom, l1, l2, max_iter=1)


def test_tip_angle_round_trip(geom, rng):
    for th3 in rng.uniform(-geom.limit_rad, geom.limit_rad, size=50):
        assert abs(kin.tip_angle(geom, kin.tip_length(geom, th3)) - th3) < 1e-9


def test_tip_angle_hits_exact_bracket_ends(geom):
    lim = geom.limit_rad
    assert kin.tip_angle(geom, kin.tip_length(geom, lim)) == lim
    assert kin.tip_angle(geom, kin.tip_length(geom, -lim)) == -lim


def test_tip_angle_out_of_workspace(geom):
    with pytest.raises(errors.OutOfWorkspace):
        kin.tip_angle(geom, kin.tip_length(geom, geom.limit_rad) + 1.0)
    with pytest.raises(errors.OutOfWorkspace):
        kin.tip_angle(geom, kin.tip_length(geom, -geom.limit_rad) - 1.0)


def test_actuator_jacobian_block_structure(geom):
    q = (0.1, -0.05, 0.2)
    J = kin.actuator_jacobian(geom, q)
    assert J.shape == (3, 3)
    assert J[0, 2] == 0.0 and J[1, 2] == 0.0
    assert J[2, 0] == 0.0 and J[2, 1] == 0.0
    assert np.array_equal(J[:2, :2], kin.paired_jacobian(geom, q[0], q[1]))
    assert J[2, 2] == kin.tip_slope(geom, q[2])


def test_fingertip_position_rest(geom):
    p = kin.fingertip_position(geom, (0.0, 0.0, 0.0))
    assert p.shape == (3,)
    assert p[0] == 75.0 and p[1] == 0.0 and p[2] == 0.0


def test_fingertip_position_matches_direct_trig(geom, rng):
    for q in rng.uniform(-0.3, 0.3, size=(20, 3)):
        p = kin.fingertip_position(geom, q)
        want = oracles.chain_points(geom.link_lengths, q)[2]
        assert np.allclose(p, want, rtol=1e-14, atol=1e-12)


def test_fingertip_jacobian_matches_analytic(geom):
    t1, t2, t3 = 0.15, -0.1, 0.25
    J = kin.fingertip_jacobian(geom, (t1, t2, t3))
    a1, a2, a3 = geom.link_lengths
    xp = a1 + a2 * math.cos(t2) + a3 * math.cos(t2 + t3)
    dxp2 = -a2 * math.sin(t2) - a3 * math.sin(t2 + t3)
    dxp3 = -a3 * math.sin(t2 + t3)
    dzp2 = -a2 * math.cos(t2) - a3 * math.cos(t2 + t3)
    dzp3 = -a3 * math.cos(t2 + t3)
    want = np.array([
        [-xp * math.sin(t1), dxp2 * math.cos(t1), dxp3 * math.cos(t1)],
        [xp * math.cos(t1), dxp2 * math.sin(t1), dxp3 * math.sin(t1)],
        [0.0, dzp2, dzp3],
    ])
    assert np.allclose(J, want, rtol=1e-8, atol=1e-8)


def test_solver_tolerances_scale_with_target(geom):
    # the dual solver residual bound is relative to the squared target
    l1, l2 = kin.paired_lengths(geom, 0.05, 0.03)
    g2 = geom.scaled(2.0)
    r1, r2 = kin.paired_angles(g2, 2.0 * l1, 2.0 * l2)
    assert abs(r1 - 0.05) < 1e-9 and abs(r2 - 0.03) < 1e-9
