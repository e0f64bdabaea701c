"""Pure-Python scalar kernels (fallback backend).

Every function here has a twin in ``_fast.pyx`` written with the same
arithmetic in the same order, so the two backends produce bit-identical
results.  Keep the files in sync when touching either one.

Conventions: angles rad, lengths mm, forces N, torques N*mm, masses kg,
gravity mm/s^2, joint inertia N*mm*s^2/rad (callers convert from kg*mm^2).
"""

import math

# kg*mm^2/s^2 -> N*mm, for gravity generalized forces
NMM_PER_KGMM2_S2 = 1e-3


def dual_offsets(R, D1, D2, L, literal_a, th1, th2):
    """Offsets (A, H, V) between the two base joints at (th1, th2)."""
    c2 = math.cos(th2)
    if literal_a:
        sa = math.sin(th1)
    else:
        sa = math.sin(th2)
    A = R * (1.0 - c2) + D2 * sa
    H = D1 + R * math.sin(th2) + D2 * c2
    V = 0.5 * L
    return A, H, V


def dual_lengths_sq(R, D1, D2, S, L, literal_a, th1, th2):
    """Squared lengths (l1^2, l2^2) of the paired base actuators."""
    s1 = math.sin(th1)
    c1 = math.cos(th1)
    s2 = math.sin(th2)
    c2 = math.cos(th2)
    if literal_a:
        sa = s1
    else:
        sa = s2
    A = R * (1.0 - c2) + D2 * sa
    H = D1 + R * s2 + D2 * c2
    V = 0.5 * L
    u1 = H * c1 - V * s1 - S
    w1 = H * s1 + V * c1 - V
    u2 = H * c1 + V * s1 - S
    w2 = H * s1 - V * c1 + V
    l1sq = A * A + u1 * u1 + w1 * w1
    l2sq = A * A + u2 * u2 + w2 * w2
    return l1sq, l2sq


def _dual_half_jacobian(R, D1, D2, S, L, literal_a, th1, th2):
    """Squared lengths plus m_ij = d(l_i^2)/dth_j / 2 = l_i * dl_i/dth_j."""
    s1 = math.sin(th1)
    c1 = math.cos(th1)
    s2 = math.sin(th2)
    c2 = math.cos(th2)
    if literal_a:
        sa = s1
    else:
        sa = s2
    A = R * (1.0 - c2) + D2 * sa
    H = D1 + R * s2 + D2 * c2
    V = 0.5 * L
    u1 = H * c1 - V * s1 - S
    w1 = H * s1 + V * c1 - V
    u2 = H * c1 + V * s1 - S
    w2 = H * s1 - V * c1 + V
    l1sq = A * A + u1 * u1 + w1 * w1
    l2sq = A * A + u2 * u2 + w2 * w2
    dH = R * c2 - D2 * s2
    if literal_a:
        dA1 = D2 * c1
        dA2 = R * s2
    else:
        dA1 = 0.0
        dA2 = R * s2 + D2 * c2
    du1_1 = -H * s1 - V * c1
    dw1_1 = H * c1 - V * s1
    du2_1 = -H * s1 + V * c1
    dw2_1 = H * c1 + V * s1
    dg1 = dH * c1
    dg2 = dH * s1
    m11 = A * dA1 + u1 * du1_1 + w1 * dw1_1
    m12 = A * dA2 + u1 * dg1 + w1 * dg2
    m21 = A * dA1 + u2 * du2_1 + w2 * dw2_1
    m22 = A * dA2 + u2 * dg1 + w2 * dg2
    return l1sq, l2sq, m11, m12, m21, m22


def dual_jacobian(R, D1, D2, S, L, literal_a, th1, th2):
    """Lengths and Jacobian entries (l1, l2, j11, j12, j21, j22).

    j_ij = dl_i/dth_j.  Raises ValueError on a zero-length configuration.
    """
    l1sq, l2sq, m11, m12, m21, m22 = _dual_half_jacobian(
        R, D1, D2, S, L, literal_a, th1, th2
    )
    if l1sq <= 0.0 or l2sq <= 0.0:
        raise ValueError("zero actuator length")
    l1 = math.sqrt(l1sq)
    l2 = math.sqrt(l2sq)
    j11 = m11 / l1
    j12 = m12 / l1
    j21 = m21 / l2
    j22 = m22 / l2
    return l1, l2, j11, j12, j21, j22


def single_length(R, D3, D4, th3):
    """Length l3 of the fingertip actuator."""
    s3 = math.sin(th3)
    c3 = math.cos(th3)
    H3 = D3 + R * s3 + D4 * c3
    V3 = R * (1.0 - c3) + D4 * s3
    return math.sqrt(H3 * H3 + V3 * V3)


def single_derivative(R, D3, D4, th3):
    """(l3, dl3/dth3); raises ValueError at a zero-length configuration."""
    s3 = math.sin(th3)
    c3 = math.cos(th3)
    H3 = D3 + R * s3 + D4 * c3
    V3 = R * (1.0 - c3) + D4 * s3
    l3sq = H3 * H3 + V3 * V3
    if l3sq <= 0.0:
        raise ValueError("zero actuator length")
    l3 = math.sqrt(l3sq)
    dH3 = R * c3 - D4 * s3
    dV3 = R * s3 + D4 * c3
    return l3, (H3 * dH3 + V3 * dV3) / l3


def dual_inverse(R, D1, D2, S, L, literal_a, l1t, l2t, th1, th2, tol, max_iter):
    """Damped Newton for (th1, th2) from target lengths (l1t, l2t).

    Works on the squared-length residual with the analytic half-Jacobian.
    Returns (th1, th2, resid, n_iter, status); status 0 converged,
    1 not converged, 2 singular Jacobian during the solve.
    """
    t1sq = l1t * l1t
    t2sq = l2t * l2t
    scale = t1sq + t2sq
    if scale < 1.0:
        scale = 1.0
    tol_eff = tol * scale
    l1sq, l2sq = dual_lengths_sq(R, D1, D2, S, L, literal_a, th1, th2)
    r1 = l1sq - t1sq
    r2 = l2sq - t2sq
    rn = r1 * r1 + r2 * r2
    for it in range(1, max_iter + 1):
        a1 = math.fabs(r1)
        a2 = math.fabs(r2)
        resid = a1 if a1 > a2 else a2
        if resid <= tol_eff:
            return th1, th2, resid, it - 1, 0
        ign1, ign2, m11, m12, m21, m22 = _dual_half_jacobian(
            R, D1, D2, S, L, literal_a, th1, th2
        )
        det = m11 * m22 - m12 * m21
        if math.fabs(det) < 1e-300:
            return th1, th2, resid, it - 1, 2
        # full Newton step on r with Jacobian 2*m
        d1 = -(m22 * r1 - m12 * r2) / (2.0 * det)
        d2 = -(m11 * r2 - m21 * r1) / (2.0 * det)
        alpha = 1.0
        improved = 0
        n1 = th1
        n2 = th2
        nr1 = r1
        nr2 = r2
        nrn = rn
        for _ in range(40):
            c1 = th1 + alpha * d1
            c2 = th2 + alpha * d2
            cl1sq, cl2sq = dual_lengths_sq(R, D1, D2, S, L, literal_a, c1, c2)
            cr1 = cl1sq - t1sq
            cr2 = cl2sq - t2sq
            crn = cr1 * cr1 + cr2 * cr2
            if crn < rn:
                n1 = c1
                n2 = c2
                nr1 = cr1
                nr2 = cr2
                nrn = crn
                improved = 1
                break
            alpha = 0.5 * alpha
        if not improved:
            return th1, th2, resid, it, 1
        th1 = n1
        th2 = n2
        r1 = nr1
        r2 = nr2
        rn = nrn
    a1 = math.fabs(r1)
    a2 = math.fabs(r2)
    resid = a1 if a1 > a2 else a2
    if resid <= tol_eff:
        return th1, th2, resid, max_iter, 0
    return th1, th2, resid, max_iter, 1


def single_inverse(R, D3, D4, target, lo, hi, tol, max_iter):
    """Bisection-safeguarded Newton for th3 from l3 on a monotone bracket.

    Returns (th3, resid, status); status 0 converged, 1 not converged,
    3 target not bracketed by [lo, hi].
    """
    ascale = math.fabs(target)
    if ascale < 1.0:
        ascale = 1.0
    tol_eff = tol * ascale
    flo = single_length(R, D3, D4, lo) - target
    fhi = single_length(R, D3, D4, hi) - target
    if flo == 0.0:
        return lo, 0.0, 0
    if fhi == 0.0:
        return hi, 0.0, 0
    if (flo > 0.0) == (fhi > 0.0):
        return 0.0, 0.0, 3
    a = lo
    b = hi
    fa = flo
    th = 0.5 * (a + b)
    f = 0.0
    for _ in range(max_iter):
        l3, dl3 = single_derivative(R, D3, D4, th)
        f = l3 - target
        if math.fabs(f) <= tol_eff:
            return th, math.fabs(f), 0
        if (f > 0.0) == (fa > 0.0):
            a = th
            fa = f
        else:
            b = th
        if b - a <= 1e-15:
            return th, math.fabs(f), 0
        if dl3 != 0.0:
            cand = th - f / dl3
        else:
            cand = 0.5 * (a + b)
        if cand <= a or cand >= b:
            cand = 0.5 * (a + b)
        th = cand
    return th, math.fabs(f), 1


def det_grid(R, D1, D2, S, L, literal_a, th1s, th2s, out):
    """Fill out[i, j] with |det dl/dth| at (th1s[i], th2s[j]).

    Degenerate (zero-length) cells are marked with -1.0.
    """
    n1 = th1s.shape[0]
    n2 = th2s.shape[0]
    for i in range(n1):
        th1 = float(th1s[i])
        for j in range(n2):
            th2 = float(th2s[j])
            l1sq, l2sq, m11, m12, m21, m22 = _dual_half_jacobian(
                R, D1, D2, S, L, literal_a, th1, th2
            )
            if l1sq <= 0.0 or l2sq <= 0.0:
                out[i, j] = -1.0
                continue
            l1 = math.sqrt(l1sq)
            l2 = math.sqrt(l2sq)
            j11 = m11 / l1
            j12 = m12 / l1
            j21 = m21 / l2
            j22 = m22 / l2
            det = j11 * j22 - j12 * j21
            out[i, j] = math.fabs(det)


def fingertip(a1, a2, a3, th1, th2, th3):
    """Fingertip position (x, y, z) of the yaw-pitch-pitch chain."""
    c2 = math.cos(th2)
    s2 = math.sin(th2)
    c23 = math.cos(th2 + th3)
    s23 = math.sin(th2 + th3)
    xp = a1 + a2 * c2 + a3 * c23
    zp = -(a2 * s2 + a3 * s23)
    c1 = math.cos(th1)
    s1 = math.sin(th1)
    return xp * c1, xp * s1, zp


def task_jacobian_fd(a1, a2, a3, th1, th2, th3, step):
    """Row-major 3x3 fingertip Jacobian by central differences."""
    h2 = 2.0 * step
    xp, yp, zp = fingertip(a1, a2, a3, th1 + step, th2, th3)
    xm, ym, zm = fingertip(a1, a2, a3, th1 - step, th2, th3)
    j11 = (xp - xm) / h2
    j21 = (yp - ym) / h2
    j31 = (zp - zm) / h2
    xp, yp, zp = fingertip(a1, a2, a3, th1, th2 + step, th3)
    xm, ym, zm = fingertip(a1, a2, a3, th1, th2 - step, th3)
    j12 = (xp - xm) / h2
    j22 = (yp - ym) / h2
    j32 = (zp - zm) / h2
    xp, yp, zp = fingertip(a1, a2, a3, th1, th2, th3 + step)
    xm, ym, zm = fingertip(a1, a2, a3, th1, th2, th3 - step)
    j13 = (xp - xm) / h2
    j23 = (yp - ym) / h2
    j33 = (zp - zm) / h2
    return j11, j12, j13, j21, j22, j23, j31, j32, j33


def gravity_rhs(a1, a2, a3, m1, m2, m3, gx, gy, gz, th1, th2, th3):
    """Generalized gravity torques (N*mm) on the right-hand side of the EOM.

    Point masses sit at the distal end of each link.
    """
    s1 = math.sin(th1)
    c1 = math.cos(th1)
    s2 = math.sin(th2)
    c2 = math.cos(th2)
    s23 = math.sin(th2 + th3)
    c23 = math.cos(th2 + th3)
    x1p = a1
    x2p = a1 + a2 * c2
    x3p = x2p + a3 * c23
    dx2_2 = -(a2 * s2)
    dz2_2 = -(a2 * c2)
    dx3_2 = dx2_2 - a3 * s23
    dz3_2 = dz2_2 - a3 * c23
    dx3_3 = -(a3 * s23)
    dz3_3 = -(a3 * c23)
    gq = gy * c1 - gx * s1
    gp = gx * c1 + gy * s1
    q1 = (m1 * x1p + m2 * x2p + m3 * x3p) * gq
    q2 = m2 * (dx2_2 * gp + dz2_2 * gz) + m3 * (dx3_2 * gp + dz3_2 * gz)
    q3 = m3 * (dx3_3 * gp + dz3_3 * gz)
    return (
        NMM_PER_KGMM2_S2 * q1,
        NMM_PER_KGMM2_S2 * q2,
        NMM_PER_KGMM2_S2 * q3,
    )


def sim_phase(
    a1, a2, a3, m1, m2, m3, gx, gy, gz,
    i1, i2, i3, b1, b2, b3, k1, k2, k3,
    dt, n_steps,
    th, om,
    cs1, cs2, cs3, ce1, ce2, ce3,
    fx, fy, fz, ex1, ex2, ex3,
    jac_step, speed_limit, t0, rec_stride,
    rec_t, rec_th, rec_om, rec_cmd, rec_pos,
):
    """Integrate one scenario phase with semi-implicit Euler.

    Command ramps linearly from (cs*) to (ce*) over n_steps; tip force
    (fx, fy, fz) and extra joint torque (ex*) are constant.  State arrays
    th, om (length 3) are updated in place; records are written after every
    rec_stride-th step and after the final step, starting at rec_pos.
    Returns (n_recorded, blow_step) with blow_step = -1 when no velocity
    exceeded speed_limit, else the 1-based step index.
    """
    th1 = float(th[0])
    th2 = float(th[1])
    th3 = float(th[2])
    om1 = float(om[0])
    om2 = float(om[1])
    om3 = float(om[2])
    dc1 = ce1 - cs1
    dc2 = ce2 - cs2
    dc3 = ce3 - cs3
    has_tip = fx != 0.0 or fy != 0.0 or fz != 0.0
    h2 = 2.0 * jac_step
    n_rec = 0
    blow = -1
    for i in range(1, n_steps + 1):
        frac = i / n_steps
        cm1 = cs1 + frac * dc1
        cm2 = cs2 + frac * dc2
        cm3 = cs3 + frac * dc3
        tq1 = k1 * (cm1 - th1) + ex1 - b1 * om1
        tq2 = k2 * (cm2 - th2) + ex2 - b2 * om2
        tq3 = k3 * (cm3 - th3) + ex3 - b3 * om3
        tg1, tg2, tg3 = gravity_rhs(
            a1, a2, a3, m1, m2, m3, gx, gy, gz, th1, th2, th3
        )
        tq1 = tq1 + tg1
        tq2 = tq2 + tg2
        tq3 = tq3 + tg3
        if has_tip:
            xp, yp, zp = fingertip(a1, a2, a3, th1 + jac_step, th2, th3)
            xm, ym, zm = fingertip(a1, a2, a3, th1 - jac_step, th2, th3)
            tq1 = tq1 + ((xp - xm) / h2) * fx + ((yp - ym) / h2) * fy + ((zp - zm) / h2) * fz
            xp, yp, zp = fingertip(a1, a2, a3, th1, th2 + jac_step, th3)
            xm, ym, zm = fingertip(a1, a2, a3, th1, th2 - jac_step, th3)
            tq2 = tq2 + ((xp - xm) / h2) * fx + ((yp - ym) / h2) * fy + ((zp - zm) / h2) * fz
            xp, yp, zp = fingertip(a1, a2, a3, th1, th2, th3 + jac_step)
            xm, ym, zm = fingertip(a1, a2, a3, th1, th2, th3 - jac_step)
            tq3 = tq3 + ((xp - xm) / h2) * fx + ((yp - ym) / h2) * fy + ((zp - zm) / h2) * fz
        om1 = om1 + dt * (tq1 / i1)
        om2 = om2 + dt * (tq2 / i2)
        om3 = om3 + dt * (tq3 / i3)
        th1 = th1 + dt * om1
        th2 = th2 + dt * om2
        th3 = th3 + dt * om3
        if (
            math.fabs(om1) > speed_limit
            or math.fabs(om2) > speed_limit
            or math.fabs(om3) > speed_limit
        ):
            blow = i
            break
        if i % rec_stride == 0 or i == n_steps:
            k = rec_pos + n_rec
            rec_t[k] = t0 + i * dt
            rec_th[k, 0] = th1
            rec_th[k, 1] = th2
            rec_th[k, 2] = th3
            rec_om[k, 0] = om1
            rec_om[k, 1] = om2
            rec_om[k, 2] = om3
            rec_cmd[k, 0] = cm1
            rec_cmd[k, 1] = cm2
            rec_cmd[k, 2] = cm3
            n_rec += 1
    th[0] = th1
    th[1] = th2
    th[2] = th3
    om[0] = om1
    om[1] = om2
    om[2] = om3
    return n_rec, blow
