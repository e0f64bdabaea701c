# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled scalar kernels.

Twin of ``pure.py``: same arithmetic, same operation order, so results are
bit-identical across backends (the extension is built with contraction
disabled).  Keep the files in sync when touching either one.
"""

from libc.math cimport sin, cos, sqrt, fabs

NMM_PER_KGMM2_S2 = 1e-3

cdef double _G_SCALE = 1e-3


cdef inline void _lengths_sq(double R, double D1, double D2, double S,
                             double L, bint literal_a, double th1, double th2,
                             double* l1sq, double* l2sq) nogil:
    cdef double s1 = sin(th1)
    cdef double c1 = cos(th1)
    cdef double s2 = sin(th2)
    cdef double c2 = cos(th2)
    cdef double sa
    if literal_a:
        sa = s1
    else:
        sa = s2
    cdef double A = R * (1.0 - c2) + D2 * sa
    cdef double H = D1 + R * s2 + D2 * c2
    cdef double V = 0.5 * L
    cdef double u1 = H * c1 - V * s1 - S
    cdef double w1 = H * s1 + V * c1 - V
    cdef double u2 = H * c1 + V * s1 - S
    cdef double w2 = H * s1 - V * c1 + V
    l1sq[0] = A * A + u1 * u1 + w1 * w1
    l2sq[0] = A * A + u2 * u2 + w2 * w2


cdef inline void _half_jac(double R, double D1, double D2, double S,
                           double L, bint literal_a, double th1, double th2,
                           double* l1sq, double* l2sq,
                           double* m11, double* m12,
                           double* m21, double* m22) nogil:
    cdef double s1 = sin(th1)
    cdef double c1 = cos(th1)
    cdef double s2 = sin(th2)
    cdef double c2 = cos(th2)
    cdef double sa
    if literal_a:
        sa = s1
    else:
        sa = s2
    cdef double A = R * (1.0 - c2) + D2 * sa
    cdef double H = D1 + R * s2 + D2 * c2
    cdef double V = 0.5 * L
    cdef double u1 = H * c1 - V * s1 - S
    cdef double w1 = H * s1 + V * c1 - V
    cdef double u2 = H * c1 + V * s1 - S
    cdef double w2 = H * s1 - V * c1 + V
    l1sq[0] = A * A + u1 * u1 + w1 * w1
    l2sq[0] = A * A + u2 * u2 + w2 * w2
    cdef double dH = R * c2 - D2 * s2
    cdef double dA1
    cdef double dA2
    if literal_a:
        dA1 = D2 * c1
        dA2 = R * s2
    else:
        dA1 = 0.0
        dA2 = R * s2 + D2 * c2
    cdef double du1_1 = -H * s1 - V * c1
    cdef double dw1_1 = H * c1 - V * s1
    cdef double du2_1 = -H * s1 + V * c1
    cdef double dw2_1 = H * c1 + V * s1
    cdef double dg1 = dH * c1
    cdef double dg2 = dH * s1
    m11[0] = A * dA1 + u1 * du1_1 + w1 * dw1_1
    m12[0] = A * dA2 + u1 * dg1 + w1 * dg2
    m21[0] = A * dA1 + u2 * du2_1 + w2 * dw2_1
    m22[0] = A * dA2 + u2 * dg1 + w2 * dg2


cdef inline void _tip(double a1, double a2, double a3,
                      double th1, double th2, double th3,
                      double* x, double* y, double* z) nogil:
    cdef double c2 = cos(th2)
    cdef double s2 = sin(th2)
    cdef double c23 = cos(th2 + th3)
    cdef double s23 = sin(th2 + th3)
    cdef double xp = a1 + a2 * c2 + a3 * c23
    cdef double zp = -(a2 * s2 + a3 * s23)
    cdef double c1 = cos(th1)
    cdef double s1 = sin(th1)
    x[0] = xp * c1
    y[0] = xp * s1
    z[0] = zp


cdef inline void _grav(double a1, double a2, double a3,
                       double m1, double m2, double m3,
                       double gx, double gy, double gz,
                       double th1, double th2, double th3,
                       double* t1, double* t2, double* t3) nogil:
    cdef double s1 = sin(th1)
    cdef double c1 = cos(th1)
    cdef double s2 = sin(th2)
    cdef double c2 = cos(th2)
    cdef double s23 = sin(th2 + th3)
    cdef double c23 = cos(th2 + th3)
    cdef double x1p = a1
    cdef double x2p = a1 + a2 * c2
    cdef double x3p = x2p + a3 * c23
    cdef double dx2_2 = -(a2 * s2)
    cdef double dz2_2 = -(a2 * c2)
    cdef double dx3_2 = dx2_2 - a3 * s23
    cdef double dz3_2 = dz2_2 - a3 * c23
    cdef double dx3_3 = -(a3 * s23)
    cdef double dz3_3 = -(a3 * c23)
    cdef double gq = gy * c1 - gx * s1
    cdef double gp = gx * c1 + gy * s1
    cdef double q1 = (m1 * x1p + m2 * x2p + m3 * x3p) * gq
    cdef double q2 = m2 * (dx2_2 * gp + dz2_2 * gz) + m3 * (dx3_2 * gp + dz3_2 * gz)
    cdef double q3 = m3 * (dx3_3 * gp + dz3_3 * gz)
    t1[0] = _G_SCALE * q1
    t2[0] = _G_SCALE * q2
    t3[0] = _G_SCALE * q3


def dual_offsets(double R, double D1, double D2, double L, bint literal_a,
                 double th1, double th2):
    cdef double c2 = cos(th2)
    cdef double sa
    if literal_a:
        sa = sin(th1)
    else:
        sa = sin(th2)
    cdef double A = R * (1.0 - c2) + D2 * sa
    cdef double H = D1 + R * sin(th2) + D2 * c2
    cdef double V = 0.5 * L
    return A, H, V


def dual_lengths_sq(double R, double D1, double D2, double S, double L,
                    bint literal_a, double th1, double th2):
    cdef double l1sq = 0.0
    cdef double l2sq = 0.0
    _lengths_sq(R, D1, D2, S, L, literal_a, th1, th2, &l1sq, &l2sq)
    return l1sq, l2sq


def dual_jacobian(double R, double D1, double D2, double S, double L,
                  bint literal_a, double th1, double th2):
    cdef double l1sq = 0.0
    cdef double l2sq = 0.0
    cdef double m11 = 0.0
    cdef double m12 = 0.0
    cdef double m21 = 0.0
    cdef double m22 = 0.0
    _half_jac(R, D1, D2, S, L, literal_a, th1, th2,
              &l1sq, &l2sq, &m11, &m12, &m21, &m22)
    if l1sq <= 0.0 or l2sq <= 0.0:
        raise ValueError("zero actuator length")
    cdef double l1 = sqrt(l1sq)
    cdef double l2 = sqrt(l2sq)
    return l1, l2, m11 / l1, m12 / l1, m21 / l2, m22 / l2


def single_length(double R, double D3, double D4, double th3):
    cdef double s3 = sin(th3)
    cdef double c3 = cos(th3)
    cdef double H3 = D3 + R * s3 + D4 * c3
    cdef double V3 = R * (1.0 - c3) + D4 * s3
    return sqrt(H3 * H3 + V3 * V3)


def single_derivative(double R, double D3, double D4, double th3):
    cdef double s3 = sin(th3)
    cdef double c3 = cos(th3)
    cdef double H3 = D3 + R * s3 + D4 * c3
    cdef double V3 = R * (1.0 - c3) + D4 * s3
    cdef double l3sq = H3 * H3 + V3 * V3
    if l3sq <= 0.0:
        raise ValueError("zero actuator length")
    cdef double l3 = sqrt(l3sq)
    cdef double dH3 = R * c3 - D4 * s3
    cdef double dV3 = R * s3 + D4 * c3
    return l3, (H3 * dH3 + V3 * dV3) / l3


def dual_inverse(double R, double D1, double D2, double S, double L,
                 bint literal_a, double l1t, double l2t,
                 double th1, double th2, double tol, int max_iter):
    cdef double t1sq = l1t * l1t
    cdef double t2sq = l2t * l2t
    cdef double scale = t1sq + t2sq
    if scale < 1.0:
        scale = 1.0
    cdef double tol_eff = tol * scale
    cdef double l1sq = 0.0
    cdef double l2sq = 0.0
    _lengths_sq(R, D1, D2, S, L, literal_a, th1, th2, &l1sq, &l2sq)
    cdef double r1 = l1sq - t1sq
    cdef double r2 = l2sq - t2sq
    cdef double rn = r1 * r1 + r2 * r2
    cdef double a1, a2, resid, det, d1, d2, alpha
    cdef double m11 = 0.0
    cdef double m12 = 0.0
    cdef double m21 = 0.0
    cdef double m22 = 0.0
    cdef double ign1 = 0.0
    cdef double ign2 = 0.0
    cdef double n1, n2, nr1, nr2, nrn, c1, c2, cl1sq, cl2sq, cr1, cr2, crn
    cdef bint improved
    cdef int it, k
    for it in range(1, max_iter + 1):
        a1 = fabs(r1)
        a2 = fabs(r2)
        resid = a1 if a1 > a2 else a2
        if resid <= tol_eff:
            return th1, th2, resid, it - 1, 0
        _half_jac(R, D1, D2, S, L, literal_a, th1, th2,
                  &ign1, &ign2, &m11, &m12, &m21, &m22)
        det = m11 * m22 - m12 * m21
        if fabs(det) < 1e-300:
            return th1, th2, resid, it - 1, 2
        d1 = -(m22 * r1 - m12 * r2) / (2.0 * det)
        d2 = -(m11 * r2 - m21 * r1) / (2.0 * det)
        alpha = 1.0
        improved = 0
        n1 = th1
        n2 = th2
        nr1 = r1
        nr2 = r2
        nrn = rn
        for k in range(40):
            c1 = th1 + alpha * d1
            c2 = th2 + alpha * d2
            cl1sq = 0.0
            cl2sq = 0.0
            _lengths_sq(R, D1, D2, S, L, literal_a, c1, c2, &cl1sq, &cl2sq)
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
    a1 = fabs(r1)
    a2 = fabs(r2)
    resid = a1 if a1 > a2 else a2
    if resid <= tol_eff:
        return th1, th2, resid, max_iter, 0
    return th1, th2, resid, max_iter, 1


def single_inverse(double R, double D3, double D4, double target,
                   double lo, double hi, double tol, int max_iter):
    cdef double ascale = fabs(target)
    if ascale < 1.0:
        ascale = 1.0
    cdef double tol_eff = tol * ascale
    cdef double flo = single_length(R, D3, D4, lo) - target
    cdef double fhi = single_length(R, D3, D4, hi) - target
    if flo == 0.0:
        return lo, 0.0, 0
    if fhi == 0.0:
        return hi, 0.0, 0
    if (flo > 0.0) == (fhi > 0.0):
        return 0.0, 0.0, 3
    cdef double a = lo
    cdef double b = hi
    cdef double fa = flo
    cdef double th = 0.5 * (a + b)
    cdef double f = 0.0
    cdef double l3, dl3, cand
    cdef double s3, c3, H3, V3, l3sq
    cdef int i
    for i in range(max_iter):
        s3 = sin(th)
        c3 = cos(th)
        H3 = D3 + R * s3 + D4 * c3
        V3 = R * (1.0 - c3) + D4 * s3
        l3sq = H3 * H3 + V3 * V3
        if l3sq <= 0.0:
            raise ValueError("zero actuator length")
        l3 = sqrt(l3sq)
        dl3 = (H3 * (R * c3 - D4 * s3) + V3 * (R * s3 + D4 * c3)) / l3
        f = l3 - target
        if fabs(f) <= tol_eff:
            return th, fabs(f), 0
        if (f > 0.0) == (fa > 0.0):
            a = th
            fa = f
        else:
            b = th
        if b - a <= 1e-15:
            return th, fabs(f), 0
        if dl3 != 0.0:
            cand = th - f / dl3
        else:
            cand = 0.5 * (a + b)
        if cand <= a or cand >= b:
            cand = 0.5 * (a + b)
        th = cand
    return th, fabs(f), 1


def det_grid(double R, double D1, double D2, double S, double L,
             bint literal_a, double[::1] th1s, double[::1] th2s,
             double[:, ::1] out):
    cdef Py_ssize_t n1 = th1s.shape[0]
    cdef Py_ssize_t n2 = th2s.shape[0]
    cdef Py_ssize_t i, j
    cdef double th1, th2, l1, l2, j11, j12, j21, j22, det
    cdef double l1sq = 0.0
    cdef double l2sq = 0.0
    cdef double m11 = 0.0
    cdef double m12 = 0.0
    cdef double m21 = 0.0
    cdef double m22 = 0.0
    with nogil:
        for i in range(n1):
            th1 = th1s[i]
            for j in range(n2):
                th2 = th2s[j]
                _half_jac(R, D1, D2, S, L, literal_a, th1, th2,
                          &l1sq, &l2sq, &m11, &m12, &m21, &m22)
                if l1sq <= 0.0 or l2sq <= 0.0:
                    out[i, j] = -1.0
                    continue
                l1 = sqrt(l1sq)
                l2 = sqrt(l2sq)
                j11 = m11 / l1
                j12 = m12 / l1
                j21 = m21 / l2
                j22 = m22 / l2
                det = j11 * j22 - j12 * j21
                out[i, j] = fabs(det)


def fingertip(double a1, double a2, double a3,
              double th1, double th2, double th3):
    cdef double x = 0.0
    cdef double y = 0.0
    cdef double z = 0.0
    _tip(a1, a2, a3, th1, th2, th3, &x, &y, &z)
    return x, y, z


def task_jacobian_fd(double a1, double a2, double a3,
                     double th1, double th2, double th3, double step):
    cdef double h2 = 2.0 * step
    cdef double xp = 0.0, yp = 0.0, zp = 0.0
    cdef double xm = 0.0, ym = 0.0, zm = 0.0
    cdef double j11, j12, j13, j21, j22, j23, j31, j32, j33
    _tip(a1, a2, a3, th1 + step, th2, th3, &xp, &yp, &zp)
    _tip(a1, a2, a3, th1 - step, th2, th3, &xm, &ym, &zm)
    j11 = (xp - xm) / h2
    j21 = (yp - ym) / h2
    j31 = (zp - zm) / h2
    _tip(a1, a2, a3, th1, th2 + step, th3, &xp, &yp, &zp)
    _tip(a1, a2, a3, th1, th2 - step, th3, &xm, &ym, &zm)
    j12 = (xp - xm) / h2
    j22 = (yp - ym) / h2
    j32 = (zp - zm) / h2
    _tip(a1, a2, a3, th1, th2, th3 + step, &xp, &yp, &zp)
    _tip(a1, a2, a3, th1, th2, th3 - step, &xm, &ym, &zm)
    j13 = (xp - xm) / h2
    j23 = (yp - ym) / h2
    j33 = (zp - zm) / h2
    return j11, j12, j13, j21, j22, j23, j31, j32, j33


def gravity_rhs(double a1, double a2, double a3,
                double m1, double m2, double m3,
                double gx, double gy, double gz,
                double th1, double th2, double th3):
    cdef double t1 = 0.0
    cdef double t2 = 0.0
    cdef double t3 = 0.0
    _grav(a1, a2, a3, m1, m2, m3, gx, gy, gz, th1, th2, th3, &t1, &t2, &t3)
    return t1, t2, t3


def sim_phase(double a1, double a2, double a3,
              double m1, double m2, double m3,
              double gx, double gy, double gz,
              double i1, double i2, double i3,
              double b1, double b2, double b3,
              double k1, double k2, double k3,
              double dt, long n_steps,
              double[::1] th, double[::1] om,
              double cs1, double cs2, double cs3,
              double ce1, double ce2, double ce3,
              double fx, double fy, double fz,
              double ex1, double ex2, double ex3,
              double jac_step, double speed_limit, double t0, long rec_stride,
              double[::1] rec_t, double[:, ::1] rec_th,
              double[:, ::1] rec_om, double[:, ::1] rec_cmd, long rec_pos):
    cdef double th1 = th[0]
    cdef double th2 = th[1]
    cdef double th3 = th[2]
    cdef double om1 = om[0]
    cdef double om2 = om[1]
    cdef double om3 = om[2]
    cdef double dc1 = ce1 - cs1
    cdef double dc2 = ce2 - cs2
    cdef double dc3 = ce3 - cs3
    cdef bint has_tip = fx != 0.0 or fy != 0.0 or fz != 0.0
    cdef double h2 = 2.0 * jac_step
    cdef long n_rec = 0
    cdef long blow = -1
    cdef long i, k
    cdef double frac, cm1, cm2, cm3, tq1, tq2, tq3
    cdef double tg1 = 0.0
    cdef double tg2 = 0.0
    cdef double tg3 = 0.0
    cdef double xp = 0.0, yp = 0.0, zp = 0.0
    cdef double xm = 0.0, ym = 0.0, zm = 0.0
    with nogil:
        for i in range(1, n_steps + 1):
            frac = (<double> i) / (<double> n_steps)
            cm1 = cs1 + frac * dc1
            cm2 = cs2 + frac * dc2
            cm3 = cs3 + frac * dc3
            tq1 = k1 * (cm1 - th1) + ex1 - b1 * om1
            tq2 = k2 * (cm2 - th2) + ex2 - b2 * om2
            tq3 = k3 * (cm3 - th3) + ex3 - b3 * om3
            _grav(a1, a2, a3, m1, m2, m3, gx, gy, gz, th1, th2, th3,
                  &tg1, &tg2, &tg3)
            tq1 = tq1 + tg1
            tq2 = tq2 + tg2
            tq3 = tq3 + tg3
            if has_tip:
                _tip(a1, a2, a3, th1 + jac_step, th2, th3, &xp, &yp, &zp)
                _tip(a1, a2, a3, th1 - jac_step, th2, th3, &xm, &ym, &zm)
                tq1 = tq1 + ((xp - xm) / h2) * fx + ((yp - ym) / h2) * fy + ((zp - zm) / h2) * fz
                _tip(a1, a2, a3, th1, th2 + jac_step, th3, &xp, &yp, &zp)
                _tip(a1, a2, a3, th1, th2 - jac_step, th3, &xm, &ym, &zm)
                tq2 = tq2 + ((xp - xm) / h2) * fx + ((yp - ym) / h2) * fy + ((zp - zm) / h2) * fz
                _tip(a1, a2, a3, th1, th2, th3 + jac_step, &xp, &yp, &zp)
                _tip(a1, a2, a3, th1, th2, th3 - jac_step, &xm, &ym, &zm)
                tq3 = tq3 + ((xp - xm) / h2) * fx + ((yp - ym) / h2) * fy + ((zp - zm) / h2) * fz
            om1 = om1 + dt * (tq1 / i1)
            om2 = om2 + dt * (tq2 / i2)
            om3 = om3 + dt * (tq3 / i3)
            th1 = th1 + dt * om1
            th2 = th2 + dt * om2
            th3 = th3 + dt * om3
            if fabs(om1) > speed_limit or fabs(om2) > speed_limit or fabs(om3) > speed_limit:
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
