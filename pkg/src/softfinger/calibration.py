"""Affine calibration between piston positions and actuator lengths.

Driving a hydraulic actuator from a syringe pump makes its length an
affine function of the piston position Q: l = k*Q + b with k < 0, since
withdrawing liquid (larger Q) shortens the actuator.  This module fits
those coefficients from measured joint angles, generates synthetic
datasets that mimic the measurement protocol, and reports fit quality.
"""

import dataclasses
import math

import numpy as np

from softfinger import csvio, errors, kinematics

DATASET_CSV_HEADER = (
    "Q1_mm", "Q2_mm", "Q3_mm", "theta1_deg", "theta2_deg", "theta3_deg",
)


@dataclasses.dataclass(frozen=True)
class CalibrationSample:
    """One measurement: piston positions (mm) and joint angles (radians)."""

    q1: float
    q2: float
    q3: float
    theta1: float
    theta2: float
    theta3: float


@dataclasses.dataclass(frozen=True)
class AffineFit:
    """Least-squares line y = k*x + b with coefficient of determination."""

    k: float
    b: float
    r2: float


@dataclasses.dataclass(frozen=True)
class ActuatorReport:
    fit: AffineFit
    rmse_mm: float
    max_residual_mm: float


@dataclasses.dataclass(frozen=True)
class CalibrationReport:
    """Per-actuator fits for (Q1, l1), (Q2, l2), (Q3, l3)."""

    actuators: tuple
    warnings: tuple
    n_samples: int

    def to_dict(self) -> dict:
        out = {"n_samples": self.n_samples, "warnings": list(self.warnings)}
        for name, rep in zip(("l1", "l2", "l3"), self.actuators):
            out[name] = {
                "k": rep.fit.k,
                "b": rep.fit.b,
                "r2": rep.fit.r2,
                "rmse_mm": rep.rmse_mm,
                "max_residual_mm": rep.max_residual_mm,
            }
        return out


def fit_affine(x, y) -> AffineFit:
    """Ordinary least squares y = k*x + b.

    Raises DegenerateFit when x carries no variation, ConfigError on
    fewer than 2 points or mismatched lengths.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.ndim != 1 or ys.ndim != 1 or xs.shape != ys.shape:
        raise errors.DimensionMismatch("x and y must be 1-d and the same length")
    n = xs.size
    if n < 2:
        raise errors.ConfigError("affine fit needs at least 2 points")
    if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
        raise errors.ConfigError("fit input contains non-finite values")
    xm = xs.mean()
    ym = ys.mean()
    dx = xs - xm
    dy = ys - ym
    sxx = float(dx @ dx)
    if sxx <= 0.0:
        raise errors.DegenerateFit("all x values are equal")
    k = float(dx @ dy) / sxx
    b = ym - k * xm
    res = ys - (k * xs + b)
    ssres = float(res @ res)
    sstot = float(dy @ dy)
    if sstot > 0.0:
        r2 = 1.0 - ssres / sstot
        if r2 < 0.0:
            r2 = 0.0
    else:
        # flat data fitted by a flat line
        r2 = 1.0
    return AffineFit(k=k, b=float(b), r2=r2)


def expected_lengths(geom, sample: CalibrationSample):
    """Model-implied actuator lengths (l1e, l2e, l3e) at the sample's angles."""
    l1e, l2e = kinematics.paired_lengths(geom, sample.theta1, sample.theta2)
    l3e = kinematics.tip_length(geom, sample.theta3)
    return l1e, l2e, l3e


def _columns(geom, samples):
    n = len(samples)
    q = np.empty((3, n))
    le = np.empty((3, n))
    for i, s in enumerate(samples):
        q[0, i] = s.q1
        q[1, i] = s.q2
        q[2, i] = s.q3
        le[0, i], le[1, i], le[2, i] = expected_lengths(geom, s)
    return q, le


def validate_dataset(geom, samples) -> CalibrationReport:
    """Fit all three (Q_i, l_ie) pairs and summarize fit quality.

    Positive slopes are reported as warnings, not errors: they indicate a
    reversed plumbing convention rather than a bad fit.
    """
    if len(samples) < 2:
        raise errors.ConfigError("dataset needs at least 2 samples")
    q, le = _columns(geom, samples)
    reports = []
    warnings = []
    for i in range(3):
        fit = fit_affine(q[i], le[i])
        res = le[i] - (fit.k * q[i] + fit.b)
        rmse = float(np.sqrt(np.mean(res * res)))
        reports.append(
            ActuatorReport(
                fit=fit,
                rmse_mm=rmse,
                max_residual_mm=float(np.max(np.abs(res))),
            )
        )
        if fit.k > 0.0:
            warnings.append(
                f"actuator {i + 1}: slope {fit.k:.4g} mm/mm is positive; "
                "withdrawing liquid normally shortens the actuator"
            )
    return CalibrationReport(
        actuators=tuple(reports),
        warnings=tuple(warnings),
        n_samples=len(samples),
    )


def synthetic_dataset(
    geom,
    n: int = 200,
    noise_deg: float = 0.3,
    seed: int = 0,
    slopes=(-0.8, -0.8, -0.8),
    intercepts=(70.0, 70.0, 70.0),
):
    """Generate samples mimicking the measurement protocol.

    True joint angles are drawn uniformly inside the travel limits, exact
    piston positions are back-computed from l = k*Q + b, and the reported
    angles get Gaussian noise of noise_deg degrees, as a joint-angle
    tracker would produce.
    """
    if n < 2:
        raise errors.ConfigError("need at least 2 samples")
    if any(k == 0.0 or not math.isfinite(k) for k in slopes):
        raise errors.ConfigError("slopes must be nonzero and finite")
    if noise_deg < 0.0:
        raise errors.ConfigError("noise_deg must be >= 0")
    rng = np.random.default_rng(seed)
    lim = geom.limit_rad
    true_angles = rng.uniform(-lim, lim, size=(n, 3))
    sigma = math.radians(noise_deg)
    noise = rng.normal(0.0, sigma, size=(n, 3)) if sigma > 0.0 else np.zeros((n, 3))
    samples = []
    for i in range(n):
        t1, t2, t3 = true_angles[i]
        l1, l2 = kinematics.paired_lengths(geom, t1, t2)
        l3 = kinematics.tip_length(geom, t3)
        qs = [
            (l - b) / k
            for l, k, b in zip((l1, l2, l3), slopes, intercepts)
        ]
        samples.append(
            CalibrationSample(
                q1=qs[0], q2=qs[1], q3=qs[2],
                theta1=t1 + noise[i, 0],
                theta2=t2 + noise[i, 1],
                theta3=t3 + noise[i, 2],
            )
        )
    return samples


def load_dataset(path):
    """Read samples from CSV (angles in degrees on disk, radians in memory)."""
    rows = csvio.read_float_table(path, DATASET_CSV_HEADER)
    samples = []
    for row in rows:
        if not all(math.isfinite(v) for v in row):
            raise errors.ConfigError(f"{path}: non-finite value in dataset")
        samples.append(
            CalibrationSample(
                q1=row[0], q2=row[1], q3=row[2],
                theta1=math.radians(row[3]),
                theta2=math.radians(row[4]),
                theta3=math.radians(row[5]),
            )
        )
    return samples


def save_dataset(samples, path) -> None:
    rows = (
        (
            s.q1, s.q2, s.q3,
            math.degrees(s.theta1), math.degrees(s.theta2), math.degrees(s.theta3),
        )
        for s in samples
    )
    csvio.write_rows(path, DATASET_CSV_HEADER, rows)
