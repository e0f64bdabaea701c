"""Isothermal ideal-gas actuation model.

A sealed gas chamber's volume varies affinely with actuator length l,
so pressure follows P(l) = nRT / (V0_gas + alpha*(l - l_ref)) and the
output force is beta*P.  Stiffness falls out as the analytic derivative
of that force, which is what makes the actuator's stiffness variable.
"""

import dataclasses
import json
import math

import numpy as np

from softfinger import errors


@dataclasses.dataclass(frozen=True)
class PneumaticModel:
    """Gas actuator constants.

    nRT     gas amount aggregate at working temperature, N*mm
    V0_gas  chamber volume at l = l_ref, mm^3
    alpha   volume gain per unit length, mm^2
    beta    force per unit pressure, mm^2
    l_ref   actuator length at which the volume equals V0_gas, mm
    """

    nRT: float = 750.0
    V0_gas: float = 5000.0
    alpha: float = 80.0
    beta: float = 50.0
    l_ref: float = 0.0

    def __post_init__(self):
        for name in ("nRT", "V0_gas", "beta"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0.0):
                raise errors.ConfigError(f"pneumatic {name} must be finite and > 0")
        for name in ("alpha", "l_ref"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise errors.ConfigError(f"pneumatic {name} must be finite")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def model_from_dict(raw: dict) -> PneumaticModel:
    if not isinstance(raw, dict):
        raise errors.ConfigError("pneumatic config must be a JSON object")
    known = {f.name for f in dataclasses.fields(PneumaticModel)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise errors.ConfigError(f"unknown pneumatic keys: {', '.join(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise errors.ConfigError(f"pneumatic {key} must be a number")
        kwargs[key] = float(value)
    return PneumaticModel(**kwargs)


def load_model(path) -> PneumaticModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise errors.ConfigError(f"cannot read pneumatic file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise errors.ConfigError(f"pneumatic file is not valid JSON: {exc}") from exc
    return model_from_dict(raw)


def _volume(model: PneumaticModel, l: float) -> float:
    return model.V0_gas + model.alpha * (l - model.l_ref)


def gas_pressure(model: PneumaticModel, l: float) -> float:
    """Chamber pressure at actuator length l, MPa."""
    vol = _volume(model, l)
    if vol <= 0.0:
        raise errors.NonPhysicalState(
            f"gas volume {vol:.6g} mm^3 is non-positive at l = {l:.6g} mm"
        )
    return model.nRT / vol


def gas_force(model: PneumaticModel, l: float) -> float:
    """Output force beta * P(l), N."""
    return model.beta * gas_pressure(model, l)


def gas_tangent_stiffness(model: PneumaticModel, l: float) -> float:
    """df/dl, N/mm: -beta*nRT*alpha / (V0_gas + alpha*(l - l_ref))^2."""
    vol = _volume(model, l)
    if vol <= 0.0:
        raise errors.NonPhysicalState(
            f"gas volume {vol:.6g} mm^3 is non-positive at l = {l:.6g} mm"
        )
    return -model.beta * model.nRT * model.alpha / (vol * vol)


def gas_joint_torque(J, forces) -> np.ndarray:
    """Joint torques tau = J^T f for actuator forces f."""
    jm = np.asarray(J, dtype=float)
    fv = np.asarray(forces, dtype=float)
    if jm.ndim != 2:
        raise errors.DimensionMismatch("actuator Jacobian must be a matrix")
    if fv.shape != (jm.shape[0],):
        raise errors.DimensionMismatch(
            f"force vector length {fv.shape} does not match Jacobian rows {jm.shape[0]}"
        )
    return jm.T @ fv
