"""Finger geometry: the constants that define one soft-rigid module.

All lengths are millimetres.  Joint travel limits live here in degrees
(the file-format unit); everything downstream converts to radians.
"""

import dataclasses
import json
import math
from importlib import resources

from softfinger import errors
from softfinger._kernels import kernels

_A_VARIANTS = ("pitch", "yaw")


@dataclasses.dataclass(frozen=True)
class FingerGeometry:
    """Geometric constants of one finger module.

    r_bend        effective bending radius of a soft joint segment
    d1, d2        mount offsets of the paired base actuators: distance from
                  the joint centre to the attachment plate, and the plate's
                  forward lip
    d3, d4        the same two offsets for the fingertip actuator
    s_mount       longitudinal offset of the fixed anchor points
    spacing       lateral separation between the paired anchors
    link_lengths  rigid link lengths of the yaw-pitch-pitch chain, base first
    limit_deg     symmetric joint travel limit, degrees
    a_variant     which joint angle drives the out-of-plane anchor offset:
                  "pitch" (symmetric pair, the default) or "yaw"
    """

    r_bend: float = 11.5
    d1: float = 38.0
    d2: float = 4.5
    d3: float = 36.0
    d4: float = 4.5
    s_mount: float = 6.0
    spacing: float = 14.0
    link_lengths: tuple = (30.0, 25.0, 20.0)
    limit_deg: float = 20.0
    a_variant: str = "pitch"

    def __post_init__(self):
        object.__setattr__(self, "link_lengths", tuple(float(v) for v in self.link_lengths))
        self._validate()

    def _validate(self):
        for name in ("r_bend", "d1", "d3", "spacing"):
            if not _finite_positive(getattr(self, name)):
                raise errors.DegenerateGeometry(f"{name} must be finite and > 0")
        for name in ("d2", "d4", "s_mount"):
            v = getattr(self, name)
            if not (_finite(v) and v >= 0.0):
                raise errors.DegenerateGeometry(f"{name} must be finite and >= 0")
        if len(self.link_lengths) != 3 or not all(_finite_positive(v) for v in self.link_lengths):
            raise errors.DegenerateGeometry("link_lengths must be three positive lengths")
        if not (_finite(self.limit_deg) and 0.0 < self.limit_deg < 90.0):
            raise errors.DegenerateGeometry("limit_deg must lie in (0, 90)")
        if self.a_variant not in _A_VARIANTS:
            raise errors.ConfigError(
                f"a_variant must be one of {_A_VARIANTS}, got {self.a_variant!r}"
            )
        self._check_actuators()

    def _check_actuators(self):
        lim = self.limit_rad
        lit = self.a_variant == "yaw"
        # paired actuators must keep positive length over the whole box
        for i in range(-4, 5):
            for j in range(-4, 5):
                l1sq, l2sq = kernels.dual_lengths_sq(
                    self.r_bend, self.d1, self.d2, self.s_mount, self.spacing,
                    lit, lim * (i / 4.0), lim * (j / 4.0),
                )
                if l1sq <= 0.0 or l2sq <= 0.0:
                    raise errors.DegenerateGeometry(
                        "paired actuator length vanishes inside the travel box"
                    )
        # fingertip length-angle map must be strictly increasing so it can
        # be inverted
        n = 180
        prev = kernels.single_length(self.r_bend, self.d3, self.d4, -lim)
        for i in range(1, n + 1):
            cur = kernels.single_length(
                self.r_bend, self.d3, self.d4, -lim + (2.0 * lim) * (i / n)
            )
            if not cur > prev:
                raise errors.NonMonotonicMap(
                    "fingertip actuator length is not strictly increasing "
                    "over the travel range"
                )
            prev = cur

    @property
    def limit_rad(self) -> float:
        return math.radians(self.limit_deg)

    def scaled(self, factor: float) -> "FingerGeometry":
        """Uniformly scale every length by factor; angles are unchanged."""
        if not _finite_positive(factor):
            raise errors.ConfigError("scale factor must be finite and > 0")
        return dataclasses.replace(
            self,
            r_bend=self.r_bend * factor,
            d1=self.d1 * factor,
            d2=self.d2 * factor,
            d3=self.d3 * factor,
            d4=self.d4 * factor,
            s_mount=self.s_mount * factor,
            spacing=self.spacing * factor,
            link_lengths=tuple(v * factor for v in self.link_lengths),
        )

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["link_lengths"] = list(self.link_lengths)
        return d


def _finite(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _finite_positive(v) -> bool:
    return _finite(v) and v > 0.0


def geometry_from_dict(raw: dict) -> FingerGeometry:
    """Build a FingerGeometry from parsed JSON, rejecting unknown keys."""
    if not isinstance(raw, dict):
        raise errors.ConfigError("geometry config must be a JSON object")
    known = {f.name for f in dataclasses.fields(FingerGeometry)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise errors.ConfigError(f"unknown geometry keys: {', '.join(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        if key == "a_variant":
            if not isinstance(value, str):
                raise errors.ConfigError("a_variant must be a string")
            kwargs[key] = value
        elif key == "link_lengths":
            if not isinstance(value, list) or len(value) != 3:
                raise errors.ConfigError("link_lengths must be a list of three numbers")
            for v in value:
                if not _finite(v):
                    raise errors.ConfigError("link_lengths must be a list of three numbers")
            kwargs[key] = tuple(float(v) for v in value)
        else:
            if not _finite(value):
                raise errors.ConfigError(f"{key} must be a finite number")
            kwargs[key] = float(value)
    return FingerGeometry(**kwargs)


def load_geometry(path) -> FingerGeometry:
    """Load a geometry JSON file; bad syntax or bad values raise ConfigError
    subclasses."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise errors.ConfigError(f"cannot read geometry file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise errors.ConfigError(f"geometry file is not valid JSON: {exc}") from exc
    return geometry_from_dict(raw)


def save_geometry(geom: FingerGeometry, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(geom.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def reference_geometry() -> FingerGeometry:
    """The packaged reference module used by the CLI defaults and tests."""
    raw = json.loads(
        resources.files("softfinger.data").joinpath("reference_finger.json").read_text()
    )
    return geometry_from_dict(raw)
