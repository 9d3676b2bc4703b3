"""Per-pixel scalar illumination: ramped diffuse and specular terms.

The eye is fixed at I = (0, 0, 1) pipeline-wide; there is no camera
model. All functions broadcast over numpy arrays, with vectors on a
trailing axis of size 3.
"""

from dataclasses import dataclass

import numpy as np

STEP_TYPES = ("linear", "smooth-step", "smoother-step")


@dataclass(frozen=True)
class RampParams:
    """Clamp&Step ramp: zero below t0, one above t1, shaped in between.

    t0 == t1 is allowed and acts as a hard threshold (cartoon shading).
    """

    t0: float = 0.0
    t1: float = 1.0
    step: str = "linear"

    def __post_init__(self):
        if self.step not in STEP_TYPES:
            raise ValueError(f"step must be one of {STEP_TYPES}, got {self.step!r}")
        if not (np.isfinite(self.t0) and np.isfinite(self.t1)):
            raise ValueError("ramp bounds must be finite")
        if self.t1 < self.t0:
            raise ValueError(f"ramp needs t0 <= t1, got t0={self.t0}, t1={self.t1}")


IDENTITY_RAMP = RampParams(0.0, 1.0, "linear")


@dataclass(frozen=True)
class LightSpec:
    """Directional or point light with an RGB color in [0, 1]^3.

    Directional lights store the unit vector pointing *toward* the light;
    point lights store a position in scene units (canvas = unit square in
    z = 0, lights usually sit at z > 0 in front of it).
    """

    kind: str
    direction: tuple = None
    position: tuple = None
    color: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if self.kind not in ("directional", "point"):
            raise ValueError(f"light kind must be 'directional' or 'point', got {self.kind!r}")
        col = np.asarray(self.color, dtype=np.float64)
        if col.shape != (3,) or (col < 0).any() or (col > 1).any():
            raise ValueError(f"light color must be 3 components in [0,1], got {self.color}")
        object.__setattr__(self, "color", tuple(float(c) for c in col))
        if self.kind == "directional":
            if self.direction is None:
                raise ValueError("directional light needs a direction")
            d = np.asarray(self.direction, dtype=np.float64)
            if d.shape != (3,) or abs(np.linalg.norm(d) - 1.0) > 1e-6:
                raise ValueError(f"directional light direction must be a unit 3-vector, got {self.direction}")
            object.__setattr__(self, "direction", tuple(float(c) for c in d))
        else:
            if self.position is None:
                raise ValueError("point light needs a position")
            p = np.asarray(self.position, dtype=np.float64)
            if p.shape != (3,) or not np.isfinite(p).all():
                raise ValueError(f"point light position must be a finite 3-vector, got {self.position}")
            object.__setattr__(self, "position", tuple(float(c) for c in p))


def clamp_and_step(t, p):
    """clamp((t - t0) / (t1 - t0), 0, 1), optionally smooth/smoother shaped.

    smooth-step applies 3u^2 - 2u^3, smoother-step 6u^5 - 15u^4 + 10u^3.
    When t0 == t1 this degenerates to a hard threshold at that value.
    Accepts scalars or arrays.
    """
    t = np.asarray(t)
    if p.t0 == p.t1:
        u = np.where(t >= p.t0, 1.0, 0.0)
    else:
        u = np.clip((t - p.t0) / (p.t1 - p.t0), 0.0, 1.0)
    if p.step == "smooth-step":
        u = u * u * (3.0 - 2.0 * u)
    elif p.step == "smoother-step":
        u = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    return float(u) if u.ndim == 0 else u


def light_direction(light, P):
    """Unit vector from shading position(s) P toward the light.

    P has shape (..., 3). Directional lights broadcast their fixed
    direction; point lights normalize (P_L - P) and refuse positions
    coincident with the shading point.
    """
    P = np.asarray(P, dtype=np.float64)
    if light.kind == "directional":
        d = np.asarray(light.direction, dtype=np.float64)
        return np.broadcast_to(d, P.shape).copy() if P.ndim > 1 else d
    delta = np.asarray(light.position, dtype=np.float64) - P
    norm = np.linalg.norm(delta, axis=-1, keepdims=True)
    if (norm < 1e-9).any():
        raise ValueError("point light coincides with a shading point")
    return delta / norm


def diffuse_term(N, L, p):
    """Ramped N . L. Both inputs unit vectors (broadcasting over (..., 3))."""
    N = np.asarray(N, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    return clamp_and_step((N * L).sum(axis=-1), p)


def specular_raw(N, L):
    """R_L . I with R_L = -L + 2(L.N)N and the eye at (0,0,1).

    Expands to 2 (L.N) N.z - L.z.
    """
    N = np.asarray(N, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    return 2.0 * (N * L).sum(axis=-1) * N[..., 2] - L[..., 2]


def specular_term(N, L, p):
    """Ramped specular highlight term."""
    return clamp_and_step(specular_raw(N, L), p)
