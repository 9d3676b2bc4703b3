"""Reflection/refraction image warps and Fresnel terms.

The eye ray is fixed at I = (0, 0, 1). Mirror regions sample a foreground
(environment) image held a distance d_env in front of the canvas along
the reflected ray; transparent regions sample a background image held
d_bg behind the canvas along the transmitted ray. Both warps reduce to a
plane-to-plane offset Delta = distance * (D.x / D.z, D.y / D.z) and a
wrapped bilinear lookup.

Transmission comes in two flavors: the physical Snell vector (with total
internal reflection signaled, not failed), and an art-directed linearized
version steered by mu = log2(eta) in [-1, 1] that bends the undeflected
continuation V = (0, 0, -1) toward -N (mu > 0) or toward the tangent
plane (mu < 0). Fresnel likewise: the s/p-polarized dielectric average,
or a piecewise-linear curve with two control points and a blend slider
running from total refraction (-1) to total reflection (+1).
"""

from dataclasses import dataclass

import numpy as np

from .image import Image, gaussian_blur, sample_wrapped_field

REFRACTION_MODES = ("physical", "artistic")
FRESNEL_MODES = ("physical", "artistic", "fixed")

GRAZE_EPS = 1e-4


class DegenerateDirectionError(ValueError):
    """The art-directed transmission formula produced a zero vector."""


@dataclass(frozen=True)
class OpticsParams:
    """Refraction/reflection controls shared by the warp operations."""

    eta: float = 1.5
    mu: float = 0.0
    refraction_mode: str = "physical"
    d_env: float = 0.1
    d_bg: float = 0.1
    max_offset: float | None = None  # pixels; None means width / 4 of the sampled image

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if not (-1.0 <= self.mu <= 1.0):
            raise ValueError(f"mu must be in [-1, 1], got {self.mu}")
        if self.refraction_mode not in REFRACTION_MODES:
            raise ValueError(f"refraction_mode must be one of {REFRACTION_MODES}, got {self.refraction_mode!r}")
        if self.d_env <= 0 or self.d_bg <= 0:
            raise ValueError(f"plane distances must be > 0, got d_env={self.d_env}, d_bg={self.d_bg}")
        if self.max_offset is not None and self.max_offset < 0:
            raise ValueError(f"max_offset must be >= 0, got {self.max_offset}")


@dataclass(frozen=True)
class FresnelParams:
    """Reflection/refraction mixing weight controls.

    x0 is the sin(theta) position of total refraction, x1 (> x0) the
    position of the equal mix; blend slides the whole curve between total
    refraction (-1) and total reflection (+1).
    """

    mode: str = "physical"
    fixed_f: float = 0.5
    sp_weight: float = 0.5
    x0: float = 0.3
    x1: float = 0.8
    blend: float = 0.0

    def __post_init__(self):
        if self.mode not in FRESNEL_MODES:
            raise ValueError(f"fresnel mode must be one of {FRESNEL_MODES}, got {self.mode!r}")
        if not (0.0 <= self.fixed_f <= 1.0):
            raise ValueError(f"fixed_f must be in [0, 1], got {self.fixed_f}")
        if not (0.0 <= self.sp_weight <= 1.0):
            raise ValueError(f"sp_weight must be in [0, 1], got {self.sp_weight}")
        if not (0.0 <= self.x0 < 1.0):
            raise ValueError(f"x0 must be in [0, 1), got {self.x0}")
        if not (self.x0 < self.x1 <= 1.0):
            raise ValueError(f"need x0 < x1 <= 1, got x0={self.x0}, x1={self.x1}")
        if not (-1.0 <= self.blend <= 1.0):
            raise ValueError(f"blend must be in [-1, 1], got {self.blend}")


# ---------------------------------------------------------------------------
# direction fields

def reflect_eye(N):
    """Reflect the eye ray about N: R = (2 Nz Nx, 2 Nz Ny, 2 Nz^2 - 1)."""
    N = np.asarray(N, dtype=np.float64)
    nx, ny, nz = N[..., 0], N[..., 1], N[..., 2]
    return np.stack([2.0 * nz * nx, 2.0 * nz * ny, 2.0 * nz * nz - 1.0], axis=-1)


def refract_eye(N, eta):
    """Snell transmission of the eye ray: returns (T, tir).

    T = (-1/eta) I + (Nz/eta - sqrt((Nz^2 - 1)/eta^2 + 1)) N. Where the
    radicand is negative the ray is totally internally reflected: tir is
    set and T holds the straight continuation (0, 0, -1) as a placeholder.
    For a single (3,) input the outputs are a (3,) vector and a bool.
    """
    N = np.asarray(N, dtype=np.float64)
    nz = N[..., 2]
    radicand = (nz * nz - 1.0) / (eta * eta) + 1.0
    tir = radicand < 0.0
    root = np.sqrt(np.where(tir, 0.0, radicand))
    coef = nz / eta - root
    T = coef[..., np.newaxis] * N
    T[..., 2] -= 1.0 / eta
    straight = np.zeros_like(T)
    straight[..., 2] = -1.0
    T = np.where(tir[..., np.newaxis], straight, T)
    if N.ndim == 1:
        return T, bool(tir)
    return T, tir


def refract_eye_artistic(V, N, mu):
    """Linearized art-directed transmission of V through a surface with normal N.

    mu > 0:  T = normalize(V (1 - mu) - N mu)
    mu <= 0: T = normalize((V - (V.N) N) mu + V (1 + mu))

    Continuous at mu = 0 where both branches return V. Raises
    DegenerateDirectionError when the unnormalized vector vanishes
    (e.g. mu = -1 with V parallel to N); batched callers fall back to V.
    """
    V = np.asarray(V, dtype=np.float64)
    N = np.asarray(N, dtype=np.float64)
    raw = _artistic_raw(V, N, mu)
    norm = np.linalg.norm(raw, axis=-1, keepdims=True)
    if (norm < 1e-9).any():
        raise DegenerateDirectionError(f"art-directed transmission degenerates at mu={mu}")
    return raw / norm


def _artistic_raw(V, N, mu):
    if mu > 0:
        return V * (1.0 - mu) - N * mu
    tangential = V - (V * N).sum(axis=-1, keepdims=True) * N
    return tangential * mu + V * (1.0 + mu)


def _artistic_field(V, N, mu):
    # batched variant: degenerate pixels fall back to the undeflected V
    raw = _artistic_raw(V, N, mu)
    norm = np.linalg.norm(raw, axis=-1, keepdims=True)
    bad = norm < 1e-9
    raw = np.where(bad, V, raw)
    norm = np.where(bad, 1.0, norm)
    return raw / norm


def warp_offset(D, plane_distance, image_dims, max_offset):
    """Plane-to-plane warp offset in pixels for direction field D.

    Delta = plane_distance * (D.x, D.y) / |D.z|, converted to pixels with
    the unit-square canvas spanning the full image, then clamped per
    component to [-max_offset, +max_offset]. Grazing rays (|D.z| ~ 0)
    saturate at the clamp instead of erroring.
    """
    D = np.asarray(D, dtype=np.float64)
    w, h = image_dims
    az = np.maximum(np.abs(D[..., 2]), GRAZE_EPS)
    dx = np.clip(plane_distance * D[..., 0] / az * w, -max_offset, max_offset)
    dy = np.clip(plane_distance * D[..., 1] / az * h, -max_offset, max_offset)
    return dx, dy


# ---------------------------------------------------------------------------
# Fresnel

def fresnel_physical(cos_theta, eta, sp_weight=0.5):
    """Dielectric Fresnel reflectance, s/p-polarization weighted average.

    With g = sqrt(eta^2 - sin^2 theta):
        F_s = ((cos - g) / (cos + g))^2
        F_p = ((eta^2 cos - g) / (eta^2 cos + g))^2
    A non-positive radicand means total internal reflection: F = 1.
    """
    cos_theta = np.asarray(cos_theta, dtype=np.float64)
    sin2 = 1.0 - cos_theta * cos_theta
    radicand = eta * eta - sin2
    tir = radicand <= 0.0
    g = np.sqrt(np.where(tir, 1.0, radicand))
    fs = ((cos_theta - g) / (cos_theta + g)) ** 2
    e2c = eta * eta * cos_theta
    fp = ((e2c - g) / (e2c + g)) ** 2
    f = sp_weight * fs + (1.0 - sp_weight) * fp
    f = np.where(tir, 1.0, np.clip(f, 0.0, 1.0))
    return float(f) if f.ndim == 0 else f


def fresnel_artistic(sin_theta, p):
    """Piecewise-linear Fresnel: 0 up to x0, 0.5 at x1, 1 at grazing.

    blend >= 0 pulls the curve toward constant 1 (total reflection),
    blend < 0 scales it toward constant 0 (total refraction).
    """
    x = np.clip(np.asarray(sin_theta, dtype=np.float64), 0.0, 1.0)
    mid = 0.5 * (x - p.x0) / (p.x1 - p.x0)
    top = 0.5 + 0.5 * (x - p.x1) / max(1.0 - p.x1, 1e-12)
    base = np.where(x <= p.x0, 0.0, np.where(x <= p.x1, mid, top))
    if p.blend >= 0:
        f = base * (1.0 - p.blend) + p.blend
    else:
        f = base * (1.0 + p.blend)
    f = np.clip(f, 0.0, 1.0)
    return float(f) if f.ndim == 0 else f


# ---------------------------------------------------------------------------
# image warps

def _base_coords(shape, img):
    # output pixel centers mapped into the sampled image's pixel space
    h, w = shape.normals.shape[:2]
    ys, xs = np.meshgrid(np.arange(h) + 0.5, np.arange(w) + 0.5, indexing="ij")
    return xs * (img.width / w), ys * (img.height / h)


def _resolve_max_offset(optics, img):
    return img.width / 4.0 if optics.max_offset is None else optics.max_offset


def warp_environment(shape, env, optics, blur_sigma=0.0):
    """Mirror-reflection image: sample the (blurred) environment along R."""
    envb = gaussian_blur(env, blur_sigma)
    R = reflect_eye(shape.normals)
    dx, dy = warp_offset(R, optics.d_env, (envb.width, envb.height), _resolve_max_offset(optics, envb))
    bx, by = _base_coords(shape, envb)
    return Image(sample_wrapped_field(envb, bx + dx, by + dy))


def warp_background(shape, bg, optics, blur_sigma=0.0):
    """Refraction image plus the per-pixel total-internal-reflection mask.

    The compositor treats masked pixels as F = 1, routing their energy to
    the mirror term.
    """
    bgb = gaussian_blur(bg, blur_sigma)
    N = np.asarray(shape.normals, dtype=np.float64)
    if optics.refraction_mode == "artistic":
        # flip normals to the eye side; V is the undeflected continuation
        N = np.where(N[..., 2:3] < 0.0, -N, N)
        V = np.zeros_like(N)
        V[..., 2] = -1.0
        T = _artistic_field(V, N, optics.mu)
        tir = np.zeros(N.shape[:2], dtype=bool)
    else:
        T, tir = refract_eye(N, optics.eta)
    dx, dy = warp_offset(T, optics.d_bg, (bgb.width, bgb.height), _resolve_max_offset(optics, bgb))
    bx, by = _base_coords(shape, bgb)
    return Image(sample_wrapped_field(bgb, bx + dx, by + dy)), tir
