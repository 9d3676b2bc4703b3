"""Barycentric shading: weight fields, diffuse/specular/global compositing.

The painting itself is never computed from scratch; it is always a convex
mix of artist-painted control images weighted by illumination scalars:

    diffuse:  C = I0 (1 - t) + I1 t
    specular: C <- C (1 - ks s) + C2 ks s
    global:   C2' = Clamp&Step(C_M F + C_T (1 - F) + s C2)
              C  <- C (1 - ks s) + C2' ks

The global form is used whenever the transparency mask ks is anywhere
positive (reflected/refracted energy must show even where s = 0); pure
specular scenes use the middle form.
"""

from dataclasses import dataclass, field

import numpy as np

from .illum import IDENTITY_RAMP, RampParams, clamp_and_step, light_direction, specular_raw
from .image import Image
from .optics import FresnelParams, OpticsParams, fresnel_artistic, fresnel_physical, warp_background, warp_environment
from .shadow import DEFAULT_MAX_STEPS, DEFAULT_OFFSET, ShadowParams, shadow_field_depth, shadow_field_normalmap
from .shape import DEPTH_KIND

SHADOW_MODES = ("classic", "cos-theta")


@dataclass(frozen=True)
class ShadowSettings:
    """Scene-level shadow march controls plus the master toggle."""

    enabled: bool = False
    d: float = DEFAULT_OFFSET
    a: float = DEFAULT_OFFSET / 8.0
    K: int = DEFAULT_MAX_STEPS

    def __post_init__(self):
        if not (0.0 < self.a < self.d):
            raise ValueError(f"need 0 < a < d, got a={self.a}, d={self.d}")
        if self.K < 1:
            raise ValueError(f"need K >= 1, got K={self.K}")


@dataclass(frozen=True)
class ShadeParams:
    """Every artistic control the pipeline takes."""

    diffuse_ramp: RampParams = field(default_factory=lambda: IDENTITY_RAMP)
    spec_ramp: RampParams = field(default_factory=lambda: RampParams(0.8, 1.0, "smooth-step"))
    global_ramp: RampParams = field(default_factory=lambda: IDENTITY_RAMP)
    shadow: ShadowSettings = field(default_factory=ShadowSettings)
    optics: OpticsParams = field(default_factory=OpticsParams)
    fresnel: FresnelParams = field(default_factory=FresnelParams)
    env_blur: float = 0.0
    bg_blur: float = 0.0
    shadow_mode: str = "cos-theta"

    def __post_init__(self):
        if self.shadow_mode not in SHADOW_MODES:
            raise ValueError(f"shadow_mode must be one of {SHADOW_MODES}, got {self.shadow_mode!r}")
        if self.env_blur < 0 or self.bg_blur < 0:
            raise ValueError("blur radii must be >= 0")

    def shadows_active(self):
        return self.shadow.enabled and self.shadow_mode == "cos-theta"


@dataclass(frozen=True, eq=False)
class Scene:
    """The image set defining a dynamic painting."""

    shape: object
    i0: Image
    i1: Image
    env: Image
    bg: Image
    ks: Image = None
    spec_color: Image = None

    def __post_init__(self):
        h, w = self.shape.height, self.shape.width
        if self.ks is None:
            object.__setattr__(self, "ks", Image.constant(w, h, 0.0, channels=1))
        if self.spec_color is None:
            object.__setattr__(self, "spec_color", Image.constant(w, h, 1.0, channels=3))
        for name in ("i0", "i1", "ks", "spec_color"):
            img = getattr(self, name)
            if (img.height, img.width) != (h, w):
                raise ValueError(
                    f"dimension mismatch: {name} is {img.width}x{img.height}, shape is {w}x{h}"
                )
        for name in ("i0", "i1", "spec_color", "env", "bg"):
            if getattr(self, name).channels != 3:
                raise ValueError(f"{name} must be 3-channel")
        if self.ks.channels != 1:
            raise ValueError("ks must be 1-channel")
        if (self.ks.data < 0).any() or (self.ks.data > 1).any():
            raise ValueError("ks samples must lie in [0, 1]")


def pixel_positions(shape):
    """Shading positions on the canvas plane z = 0, shape (h, w, 3)."""
    h, w = shape.height, shape.width
    ys, xs = np.meshgrid((np.arange(h) + 0.5) / h, (np.arange(w) + 0.5) / w, indexing="ij")
    return np.stack([xs, ys, np.zeros_like(xs)], axis=2)


def _light_field(light, shape):
    # (h, w, 3) toward-light directions; directional lights stay a bare 3-vector
    if light.kind == "directional":
        return np.asarray(light.direction, dtype=np.float64)
    return light_direction(light, pixel_positions(shape))


def _light_t_field(scene, light, params):
    if params.shadows_active():
        march = ShadowParams(d=params.shadow.d, a=params.shadow.a, K=params.shadow.K, ramp=params.diffuse_ramp)
        if scene.shape.kind == DEPTH_KIND:
            return shadow_field_depth(scene.shape, light, march)
        return shadow_field_normalmap(scene.shape, light, march)
    L = _light_field(light, scene.shape)
    if L.ndim == 1:
        dots = scene.shape.normals @ L
    else:
        dots = (scene.shape.normals * L).sum(axis=2)
    return clamp_and_step(dots, params.diffuse_ramp)


def diffuse_field(scene, lights, params):
    """Per-pixel 3-channel weight field Omega_1 = clamp(sum_i t_i color_i).

    Omega_0 = 1 - Omega_1 per channel (partition of unity), derived where
    needed rather than stored.
    """
    if not lights:
        raise ValueError("at least one light is required")
    h, w = scene.shape.height, scene.shape.width
    omega1 = np.zeros((h, w, 3), dtype=np.float64)
    for light in lights:
        t = _light_t_field(scene, light, params)
        omega1 += t[:, :, np.newaxis] * np.asarray(light.color, dtype=np.float64)
    return np.clip(omega1, 0.0, 1.0)


def specular_field(scene, lights, params):
    """Per-pixel 3-channel specular weight, per-light ramped then summed."""
    if not lights:
        raise ValueError("at least one light is required")
    h, w = scene.shape.height, scene.shape.width
    N = scene.shape.normals
    s = np.zeros((h, w, 3), dtype=np.float64)
    for light in lights:
        L = _light_field(light, scene.shape)
        if L.ndim == 1:
            raw = 2.0 * (N @ L) * N[:, :, 2] - L[2]
        else:
            raw = specular_raw(N, L)
        s += clamp_and_step(raw, params.spec_ramp)[:, :, np.newaxis] * np.asarray(light.color, dtype=np.float64)
    return np.clip(s, 0.0, 1.0)


def shade_diffuse(scene, omega1):
    """C = I0 (1 - Omega_1) + I1 Omega_1, per pixel and channel."""
    omega1 = np.asarray(omega1)
    if omega1.shape != scene.i0.data.shape:
        raise ValueError(f"weight field shape {omega1.shape} does not match images {scene.i0.data.shape}")
    return Image(scene.i0.data * (1.0 - omega1) + scene.i1.data * omega1)


def shade_specular(base, scene, s_field):
    """C <- C (1 - ks s) + C2 ks s (opaque specular highlights)."""
    ks = scene.ks.data
    w = ks * np.asarray(s_field)
    return Image(base.data * (1.0 - w) + scene.spec_color.data * w)


def fresnel_field(shape, fresnel, eta):
    """Per-pixel reflection weight from the eye-incidence angle.

    cos(theta) = N.z (the eye is (0,0,1)), clamped to [0, 1] so that
    impossible normals facing away still get a defined grazing value.
    """
    cos_t = np.clip(shape.normals[:, :, 2].astype(np.float64), 0.0, 1.0)
    if fresnel.mode == "physical":
        return fresnel_physical(cos_t, eta, fresnel.sp_weight)
    if fresnel.mode == "artistic":
        return fresnel_artistic(np.sqrt(np.clip(1.0 - cos_t * cos_t, 0.0, 1.0)), fresnel)
    return np.full(cos_t.shape, fresnel.fixed_f, dtype=np.float64)


def shade_global(base, scene, fields, params):
    """Eq-style global compositing of mirrored, refracted, and specular light.

    fields: dict with s (h,w,3), cm, ct (h,w,3), f (h,w), tir (h,w) bool.
    """
    f = np.where(fields["tir"], 1.0, fields["f"])[:, :, np.newaxis]
    inner = fields["cm"].data * f + fields["ct"].data * (1.0 - f) + fields["s"] * scene.spec_color.data
    c2 = clamp_and_step(inner, params.global_ramp)
    ks = scene.ks.data
    out = base.data * (1.0 - ks * fields["s"]) + c2 * ks
    return Image(out)


def render(scene, lights, params=None):
    """Full pipeline: diffuse weights, then global or specular compositing.

    Deterministic: identical inputs give bit-identical images for any
    worker-thread count.
    """
    if params is None:
        params = ShadeParams()
    omega1 = diffuse_field(scene, lights, params)
    base = shade_diffuse(scene, omega1)
    if (scene.ks.data > 0).any():
        s = specular_field(scene, lights, params)
        cm = warp_environment(scene.shape, scene.env, params.optics, params.env_blur)
        ct, tir = warp_background(scene.shape, scene.bg, params.optics, params.bg_blur)
        f = fresnel_field(scene.shape, params.fresnel, params.optics.eta)
        out = shade_global(base, scene, {"s": s, "cm": cm, "ct": ct, "f": f, "tir": tir}, params)
    else:
        s = specular_field(scene, lights, params)
        out = shade_specular(base, scene, s)
    return Image(np.clip(out.data, 0.0, 1.0))
