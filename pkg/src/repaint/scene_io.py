"""Scene-description documents: parsing, validation, defaulting, loading.

A scene document is a flat UTF-8 JSON object. Top-level keys: "shape",
"shape_kind" ("normalmap" | "depthmap"), "i0", "i1", "env", "bg",
optional "ks" and "spec_color", "lights", and "params" with nested
sections diffuse_ramp/spec_ramp/global_ramp {t0, t1, step}, shadow
{enabled, d, a, K}, optics {eta, mu, refraction_mode, d_env, d_bg,
max_offset}, fresnel {mode, fixed_f, sp_weight, x0, x1, blend}, plus
env_blur, bg_blur and shadow_mode. Optional top-level "height_scale" and
"gradient_sign" control depth-map decoding. Unknown keys are rejected;
every default lives here and nowhere else.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .compositor import Scene, ShadeParams, ShadowSettings
from .illum import LightSpec, RampParams
from .image import Image, load_image
from .optics import FresnelParams, OpticsParams
from .shape import DEFAULT_HEIGHT_SCALE, GRADIENT_SIGNS, decode_normal_map, depth_to_shape

SHAPE_KINDS = ("normalmap", "depthmap")

_TOP_KEYS = {
    "shape", "shape_kind", "i0", "i1", "env", "bg", "ks", "spec_color",
    "lights", "params", "height_scale", "gradient_sign",
}
_REQUIRED_KEYS = ("shape", "shape_kind", "i0", "i1", "env", "bg", "lights")
_PARAM_KEYS = {
    "diffuse_ramp", "spec_ramp", "global_ramp", "shadow", "optics",
    "fresnel", "env_blur", "bg_blur", "shadow_mode",
}
_RAMP_KEYS = {"t0", "t1", "step"}
_SHADOW_KEYS = {"enabled", "d", "a", "K"}
_OPTICS_KEYS = {"eta", "mu", "refraction_mode", "d_env", "d_bg", "max_offset"}
_FRESNEL_KEYS = {"mode", "fixed_f", "sp_weight", "x0", "x1", "blend"}
_LIGHT_KEYS = {"kind", "direction", "position", "color"}


class SceneError(Exception):
    """Malformed or out-of-range scene document."""


@dataclass(frozen=True)
class SceneDoc:
    """A fully validated, fully defaulted scene description."""

    shape: str
    shape_kind: str
    i0: str
    i1: str
    env: str
    bg: str
    lights: tuple
    params: ShadeParams = field(default_factory=ShadeParams)
    ks: str | None = None
    spec_color: str | None = None
    height_scale: float = DEFAULT_HEIGHT_SCALE
    gradient_sign: str = "paper"


def _reject_unknown(obj, allowed, where):
    for key in obj:
        if key not in allowed:
            raise SceneError(f"unknown key {key!r} in {where}")


def _section(raw, key, allowed):
    sub = raw.get(key, {})
    if not isinstance(sub, dict):
        raise SceneError(f"params.{key} must be an object")
    _reject_unknown(sub, allowed, f"params.{key}")
    return sub


def _build(cls, kwargs, where):
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        raise SceneError(f"{where}: {exc}") from exc


def _parse_light(i, raw):
    if not isinstance(raw, dict):
        raise SceneError(f"lights[{i}] must be an object")
    _reject_unknown(raw, _LIGHT_KEYS, f"lights[{i}]")
    kwargs = {"kind": raw.get("kind")}
    if "direction" in raw:
        kwargs["direction"] = tuple(raw["direction"])
    if "position" in raw:
        kwargs["position"] = tuple(raw["position"])
    if "color" in raw:
        kwargs["color"] = tuple(raw["color"])
    return _build(LightSpec, kwargs, f"lights[{i}]")


def parse_scene(text):
    """Parse and validate a scene document, materializing every default."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    if isinstance(text, str):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SceneError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    else:
        raw = text
    if not isinstance(raw, dict):
        raise SceneError("scene document must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "scene document")
    for key in _REQUIRED_KEYS:
        if key not in raw:
            raise SceneError(f"missing required key {key!r}")
    if raw["shape_kind"] not in SHAPE_KINDS:
        raise SceneError(f"shape_kind must be one of {SHAPE_KINDS}, got {raw['shape_kind']!r}")

    lights_raw = raw["lights"]
    if not isinstance(lights_raw, list) or not lights_raw:
        raise SceneError("lights must be a non-empty array")
    lights = tuple(_parse_light(i, l) for i, l in enumerate(lights_raw))

    p = raw.get("params", {})
    if not isinstance(p, dict):
        raise SceneError("params must be an object")
    _reject_unknown(p, _PARAM_KEYS, "params")
    defaults = ShadeParams()

    def merged(key, allowed, default_dict):
        # partial sections merge against the documented defaults
        return {**default_dict, **_section(p, key, allowed)}

    params = _build(
        ShadeParams,
        {
            "diffuse_ramp": _build(RampParams, merged("diffuse_ramp", _RAMP_KEYS, _ramp_dict(defaults.diffuse_ramp)), "params.diffuse_ramp"),
            "spec_ramp": _build(RampParams, merged("spec_ramp", _RAMP_KEYS, _ramp_dict(defaults.spec_ramp)), "params.spec_ramp"),
            "global_ramp": _build(RampParams, merged("global_ramp", _RAMP_KEYS, _ramp_dict(defaults.global_ramp)), "params.global_ramp"),
            "shadow": _build(ShadowSettings, merged("shadow", _SHADOW_KEYS, {"enabled": defaults.shadow.enabled, "d": defaults.shadow.d, "a": defaults.shadow.a, "K": defaults.shadow.K}), "params.shadow"),
            "optics": _build(OpticsParams, merged("optics", _OPTICS_KEYS, {"eta": defaults.optics.eta, "mu": defaults.optics.mu, "refraction_mode": defaults.optics.refraction_mode, "d_env": defaults.optics.d_env, "d_bg": defaults.optics.d_bg, "max_offset": defaults.optics.max_offset}), "params.optics"),
            "fresnel": _build(FresnelParams, merged("fresnel", _FRESNEL_KEYS, {"mode": defaults.fresnel.mode, "fixed_f": defaults.fresnel.fixed_f, "sp_weight": defaults.fresnel.sp_weight, "x0": defaults.fresnel.x0, "x1": defaults.fresnel.x1, "blend": defaults.fresnel.blend}), "params.fresnel"),
            "env_blur": p.get("env_blur", defaults.env_blur),
            "bg_blur": p.get("bg_blur", defaults.bg_blur),
            "shadow_mode": p.get("shadow_mode", defaults.shadow_mode),
        },
        "params",
    )

    height_scale = raw.get("height_scale", DEFAULT_HEIGHT_SCALE)
    if not isinstance(height_scale, (int, float)) or height_scale <= 0:
        raise SceneError(f"height_scale must be a positive number, got {height_scale!r}")
    gradient_sign = raw.get("gradient_sign", "paper")
    if gradient_sign not in GRADIENT_SIGNS:
        raise SceneError(f"gradient_sign must be one of {GRADIENT_SIGNS}, got {gradient_sign!r}")

    for key in ("shape", "i0", "i1", "env", "bg"):
        if not isinstance(raw[key], str) or not raw[key]:
            raise SceneError(f"{key} must be a non-empty path string")

    return SceneDoc(
        shape=raw["shape"],
        shape_kind=raw["shape_kind"],
        i0=raw["i0"],
        i1=raw["i1"],
        env=raw["env"],
        bg=raw["bg"],
        ks=raw.get("ks"),
        spec_color=raw.get("spec_color"),
        lights=lights,
        params=params,
        height_scale=float(height_scale),
        gradient_sign=gradient_sign,
    )


def _ramp_dict(r):
    return {"t0": r.t0, "t1": r.t1, "step": r.step}


def _light_dict(l):
    out = {"kind": l.kind, "color": list(l.color)}
    if l.kind == "directional":
        out["direction"] = list(l.direction)
    else:
        out["position"] = list(l.position)
    return out


def serialize_scene(doc):
    """SceneDoc -> plain JSON-ready dict with every default written out.

    parse_scene(serialize_scene(doc)) == doc for all valid docs.
    """
    p = doc.params
    out = {
        "shape": doc.shape,
        "shape_kind": doc.shape_kind,
        "i0": doc.i0,
        "i1": doc.i1,
        "env": doc.env,
        "bg": doc.bg,
        "lights": [_light_dict(l) for l in doc.lights],
        "params": {
            "diffuse_ramp": _ramp_dict(p.diffuse_ramp),
            "spec_ramp": _ramp_dict(p.spec_ramp),
            "global_ramp": _ramp_dict(p.global_ramp),
            "shadow": {"enabled": p.shadow.enabled, "d": p.shadow.d, "a": p.shadow.a, "K": p.shadow.K},
            "optics": {
                "eta": p.optics.eta,
                "mu": p.optics.mu,
                "refraction_mode": p.optics.refraction_mode,
                "d_env": p.optics.d_env,
                "d_bg": p.optics.d_bg,
                "max_offset": p.optics.max_offset,
            },
            "fresnel": {
                "mode": p.fresnel.mode,
                "fixed_f": p.fresnel.fixed_f,
                "sp_weight": p.fresnel.sp_weight,
                "x0": p.fresnel.x0,
                "x1": p.fresnel.x1,
                "blend": p.fresnel.blend,
            },
            "env_blur": p.env_blur,
            "bg_blur": p.bg_blur,
            "shadow_mode": p.shadow_mode,
        },
        "height_scale": doc.height_scale,
        "gradient_sign": doc.gradient_sign,
    }
    if doc.ks is not None:
        out["ks"] = doc.ks
    if doc.spec_color is not None:
        out["spec_color"] = doc.spec_color
    return out


def apply_overrides(raw, assignments):
    """Apply "dotted.path=value" assignments to a raw scene dict in place.

    Values are parsed as JSON fragments, falling back to bare strings.
    Integer path segments index into arrays. Unknown paths are errors, so
    a typo never silently renders the unmodified scene.
    """
    for item in assignments:
        if "=" not in item:
            raise SceneError(f"override {item!r} is not of the form key=value")
        path, _, value_text = item.partition("=")
        try:
            value = json.loads(value_text)
        except json.JSONDecodeError:
            value = value_text
        parts = path.split(".")
        node = raw
        for seg_i, seg in enumerate(parts):
            last = seg_i == len(parts) - 1
            if isinstance(node, list):
                try:
                    idx = int(seg)
                    node[idx]
                except (ValueError, IndexError):
                    raise SceneError(f"bad override key {path!r} (no element {seg!r})") from None
                if last:
                    node[idx] = value
                else:
                    node = node[idx]
            elif isinstance(node, dict):
                if seg not in node:
                    raise SceneError(f"bad override key {path!r} (no key {seg!r})")
                if last:
                    node[seg] = value
                else:
                    node = node[seg]
            else:
                raise SceneError(f"bad override key {path!r} ({seg!r} is not nested)")
    return raw


def _load_ks(img, name):
    if img.channels == 1:
        return img
    d = img.data
    if not (np.array_equal(d[:, :, 0], d[:, :, 1]) and np.array_equal(d[:, :, 0], d[:, :, 2])):
        raise SceneError(f"{name}: 3-channel transparency masks must have R=G=B")
    return Image(d[:, :, :1])


def load_scene(doc, base_dir=None, images=None):
    """Bind a SceneDoc to decoded images: returns (Scene, lights, params).

    `images` optionally maps document keys ("shape", "i0", ...) to
    already-decoded Images (the render service uses this for uploads);
    anything missing is loaded from the document's path, relative to
    `base_dir` when given.
    """
    images = images or {}
    base = Path(base_dir) if base_dir is not None else None

    def fetch(key, path):
        if key in images:
            return images[key]
        if path is None:
            return None
        p = Path(path)
        if base is not None and not p.is_absolute():
            p = base / p
        return load_image(p)

    shape_img = fetch("shape", doc.shape)
    if doc.shape_kind == "normalmap":
        shape = decode_normal_map(shape_img)
    else:
        shape = depth_to_shape(shape_img, height_scale=doc.height_scale, gradient_sign=doc.gradient_sign)

    ks_img = fetch("ks", doc.ks)
    spec_img = fetch("spec_color", doc.spec_color)
    scene = Scene(
        shape=shape,
        i0=fetch("i0", doc.i0).to_rgb(),
        i1=fetch("i1", doc.i1).to_rgb(),
        env=fetch("env", doc.env).to_rgb(),
        bg=fetch("bg", doc.bg).to_rgb(),
        ks=_load_ks(ks_img, "ks") if ks_img is not None else None,
        spec_color=spec_img.to_rgb() if spec_img is not None else None,
    )
    return scene, list(doc.lights), doc.params
