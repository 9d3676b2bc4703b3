"""Local HTTP render service.

Scenes are uploaded once as a multipart bundle (the JSON document plus
one file part per image key) and held in memory under an opaque id.
Render requests are stateless: query parameters override the stored
document's values per request, with the same semantics as CLI overrides,
and never mutate the stored scene. CORS is wide open so a viewer served
from another origin can talk to it during development.
"""

import json
import threading
import time
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .compositor import render
from .image import ImageError, encode_png_bytes, encode_pnm_bytes, load_image_bytes
from .scene_io import SceneError, apply_overrides, load_scene, parse_scene, serialize_scene

_IMAGE_KEYS = ("shape", "i0", "i1", "env", "bg", "ks", "spec_color")
_REQUIRED_IMAGE_KEYS = ("shape", "i0", "i1", "env", "bg")

# flat query parameter -> dotted override path into the scene document
_PARAM_PATHS = {
    "t0": "params.diffuse_ramp.t0",
    "t1": "params.diffuse_ramp.t1",
    "step": "params.diffuse_ramp.step",
    "s0": "params.spec_ramp.t0",
    "s1": "params.spec_ramp.t1",
    "spec_step": "params.spec_ramp.step",
    "g0": "params.global_ramp.t0",
    "g1": "params.global_ramp.t1",
    "global_step": "params.global_ramp.step",
    "shadow": "params.shadow.enabled",
    "d": "params.shadow.d",
    "a": "params.shadow.a",
    "K": "params.shadow.K",
    "shadow_mode": "params.shadow_mode",
    "eta": "params.optics.eta",
    "mu": "params.optics.mu",
    "refraction_mode": "params.optics.refraction_mode",
    "d_env": "params.optics.d_env",
    "d_bg": "params.optics.d_bg",
    "max_offset": "params.optics.max_offset",
    "fresnel_mode": "params.fresnel.mode",
    "fixed_f": "params.fresnel.fixed_f",
    "sp_weight": "params.fresnel.sp_weight",
    "x0": "params.fresnel.x0",
    "x1": "params.fresnel.x1",
    "blend": "params.fresnel.blend",
    "env_blur": "params.env_blur",
    "bg_blur": "params.bg_blur",
}
_LIGHT_PARAMS = ("kind", "lx", "ly", "lz", "px", "py", "pz")
_BOOL_PARAMS = ("shadow",)


@dataclass
class StoredScene:
    doc: object
    scene: object


def _parse_bool(name, value):
    if value in ("1", "true", "True"):
        return True
    if value in ("0", "false", "False"):
        return False
    raise HTTPException(400, f"bad parameter {name!r}: expected 0/1, got {value!r}")


def _apply_light_overrides(raw, query):
    light = dict(raw["lights"][0])
    kind = query.get("kind", light["kind"])
    if kind not in ("directional", "point"):
        raise HTTPException(400, f"bad parameter 'kind': {kind!r}")
    touched = False

    def component(name, base, i):
        nonlocal touched
        if name in query:
            touched = True
            try:
                base[i] = float(query[name])
            except ValueError:
                raise HTTPException(400, f"bad parameter {name!r}: {query[name]!r}") from None
        return base

    if kind == "directional":
        vec = list(light.get("direction") or (0.0, 0.0, 1.0))
        for i, name in enumerate(("lx", "ly", "lz")):
            component(name, vec, i)
        if touched or kind != light["kind"]:
            norm = float(np.linalg.norm(vec))
            if norm < 1e-12:
                raise HTTPException(400, "bad parameter 'lx/ly/lz': zero direction")
            vec = [v / norm for v in vec]
            if vec[2] <= 0.0:
                raise HTTPException(400, "bad parameter 'lz': directional light must face the canvas (lz > 0)")
            light["kind"] = "directional"
            light["direction"] = vec
            light.pop("position", None)
    else:
        vec = list(light.get("position") or (0.5, 0.5, 1.0))
        for i, name in enumerate(("px", "py", "pz")):
            component(name, vec, i)
        light["kind"] = "point"
        light["position"] = vec
        light.pop("direction", None)
    raw["lights"][0] = light


def create_app():
    app = FastAPI(title="repaint render service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Render-Time-Ms"],
    )
    store: dict[str, StoredScene] = {}
    counter = {"next": 1}
    lock = threading.Lock()

    @app.post("/scenes", status_code=201)
    async def upload_scene(request: Request):
        form = await request.form()
        if "scene" not in form:
            raise HTTPException(400, "missing 'scene' part (the JSON document)")
        scene_part = form["scene"]
        scene_text = scene_part if isinstance(scene_part, str) else (await scene_part.read()).decode("utf-8")
        try:
            raw = json.loads(scene_text)
        except json.JSONDecodeError as exc:
            raise HTTPException(400, f"scene: parse error at line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(raw, dict):
            raise HTTPException(400, "scene: document must be a JSON object")

        images = {}
        for key in _IMAGE_KEYS:
            if key in form and not isinstance(form[key], str):
                part = form[key]
                try:
                    images[key] = load_image_bytes(await part.read(), name=key)
                except ImageError as exc:
                    raise HTTPException(400, str(exc)) from exc
                raw.setdefault(key, part.filename or f"{key}")
        for key in _REQUIRED_IMAGE_KEYS:
            if key not in images:
                raise HTTPException(400, f"missing image file for '{key}'")

        try:
            doc = parse_scene(raw)
            scene, _, _ = load_scene(doc, images=images)
        except (SceneError, ImageError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc

        with lock:
            scene_id = f"s{counter['next']}"
            counter["next"] += 1
            store[scene_id] = StoredScene(doc=doc, scene=scene)
        return {"scene_id": scene_id, "width": scene.shape.width, "height": scene.shape.height}

    def _get(scene_id):
        stored = store.get(scene_id)
        if stored is None:
            raise HTTPException(404, f"unknown scene {scene_id!r}")
        return stored

    @app.get("/scenes/{scene_id}/render")
    def render_scene(scene_id: str, request: Request):
        stored = _get(scene_id)
        query = dict(request.query_params)
        fmt = query.pop("format", "png")
        if fmt not in ("png", "ppm"):
            raise HTTPException(400, f"bad parameter 'format': {fmt!r}")

        unknown = [k for k in query if k not in _PARAM_PATHS and k not in _LIGHT_PARAMS]
        if unknown:
            raise HTTPException(400, f"unknown parameter {unknown[0]!r}")

        raw = serialize_scene(stored.doc)
        overrides = []
        for name, value in query.items():
            if name in _LIGHT_PARAMS:
                continue
            if name in _BOOL_PARAMS:
                value = json.dumps(_parse_bool(name, value))
            overrides.append(f"{_PARAM_PATHS[name]}={value}")
        try:
            apply_overrides(raw, overrides)
            _apply_light_overrides(raw, query)
            doc = parse_scene(raw)
        except SceneError as exc:
            raise HTTPException(400, f"bad parameter: {exc}") from exc

        start = time.perf_counter()
        img = render(stored.scene, list(doc.lights), doc.params)
        elapsed_ms = (time.perf_counter() - start) * 1e3
        if fmt == "png":
            body, media = encode_png_bytes(img), "image/png"
        else:
            body, media = encode_pnm_bytes(img), "image/x-portable-pixmap"
        return Response(content=body, media_type=media, headers={"X-Render-Time-Ms": f"{elapsed_ms:.2f}"})

    @app.get("/scenes/{scene_id}/meta")
    def scene_meta(scene_id: str):
        stored = _get(scene_id)
        raw = serialize_scene(stored.doc)
        return {
            "width": stored.scene.shape.width,
            "height": stored.scene.shape.height,
            "shape_kind": stored.doc.shape_kind,
            "lights": raw["lights"],
            "params": raw["params"],
        }

    return app
