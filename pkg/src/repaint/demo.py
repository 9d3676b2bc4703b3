"""Procedurally generated demo scenes.

Nothing here is random at run time: every image is derived from fixed
seeds, so demo renders are reproducible and usable as test fixtures.
"""

import json
from pathlib import Path

import numpy as np

from .image import Image, save_image
from .shape import procedural_hemisphere

DEMO_KINDS = ("hemisphere", "blobs")


def _checkerboard(size, cells=8):
    idx = np.arange(size) * cells // size
    mask = (idx[:, None] + idx[None, :]) % 2
    img = np.empty((size, size, 3), dtype=np.float32)
    img[mask == 0] = (0.92, 0.91, 0.86)
    img[mask == 1] = (0.12, 0.16, 0.28)
    return Image(img)


def _sky_gradient(size):
    v = np.linspace(1.0, 0.25, size, dtype=np.float32)[:, None]
    img = np.empty((size, size, 3), dtype=np.float32)
    img[:, :, 0] = v * 0.9
    img[:, :, 1] = v * 0.95
    img[:, :, 2] = np.clip(v * 1.1, 0.0, 1.0)
    # one bright blob to make mirror displacement easy to eyeball
    ys, xs = np.mgrid[0:size, 0:size]
    blob = np.exp(-(((xs - 0.7 * size) ** 2 + (ys - 0.25 * size) ** 2) / (2 * (size * 0.06) ** 2)))
    return Image(np.clip(img + blob[:, :, None].astype(np.float32), 0.0, 1.0))


def _smooth_field(size, seed, sigma_frac=0.06):
    from scipy.ndimage import gaussian_filter

    rng = np.random.default_rng(seed)
    field = gaussian_filter(rng.random((size, size)), sigma_frac * size, mode="wrap")
    field -= field.min()
    field /= field.max()
    return field.astype(np.float32)


def _paint_pair(size, seed):
    # dark and bright hand-painted stand-ins: same blobby strokes, two palettes
    strokes = _smooth_field(size, seed, 0.04)
    dark = np.stack([0.10 + 0.18 * strokes, 0.08 + 0.12 * strokes, 0.16 + 0.20 * strokes], axis=2)
    bright = np.stack([0.80 + 0.18 * strokes, 0.72 + 0.20 * strokes, 0.55 + 0.25 * strokes], axis=2)
    return Image(np.clip(dark, 0, 1).astype(np.float32)), Image(np.clip(bright, 0, 1).astype(np.float32))


def _disc_mask(size, radius_frac=0.42):
    ys, xs = np.mgrid[0:size, 0:size]
    c = size / 2.0
    inside = (xs + 0.5 - c) ** 2 + (ys + 0.5 - c) ** 2 <= (radius_frac * size) ** 2
    return Image(inside.astype(np.float32)[:, :, None])


def make_demo_scene(out_dir, kind="hemisphere", size=256):
    """Write demo images plus scene.json into out_dir; returns the json path."""
    if kind not in DEMO_KINDS:
        raise ValueError(f"demo kind must be one of {DEMO_KINDS}, got {kind!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    i0, i1 = _paint_pair(size, seed=11)
    save_image(i0, out / "i0.ppm")
    save_image(i1, out / "i1.ppm")
    save_image(_sky_gradient(size), out / "env.ppm")
    save_image(_checkerboard(size), out / "bg.ppm")

    doc = {
        "shape_kind": "normalmap",
        "shape": "shape.ppm",
        "i0": "i0.ppm",
        "i1": "i1.ppm",
        "env": "env.ppm",
        "bg": "bg.ppm",
        "lights": [{"kind": "directional", "direction": [0.0, 0.0, 1.0], "color": [1.0, 1.0, 1.0]}],
    }
    if kind == "hemisphere":
        save_image(procedural_hemisphere(size), out / "shape.ppm")
        save_image(_disc_mask(size), out / "ks.pgm")
        doc["ks"] = "ks.pgm"
        doc["params"] = {
            "fresnel": {"mode": "artistic", "x0": 0.25, "x1": 0.7, "blend": 0.0},
            "optics": {"refraction_mode": "physical", "eta": 1.5, "d_env": 0.15, "d_bg": 0.12},
        }
    else:
        field = _smooth_field(size, seed=23, sigma_frac=0.05)
        save_image(Image(field[:, :, None]), out / "shape.pgm")
        doc["shape_kind"] = "depthmap"
        doc["shape"] = "shape.pgm"
        doc["height_scale"] = 0.12
        doc["params"] = {
            "shadow": {"enabled": True, "d": 0.02, "a": 0.0025, "K": 256},
            "shadow_mode": "cos-theta",
        }
        doc["lights"] = [{"kind": "directional", "direction": [0.0, 0.0, 1.0], "color": [1.0, 1.0, 1.0]}]

    path = out / "scene.json"
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path
