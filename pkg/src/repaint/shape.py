"""Decode shape images into per-pixel unit normals and height fields.

A normal map stores N = 2*color - 1 per pixel and may describe impossible
surfaces (non-conservative vector fields). A depth map stores a height
field whose gradient yields normals. Either way the canvas itself is the
unit square in z = 0 and the shape is pure decoration on it.
"""

from dataclasses import dataclass, field

import numpy as np

from .image import Image

NORMAL_KIND = "normalmap"
DEPTH_KIND = "depthmap"

DEFAULT_HEIGHT_SCALE = 0.1
GRADIENT_SIGNS = ("paper", "outward")


@dataclass(frozen=True, eq=False)
class ShapeField:
    """Per-pixel unit normals, optionally paired with a height field.

    normals: float32 (h, w, 3), each row a unit vector (|N| = 1 +/- 1e-5).
    heights: float32 (h, w) in scene units; present iff kind == "depthmap".
    """

    normals: np.ndarray
    kind: str
    heights: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.kind not in (NORMAL_KIND, DEPTH_KIND):
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if (self.heights is not None) != (self.kind == DEPTH_KIND):
            raise ValueError("heights must be present exactly for depth-map shapes")
        self.normals.setflags(write=False)
        if self.heights is not None:
            self.heights.setflags(write=False)

    @property
    def width(self):
        return self.normals.shape[1]

    @property
    def height(self):
        return self.normals.shape[0]


def decode_normal_map(img):
    """Decode a 3-channel image into unit normals via N = 2*color - 1.

    Normals are renormalized (quantized maps rarely come out exactly unit
    length). A pixel whose decoded vector is near zero is a hard error so
    that bad assets fail fast instead of shading garbage.
    """
    if img.channels != 3:
        raise ValueError(f"normal maps need 3 channels, got {img.channels}")
    n = 2.0 * img.data.astype(np.float64) - 1.0
    norms = np.sqrt((n * n).sum(axis=2))
    bad = norms < 1e-6
    if bad.any():
        j, i = np.argwhere(bad)[0]
        raise ValueError(f"degenerate normal (color ~0.5 gray) at pixel ({i}, {j})")
    n /= norms[:, :, np.newaxis]
    return ShapeField(normals=n.astype(np.float32), kind=NORMAL_KIND)


def encode_normal_map(normals):
    """Inverse of decode_normal_map: color = (N + 1) / 2."""
    arr = np.asarray(normals, dtype=np.float32)
    return Image((arr + 1.0) * 0.5)


def depth_to_shape(img, height_scale=DEFAULT_HEIGHT_SCALE, gradient_sign="paper"):
    """Turn a grayscale depth image into heights plus gradient normals.

    heights = height_scale * sample, in scene units. Gradients are central
    differences in pixel units (one-sided at the borders). The "paper"
    sign convention builds N = normalize(+Hx, +Hy, 1); "outward" negates
    the gradient, which is the conventional outward normal of z = H(x, y).
    """
    if gradient_sign not in GRADIENT_SIGNS:
        raise ValueError(f"gradient_sign must be one of {GRADIENT_SIGNS}, got {gradient_sign!r}")
    if img.channels == 3:
        d = img.data
        if not (np.array_equal(d[:, :, 0], d[:, :, 1]) and np.array_equal(d[:, :, 0], d[:, :, 2])):
            raise ValueError("3-channel depth maps must have R=G=B")
        samples = d[:, :, 0]
    else:
        samples = img.data[:, :, 0]
    heights = (height_scale * samples.astype(np.float64)).astype(np.float32)
    gy, gx = np.gradient(heights.astype(np.float64))
    if gradient_sign == "outward":
        gx, gy = -gx, -gy
    n = np.stack([gx, gy, np.ones_like(gx)], axis=2)
    n /= np.sqrt((n * n).sum(axis=2))[:, :, np.newaxis]
    return ShapeField(normals=n.astype(np.float32), kind=DEPTH_KIND, heights=heights)


def procedural_hemisphere(size, radius=1.0):
    """Normal-map image of a hemisphere bulging out of a flat canvas.

    `radius` is a fraction of the half-size. Outside the disc the color is
    exactly (0.5, 0.5, 1), the flat +z normal.
    """
    if size < 2:
        raise ValueError(f"size must be >= 2, got {size}")
    if not (0.0 < radius <= 1.0):
        raise ValueError(f"radius must be in (0, 1], got {radius}")
    c = size / 2.0
    r = radius * c
    ys, xs = np.meshgrid(np.arange(size) + 0.5, np.arange(size) + 0.5, indexing="ij")
    dx = (xs - c) / r
    dy = (ys - c) / r
    rho2 = dx * dx + dy * dy
    inside = rho2 <= 1.0
    nz = np.sqrt(np.clip(1.0 - rho2, 0.0, None))
    n = np.stack([np.where(inside, dx, 0.0), np.where(inside, dy, 0.0), np.where(inside, nz, 1.0)], axis=2)
    # silhouette pixels have nz ~ 0; the decoded vector is still unit length
    return Image(((n + 1.0) * 0.5).astype(np.float32))
