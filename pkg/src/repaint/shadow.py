"""Integrated diffuse + shadow + subsurface term t = d/r by ray marching.

The shading point is pushed a distance d under the surface along its
normal; a ray is then marched toward the light in steps of length a, and
r accumulates d plus a for every sample that lies inside matter. On a
plane, t = d/r converges to cos(theta) as a -> 0, which is what ties
shadows, diffuse falloff, and a subsurface-scattering look into a single
scalar.

The first d of ray length is credited to r up front and sampling starts
at ray length d (midpoint offset a/2), i.e. sample k sits at
P0 + (d + (k + 1/2) a) L. Starting the sampled interval at the
under-surface offset is what makes the planar limit come out right.

Depth maps march against the stored height field (bilinearly sampled,
absolute z). Normal maps have no global height field; a local one is
integrated along the ray track from the traversed normals' slopes,
starting at 0 at the shading point, and compared against the ray's rise
s * L.z above its start plane. Samples outside the unit-square canvas
never block (open world, so borders cast no phantom shadows).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._numba import njit, numba, prange
from .illum import IDENTITY_RAMP, RampParams, clamp_and_step
from .shape import DEPTH_KIND, NORMAL_KIND

DEFAULT_OFFSET = 0.02
DEFAULT_MAX_STEPS = 256
NZ_FLOOR = 1e-3


@dataclass(frozen=True)
class ShadowParams:
    """March controls: under-surface offset d, step length a < d, max steps K."""

    d: float = DEFAULT_OFFSET
    a: float = DEFAULT_OFFSET / 8.0
    K: int = DEFAULT_MAX_STEPS
    ramp: RampParams = field(default_factory=lambda: IDENTITY_RAMP)

    def __post_init__(self):
        if not (0.0 < self.a < self.d):
            raise ValueError(f"need 0 < a < d, got a={self.a}, d={self.d}")
        if self.K < 1:
            raise ValueError(f"need K >= 1, got K={self.K}")


def set_worker_threads(n):
    """Cap the number of march worker threads (results are bit-identical
    for any worker count; this only trades latency)."""
    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(max(1, min(int(n), limit)))


@njit(cache=True, inline="always")
def _height_at(heights, x_px, y_px):
    # bilinear, edge-clamped; coordinates are continuous array indices
    h, w = heights.shape
    if x_px < 0.0:
        x_px = 0.0
    elif x_px > w - 1.0:
        x_px = w - 1.0
    if y_px < 0.0:
        y_px = 0.0
    elif y_px > h - 1.0:
        y_px = h - 1.0
    i0 = int(math.floor(x_px))
    j0 = int(math.floor(y_px))
    if i0 > w - 2:
        i0 = w - 2 if w > 1 else 0
    if j0 > h - 2:
        j0 = h - 2 if h > 1 else 0
    fx = x_px - i0
    fy = y_px - j0
    i1 = i0 + 1 if i0 + 1 < w else i0
    j1 = j0 + 1 if j0 + 1 < h else j0
    top = heights[j0, i0] * (1.0 - fx) + heights[j0, i1] * fx
    bot = heights[j1, i0] * (1.0 - fx) + heights[j1, i1] * fx
    return top * (1.0 - fy) + bot * fy


@njit(cache=True, parallel=True)
def _march_depth(heights, normals, js, iis, lvec, lpos, is_point, d, a, K, hmax, out):
    h, w = heights.shape
    n = js.shape[0]
    for idx in prange(n):
        j = js[idx]
        i = iis[idx]
        u = (i + 0.5) / w
        v = (j + 0.5) / h
        hz = heights[j, i]
        if is_point:
            dx = lpos[0] - u
            dy = lpos[1] - v
            dz = lpos[2] - hz
            dist = math.sqrt(dx * dx + dy * dy + dz * dz)
            if dist < 1e-9:
                out[idx] = 0.0
                continue
            lx = dx / dist
            ly = dy / dist
            lz = dz / dist
        else:
            lx = lvec[0]
            ly = lvec[1]
            lz = lvec[2]
        if lz <= 0.0:
            out[idx] = 0.0
            continue
        nx = normals[j, i, 0]
        ny = normals[j, i, 1]
        nz = normals[j, i, 2]
        x0 = u - d * nx
        y0 = v - d * ny
        z0 = hz - d * nz
        if is_point:
            dx = lpos[0] - x0
            dy = lpos[1] - y0
            dz = lpos[2] - z0
            reach = math.sqrt(dx * dx + dy * dy + dz * dz)
            k_max = int(math.ceil(reach / a))
        else:
            reach = 1e30
            k_max = K
        m = 0
        for k in range(k_max):
            s = d + (k + 0.5) * a
            if s > reach:
                break
            z = z0 + s * lz
            if z >= hmax:
                break  # ray is above every height sample; nothing can block
            x = x0 + s * lx
            y = y0 + s * ly
            if x < 0.0 or x > 1.0 or y < 0.0 or y > 1.0:
                continue
            if _height_at(heights, x * w - 0.5, y * h - 0.5) > z:
                m += 1
        out[idx] = d / (d + a * m)


@njit(cache=True, parallel=True)
def _march_normalmap(normals, js, iis, lvec, lpos, is_point, d, a, K, out):
    h, w, _ = normals.shape
    n = js.shape[0]
    for idx in prange(n):
        j = js[idx]
        i = iis[idx]
        u = (i + 0.5) / w
        v = (j + 0.5) / h
        if is_point:
            dx = lpos[0] - u
            dy = lpos[1] - v
            dz = lpos[2]  # shading plane is z = 0
            dist = math.sqrt(dx * dx + dy * dy + dz * dz)
            if dist < 1e-9:
                out[idx] = 0.0
                continue
            lx = dx / dist
            ly = dy / dist
            lz = dz / dist
            k_max = int(math.ceil(dist / a))
        else:
            lx = lvec[0]
            ly = lvec[1]
            lz = lvec[2]
            dist = 1e30
            k_max = K
        if lz <= 0.0:
            out[idx] = 0.0
            continue
        m = 0
        h_rec = 0.0
        prev_s = 0.0
        for k in range(k_max):
            s = d + (k + 0.5) * a
            if s > dist:
                break
            x = u + s * lx
            y = v + s * ly
            if x < 0.0 or x > 1.0 or y < 0.0 or y > 1.0:
                break  # the canvas is convex: a straight track never re-enters
            ii = int(x * w)
            jj = int(y * h)
            if ii > w - 1:
                ii = w - 1
            if jj > h - 1:
                jj = h - 1
            nx = normals[jj, ii, 0]
            ny = normals[jj, ii, 1]
            nz = normals[jj, ii, 2]
            if nz < NZ_FLOOR:
                nz = NZ_FLOOR
            step = s - prev_s
            h_rec += -(nx * lx + ny * ly) * step / nz
            if h_rec > s * lz:
                m += 1
            prev_s = s
        out[idx] = d / (d + a * m)


def _as_index_arrays(shape_hw, pixels):
    h, w = shape_hw
    if pixels is None:
        js, iis = np.mgrid[0:h, 0:w]
        return js.ravel().astype(np.int64), iis.ravel().astype(np.int64)
    arr = np.atleast_2d(np.asarray(pixels, dtype=np.int64))
    return arr[:, 1].copy(), arr[:, 0].copy()


def _light_arrays(light):
    if light.kind == "point":
        return (
            np.zeros(3, dtype=np.float64),
            np.asarray(light.position, dtype=np.float64),
            True,
        )
    return np.asarray(light.direction, dtype=np.float64), np.zeros(3, dtype=np.float64), False


def shadow_field_depth(shape, light, params):
    """Ramped t = d/r for every pixel of a depth-map shape. Returns (h, w)."""
    raw = raw_shadow_depth(shape, light, params)
    return clamp_and_step(raw, params.ramp)


def raw_shadow_depth(shape, light, params, pixels=None):
    """Unramped d/r; `pixels` is an optional list of (x, y) index pairs."""
    if shape.kind != DEPTH_KIND:
        raise ValueError("raw_shadow_depth needs a depth-map shape")
    js, iis = _as_index_arrays(shape.heights.shape, pixels)
    lvec, lpos, is_point = _light_arrays(light)
    out = np.empty(js.shape[0], dtype=np.float64)
    hmax = float(shape.heights.max())
    _march_depth(
        shape.heights, shape.normals, js, iis, lvec, lpos, is_point,
        float(params.d), float(params.a), int(params.K), hmax, out,
    )
    if pixels is None:
        return out.reshape(shape.heights.shape)
    return out


def shadow_term_depth(shape, light, pixel, params):
    """Ramped t = d/r at one pixel (x, y) of a depth-map shape."""
    raw = raw_shadow_depth(shape, light, params, pixels=[pixel])[0]
    return float(clamp_and_step(raw, params.ramp))


def shadow_field_normalmap(shape, light, params):
    """Ramped t = d/r for every pixel of a normal-map shape. Returns (h, w)."""
    raw = raw_shadow_normalmap(shape, light, params)
    return clamp_and_step(raw, params.ramp)


def raw_shadow_normalmap(shape, light, params, pixels=None):
    """Unramped d/r for normal maps, heights integrated along the track."""
    if shape.kind != NORMAL_KIND:
        raise ValueError("raw_shadow_normalmap needs a normal-map shape")
    hw = shape.normals.shape[:2]
    js, iis = _as_index_arrays(hw, pixels)
    lvec, lpos, is_point = _light_arrays(light)
    out = np.empty(js.shape[0], dtype=np.float64)
    _march_normalmap(
        shape.normals, js, iis, lvec, lpos, is_point,
        float(params.d), float(params.a), int(params.K), out,
    )
    if pixels is None:
        return out.reshape(hw)
    return out


def shadow_term_normalmap(shape, light, pixel, params):
    """Ramped t = d/r at one pixel (x, y) of a normal-map shape."""
    raw = raw_shadow_normalmap(shape, light, params, pixels=[pixel])[0]
    return float(clamp_and_step(raw, params.ramp))


def warmup():
    """Force-compile the march kernels on tiny inputs (JIT warm cache)."""
    from .shape import ShapeField

    heights = np.zeros((2, 2), dtype=np.float32)
    normals = np.zeros((2, 2, 3), dtype=np.float32)
    normals[:, :, 2] = 1.0
    depth = ShapeField(normals=normals, kind=DEPTH_KIND, heights=heights)
    normal = ShapeField(normals=normals.copy(), kind=NORMAL_KIND)
    from .illum import LightSpec

    params = ShadowParams(d=0.02, a=0.005, K=4)
    for light in (
        LightSpec(kind="directional", direction=(0.0, 0.0, 1.0)),
        LightSpec(kind="point", position=(0.5, 0.5, 1.0)),
    ):
        raw_shadow_depth(depth, light, params)
        raw_shadow_normalmap(normal, light, params)
