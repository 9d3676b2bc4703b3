"""Relightable 2.5D paintings.

A scene is nothing but a set of images: a shape image (normal map or
depth map), two hand-painted diffuse control images, a foreground
(environment) image, a background image, and a transparency mask.
This package re-shades such scenes under movable lights, with ramped
toon/Gooch diffuse terms, ray-marched d/r shadows, screen-space
reflection and refraction warps, and physical or art-directed Fresnel
compositing.
"""

from .image import Image, load_image, save_image, sample_wrapped, gaussian_blur
from .shape import ShapeField, decode_normal_map, depth_to_shape, procedural_hemisphere
from .illum import LightSpec, RampParams, clamp_and_step, light_direction, diffuse_term, specular_term
from .shadow import ShadowParams, shadow_term_depth, shadow_term_normalmap
from .optics import (
    OpticsParams,
    FresnelParams,
    reflect_eye,
    refract_eye,
    refract_eye_artistic,
    warp_offset,
    fresnel_physical,
    fresnel_artistic,
    warp_environment,
    warp_background,
)
from .compositor import Scene, ShadeParams, ShadowSettings, diffuse_field, shade_diffuse, shade_specular, shade_global, render
from .scene_io import SceneDoc, parse_scene, serialize_scene, load_scene

__version__ = "0.1.0"
