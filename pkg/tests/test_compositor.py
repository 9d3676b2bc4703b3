import math

import numpy as np
import pytest

from repaint.compositor import (
    Scene,
    ShadeParams,
    ShadowSettings,
    diffuse_field,
    render,
    shade_diffuse,
    shade_global,
    shade_specular,
    specular_field,
)
from repaint.illum import LightSpec, RampParams
from repaint.image import Image
from repaint.optics import FresnelParams
from repaint.shape import DEPTH_KIND, ShapeField, decode_normal_map, procedural_hemisphere

from conftest import flat_shape, random_image, smooth_height_image
from oracles import scene_unit_shape

OVERHEAD = LightSpec(kind="directional", direction=(0, 0, 1))
NO_SPEC = RampParams(2.0, 3.0, "linear")  # raw specular never reaches 2


def simple_scene(size=16, rng=None, **kwargs):
    rng = rng or np.random.default_rng(0)
    defaults = dict(
        shape=flat_shape(size),
        i0=Image.constant(size, size, 0.0),
        i1=Image.constant(size, size, 1.0),
        env=Image.constant(size, size, 1.0),
        bg=random_image(rng, size, size),
    )
    defaults.update(kwargs)
    return Scene(**defaults)


class TestDiffuseField:
    def test_white_overhead_saturates(self):
        omega = diffuse_field(simple_scene(), [OVERHEAD], ShadeParams())
        assert (omega == 1.0).all()

    def test_colored_light_partition_of_unity(self):
        red = LightSpec(kind="directional", direction=(0, 0, 1), color=(1, 0, 0))
        omega1 = diffuse_field(simple_scene(), [red], ShadeParams())
        omega0 = 1.0 - omega1
        assert np.array_equal(omega1[0, 0], [1, 0, 0])
        assert np.array_equal(omega0[0, 0], [0, 1, 1])
        assert (omega0 + omega1 == 1.0).all()

    def test_two_lights_sum_then_clamp(self):
        # two lights at equal obliquity each give t = 0.6
        z = 0.6
        x = math.sqrt(1 - z * z)
        lights = [
            LightSpec(kind="directional", direction=(x, 0, z)),
            LightSpec(kind="directional", direction=(-x, 0, z)),
        ]
        omega = diffuse_field(simple_scene(), lights, ShadeParams())
        assert omega == pytest.approx(1.0)

    def test_empty_lights_error(self):
        with pytest.raises(ValueError):
            diffuse_field(simple_scene(), [], ShadeParams())

    def test_point_light_varies_by_pixel(self):
        light = LightSpec(kind="point", position=(0.5, 0.5, 0.25))
        omega = diffuse_field(simple_scene(32), [light], ShadeParams())
        assert omega[16, 16, 0] > omega[0, 0, 0]


class TestShadeDiffuse:
    def test_endpoints_bit_exact(self, rng):
        scene = simple_scene(8, i0=random_image(rng, 8, 8), i1=random_image(rng, 8, 8))
        ones = np.ones((8, 8, 3), dtype=np.float32)
        assert np.array_equal(shade_diffuse(scene, ones).data, scene.i1.data)
        assert np.array_equal(shade_diffuse(scene, ones * 0.0).data, scene.i0.data)

    def test_midpoint_gray(self):
        scene = simple_scene(4)
        half = np.full((4, 4, 3), 0.5, dtype=np.float32)
        assert (shade_diffuse(scene, half).data == 0.5).all()

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            shade_diffuse(simple_scene(4), np.ones((5, 5, 3)))

    def test_convexity(self, rng):
        scene = simple_scene(8, i0=random_image(rng, 8, 8), i1=random_image(rng, 8, 8))
        omega = rng.random((8, 8, 3))
        out = shade_diffuse(scene, omega).data
        lo = np.minimum(scene.i0.data, scene.i1.data)
        hi = np.maximum(scene.i0.data, scene.i1.data)
        assert (out >= lo - 1e-6).all() and (out <= hi + 1e-6).all()


class TestShadeSpecular:
    def test_ks_zero_identity(self, rng):
        base = random_image(rng, 8, 8)
        scene = simple_scene(8)
        out = shade_specular(base, scene, np.full((8, 8, 3), 0.7))
        assert np.array_equal(out.data, base.data)

    def test_full_specular_white(self):
        scene = simple_scene(8, ks=Image.constant(8, 8, 1.0, channels=1))
        base = Image.constant(8, 8, 0.2)
        out = shade_specular(base, scene, np.ones((8, 8, 3)))
        assert (out.data == 1.0).all()

    def test_cascade_value(self):
        scene = simple_scene(4, ks=Image.constant(4, 4, 1.0, channels=1))
        base = Image.constant(4, 4, 0.4)
        out = shade_specular(base, scene, np.full((4, 4, 3), 0.5))
        assert np.allclose(out.data, 0.7, atol=1e-7)  # 0.4*0.5 + 1*0.5

    def test_convexity(self, rng):
        base = random_image(rng, 8, 8)
        scene = simple_scene(8, ks=Image(rng.random((8, 8, 1)).astype(np.float32)), spec_color=random_image(rng, 8, 8))
        s = rng.random((8, 8, 3))
        out = shade_specular(base, scene, s).data
        lo = np.minimum(base.data, scene.spec_color.data)
        hi = np.maximum(base.data, scene.spec_color.data)
        assert (out >= lo - 1e-6).all() and (out <= hi + 1e-6).all()


class TestShadeGlobal:
    def fields(self, size, s, cm, ct, f, tir=None):
        return {
            "s": np.full((size, size, 3), s, dtype=np.float64),
            "cm": Image.constant(size, size, cm),
            "ct": Image.constant(size, size, ct),
            "f": np.full((size, size), f, dtype=np.float64),
            "tir": np.zeros((size, size), dtype=bool) if tir is None else tir,
        }

    def test_opaque_painting_untouched(self, rng):
        base = random_image(rng, 8, 8)
        scene = simple_scene(8)  # ks defaults to zero
        out = shade_global(base, scene, self.fields(8, 0.5, 1.0, 0.3, 0.5), ShadeParams())
        assert np.array_equal(out.data, base.data)

    def test_pure_refraction_endpoint(self, rng):
        bg_sample = random_image(rng, 8, 8)
        scene = simple_scene(8, i0=Image.constant(8, 8, 0.0), ks=Image.constant(8, 8, 1.0, channels=1))
        base = Image.constant(8, 8, 0.0)
        fields = self.fields(8, 0.0, 1.0, 0.0, 0.0)
        fields["ct"] = bg_sample
        out = shade_global(base, scene, fields, ShadeParams())
        assert np.array_equal(out.data, bg_sample.data)

    def test_pure_mirror_endpoint(self, rng):
        env_sample = random_image(rng, 8, 8)
        scene = simple_scene(8, ks=Image.constant(8, 8, 1.0, channels=1))
        base = Image.constant(8, 8, 0.0)
        fields = self.fields(8, 0.0, 0.0, 0.4, 1.0)
        fields["cm"] = env_sample
        out = shade_global(base, scene, fields, ShadeParams())
        assert np.array_equal(out.data, env_sample.data)

    def test_tir_forces_mirror(self, rng):
        scene = simple_scene(8, ks=Image.constant(8, 8, 1.0, channels=1))
        base = Image.constant(8, 8, 0.0)
        tir = np.zeros((8, 8), dtype=bool)
        tir[2, 3] = True
        fields = self.fields(8, 0.0, 0.9, 0.1, 0.0, tir=tir)
        out = shade_global(base, scene, fields, ShadeParams())
        assert out.data[2, 3, 0] == np.float32(0.9)
        assert out.data[0, 0, 0] == np.float32(0.1)

    def test_f_mix_convexity(self, rng):
        # the mirror/refraction mix is barycentric in (cm, ct); isolate it
        # with a black base (the cascade's last line is deliberately additive)
        scene = simple_scene(8, ks=Image.constant(8, 8, 1.0, channels=1))
        base = Image.constant(8, 8, 0.0)
        cm, ct = random_image(rng, 8, 8), random_image(rng, 8, 8)
        f = rng.random((8, 8))
        fields = {"s": np.zeros((8, 8, 3)), "cm": cm, "ct": ct, "f": f, "tir": np.zeros((8, 8), bool)}
        out = shade_global(base, scene, fields, ShadeParams()).data
        lo = np.minimum(cm.data, ct.data)
        hi = np.maximum(cm.data, ct.data)
        assert (out >= lo - 1e-6).all() and (out <= hi + 1e-6).all()


class TestRender:
    def test_flat_white_scene(self):
        out = render(simple_scene(), [OVERHEAD])
        assert (out.data == 1.0).all()

    def test_reversed_light_black(self):
        out = render(simple_scene(), [LightSpec(kind="directional", direction=(0, 0, -1))])
        assert (out.data == 0.0).all()

    def test_hemisphere_flat_region_shows_background(self, rng):
        size = 64
        shape = decode_normal_map(procedural_hemisphere(size, radius=0.5))
        bg = random_image(rng, size, size)
        scene = Scene(
            shape=shape,
            i0=Image.constant(size, size, 0.0),
            i1=Image.constant(size, size, 0.0),
            env=Image.constant(size, size, 1.0),
            bg=bg,
            ks=Image.constant(size, size, 1.0, channels=1),
        )
        params = ShadeParams(fresnel=FresnelParams(mode="fixed", fixed_f=0.0), spec_ramp=NO_SPEC)
        out = render(scene, [LightSpec(kind="directional", direction=(0.6, 0, 0.8))], params)
        flat = np.ones((size, size), dtype=bool)
        flat[8:-8, 8:-8] = False  # generous margin around the disc
        assert np.array_equal(out.data[flat], bg.data[flat])

    def test_output_clamped_and_dims(self, rng):
        scene = simple_scene(8, i1=random_image(rng, 8, 8))
        out = render(scene, [OVERHEAD])
        assert out.data.shape == (8, 8, 3)
        assert (out.data >= 0).all() and (out.data <= 1).all()

    def test_determinism_across_worker_counts(self):
        from repaint.shadow import set_worker_threads

        img = smooth_height_image(77, 48)
        normals, heights = scene_unit_shape(img.data[:, :, 0] * 0.1)
        shape = ShapeField(normals=normals, kind=DEPTH_KIND, heights=heights)
        scene = Scene(
            shape=shape,
            i0=Image.constant(48, 48, 0.1),
            i1=Image.constant(48, 48, 0.9),
            env=Image.constant(48, 48, 1.0),
            bg=Image.constant(48, 48, 0.0),
        )
        params = ShadeParams(shadow=ShadowSettings(enabled=True, d=0.02, a=0.0025, K=128))
        light = LightSpec(kind="directional", direction=(0.5, 0.2, math.sqrt(1 - 0.29)))
        set_worker_threads(1)
        a = render(scene, [light], params)
        set_worker_threads(8)
        b = render(scene, [light], params)
        set_worker_threads(8)
        assert np.array_equal(a.data, b.data)

    def test_shadow_and_classic_agree_at_zenith_on_convex_field(self):
        # paraboloid bump, no occlusion anywhere, light at the zenith
        size = 48
        ys, xs = np.mgrid[0:size, 0:size]
        u = (xs + 0.5) / size
        v = (ys + 0.5) / size
        heights = (0.08 * (1 - ((u - 0.5) ** 2 + (v - 0.5) ** 2) / 0.5)).astype(np.float32)
        normals, _ = scene_unit_shape(heights)
        shape = ShapeField(normals=normals, kind=DEPTH_KIND, heights=heights)
        scene = Scene(
            shape=shape,
            i0=Image.constant(size, size, 0.0),
            i1=Image.constant(size, size, 1.0),
            env=Image.constant(size, size, 1.0),
            bg=Image.constant(size, size, 0.0),
        )
        d = 0.02
        classic = ShadeParams(shadow=ShadowSettings(enabled=False), shadow_mode="classic")
        marched = ShadeParams(shadow=ShadowSettings(enabled=True, d=d, a=d / 8, K=256))
        ca = render(scene, [OVERHEAD], classic).data
        ma = render(scene, [OVERHEAD], marched).data
        assert np.abs(ca - ma).max() <= 2 * (d / 8) / d

    def test_scene_validation(self, rng):
        with pytest.raises(ValueError, match="i0"):
            Scene(
                shape=flat_shape(8),
                i0=Image.constant(4, 4, 0.0),
                i1=Image.constant(8, 8, 1.0),
                env=Image.constant(8, 8, 1.0),
                bg=Image.constant(8, 8, 1.0),
            )
        with pytest.raises(ValueError, match="ks"):
            simple_scene(8, ks=Image.constant(8, 8, 2.0, channels=1))


class TestSpecularField:
    def test_oblique_light_highlights_tilted_facets(self):
        size = 33
        shape = decode_normal_map(procedural_hemisphere(size))
        scene = simple_scene(size, shape=shape)
        light = LightSpec(kind="directional", direction=(math.sin(0.9), 0, math.cos(0.9)))
        s = specular_field(scene, [light], ShadeParams(spec_ramp=RampParams(0.98, 1.0)))
        # the mirror facet sits where N bisects L and the eye
        j = size // 2
        best_i = int(np.argmax(s[j, :, 0]))
        n = shape.normals[j, best_i]
        r = 2 * (n @ np.array(light.direction)) * n[2] - light.direction[2]
        assert r > 0.98
        assert s[j, 0, 0] == 0.0
