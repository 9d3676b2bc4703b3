import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repaint.image import Image
from repaint.shape import (
    decode_normal_map,
    depth_to_shape,
    encode_normal_map,
    procedural_hemisphere,
)


def one_pixel(r, g, b):
    return Image(np.array([[[r, g, b]]], dtype=np.float32))


class TestDecodeNormalMap:
    def test_flat(self):
        sf = decode_normal_map(one_pixel(0.5, 0.5, 1.0))
        assert np.allclose(sf.normals[0, 0], [0, 0, 1], atol=1e-6)

    def test_plus_x(self):
        sf = decode_normal_map(one_pixel(1.0, 0.5, 0.5))
        assert np.allclose(sf.normals[0, 0], [1, 0, 0], atol=1e-6)

    def test_renormalizes(self):
        sf = decode_normal_map(one_pixel(0.75, 0.5, 0.933))
        expected = np.array([0.5, 0.0, 0.866])
        expected /= np.linalg.norm(expected)
        assert np.allclose(sf.normals[0, 0], expected, atol=1e-4)

    def test_degenerate_names_pixel(self):
        data = np.full((2, 3, 3), 0.7, dtype=np.float32)
        data[1, 2] = 0.5
        with pytest.raises(ValueError, match=r"\(2, 1\)"):
            decode_normal_map(Image(data))

    def test_needs_three_channels(self):
        with pytest.raises(ValueError):
            decode_normal_map(Image(np.zeros((2, 2, 1), dtype=np.float32)))

    def test_unit_length(self, rng):
        img = Image((rng.random((16, 16, 3)) * 0.8 + 0.1).astype(np.float32))
        sf = decode_normal_map(img)
        norms = np.linalg.norm(sf.normals, axis=2)
        assert np.abs(norms - 1.0).max() <= 1e-5

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_decode_encode_within_quantization(self, seed):
        r = np.random.default_rng(seed)
        n = r.normal(size=3)
        n /= np.linalg.norm(n)
        img = encode_normal_map(n.reshape(1, 1, 3))
        quantized = Image(np.round(img.data * 255) / np.float32(255))
        back = decode_normal_map(quantized)
        decoded_raw = 2 * quantized.data[0, 0].astype(np.float64) - 1
        # renormalization can only shrink the quantization error of a unit vector
        assert np.abs(decoded_raw - n).max() <= 1 / 255 + 1e-9
        assert np.linalg.norm(back.normals[0, 0]) == pytest.approx(1.0, abs=1e-5)


class TestDepthToShape:
    def test_constant_depth_flat_normals(self):
        sf = depth_to_shape(Image(np.full((5, 5, 1), 0.3, dtype=np.float32)))
        assert np.allclose(sf.normals, [0, 0, 1], atol=1e-7)
        assert sf.kind == "depthmap" and sf.heights is not None

    def test_linear_ramp_slope_one(self):
        # H(x, y) = x in height units: slope 1 per pixel at interior pixels
        w = 8
        samples = (np.arange(w, dtype=np.float32) / (w - 1))[None, :].repeat(6, axis=0)
        sf = depth_to_shape(Image(samples[:, :, None]), height_scale=float(w - 1))
        expected = np.array([1.0, 0.0, 1.0]) / np.sqrt(2.0)
        assert np.allclose(sf.normals[3, 3], expected, atol=1e-6)

    def test_outward_sign_flag(self):
        w = 8
        samples = (np.arange(w, dtype=np.float32) / (w - 1))[None, :].repeat(6, axis=0)
        sf = depth_to_shape(Image(samples[:, :, None]), height_scale=float(w - 1), gradient_sign="outward")
        expected = np.array([-1.0, 0.0, 1.0]) / np.sqrt(2.0)
        assert np.allclose(sf.normals[3, 3], expected, atol=1e-6)

    def test_three_channel_equal_ok_unequal_errors(self):
        eq = np.repeat(np.linspace(0, 1, 16, dtype=np.float32).reshape(4, 4, 1), 3, axis=2)
        depth_to_shape(Image(eq))
        bad = eq.copy()
        bad[0, 0, 0] += 0.25
        with pytest.raises(ValueError, match="R=G=B"):
            depth_to_shape(Image(bad))

    def test_height_scale(self):
        sf = depth_to_shape(Image(np.full((3, 3, 1), 0.5, dtype=np.float32)), height_scale=0.2)
        assert np.allclose(sf.heights, 0.1)

    def test_positive_z_always(self, rng):
        img = Image(rng.random((12, 12, 1)).astype(np.float32))
        sf = depth_to_shape(img, height_scale=5.0)
        assert (sf.normals[:, :, 2] > 0).all()


class TestProceduralHemisphere:
    def test_center_is_flat_color(self):
        img = procedural_hemisphere(64)
        center = img.data[32, 32]
        assert np.allclose(center, [0.5, 0.5, 1.0], atol=0.05)

    def test_outside_disc_exact(self):
        img = procedural_hemisphere(64, radius=0.5)
        assert np.array_equal(img.data[0, 0], np.float32([0.5, 0.5, 1.0]))

    def test_edge_pixel_points_out(self):
        size = 128
        img = procedural_hemisphere(size, radius=1.0)
        edge = img.data[size // 2, size - 1]
        assert edge[0] > 0.95  # red ~ 1: normal ~ (1, 0, 0)
        assert abs(edge[2] - 0.5) < 0.1

    def test_decodes_to_unit_normals(self):
        sf = decode_normal_map(procedural_hemisphere(33))
        norms = np.linalg.norm(sf.normals, axis=2)
        assert np.abs(norms - 1.0).max() <= 1e-5

    def test_validation(self):
        with pytest.raises(ValueError):
            procedural_hemisphere(1)
        with pytest.raises(ValueError):
            procedural_hemisphere(16, radius=1.5)
