import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repaint.illum import (
    LightSpec,
    RampParams,
    clamp_and_step,
    diffuse_term,
    light_direction,
    specular_raw,
    specular_term,
)

unit_ramp = RampParams(0.0, 1.0, "linear")

finite = st.floats(min_value=-3, max_value=3, allow_nan=False)


def random_unit(seed):
    r = np.random.default_rng(seed)
    while True:
        v = r.normal(size=3)
        n = np.linalg.norm(v)
        if n > 1e-6:
            return v / n


class TestClampAndStep:
    def test_gooch_midpoint(self):
        assert clamp_and_step(0.0, RampParams(-1.0, 1.0, "linear")) == 0.5

    def test_smooth_fixed_point(self):
        assert clamp_and_step(0.5, RampParams(0, 1, "smooth-step")) == 0.5

    def test_smooth_quarter(self):
        assert clamp_and_step(0.25, RampParams(0, 1, "smooth-step")) == 0.15625

    def test_cartoon_threshold(self):
        hard = RampParams(0.5, 0.5, "linear")
        assert clamp_and_step(0.3, hard) == 0.0
        assert clamp_and_step(0.7, hard) == 1.0
        assert clamp_and_step(0.5, hard) == 1.0

    @pytest.mark.parametrize("step", ["linear", "smooth-step", "smoother-step"])
    def test_edges(self, step):
        p = RampParams(0.2, 0.7, step)
        assert clamp_and_step(0.1, p) == 0.0
        assert clamp_and_step(0.2, p) == 0.0
        assert clamp_and_step(0.7, p) == 1.0
        assert clamp_and_step(0.95, p) == 1.0

    @pytest.mark.parametrize("step", ["linear", "smooth-step", "smoother-step"])
    @given(a=finite, b=finite)
    @settings(max_examples=60, deadline=None)
    def test_monotone(self, step, a, b):
        p = RampParams(-0.5, 1.25, step)
        lo, hi = min(a, b), max(a, b)
        assert clamp_and_step(lo, p) <= clamp_and_step(hi, p)

    @pytest.mark.parametrize("step", ["linear", "smooth-step", "smoother-step"])
    @given(t=st.floats(min_value=-2, max_value=2, allow_nan=False))
    @settings(max_examples=60, deadline=None)
    def test_range(self, step, t):
        assert 0.0 <= clamp_and_step(t, RampParams(0.1, 0.6, step)) <= 1.0

    def test_endpoint_flatness(self):
        # one-sided difference quotients at the ramp ends
        eps = 1e-4
        smooth = clamp_and_step(eps, RampParams(0, 1, "smooth-step")) / eps
        assert smooth <= 3 * eps
        smoother = clamp_and_step(eps, RampParams(0, 1, "smoother-step")) / eps
        # the quintic's quotient is 10 eps^2 + O(eps^3)
        assert smoother <= 10 * eps * eps * (1 + 1e-9)
        # symmetric at the top end
        top = (1.0 - clamp_and_step(1.0 - eps, RampParams(0, 1, "smoother-step"))) / eps
        assert top <= 10 * eps * eps * (1 + 1e-6)

    def test_array_input(self):
        out = clamp_and_step(np.array([-1.0, 0.25, 2.0]), RampParams(0, 1, "smooth-step"))
        assert np.allclose(out, [0.0, 0.15625, 1.0])

    def test_validation(self):
        with pytest.raises(ValueError):
            RampParams(0, 1, "cubic")
        with pytest.raises(ValueError):
            RampParams(1.0, 0.0)


class TestLightDirection:
    def test_directional_constant(self):
        light = LightSpec(kind="directional", direction=(0, 0, 1))
        assert np.allclose(light_direction(light, (0.3, 0.9, 0.0)), [0, 0, 1])

    def test_point_overhead(self):
        light = LightSpec(kind="point", position=(0, 0, 1))
        assert np.allclose(light_direction(light, (0, 0, 0)), [0, 0, 1])

    def test_point_diagonal(self):
        light = LightSpec(kind="point", position=(1, 1, 0))
        s = 1 / math.sqrt(2)
        assert np.allclose(light_direction(light, (0, 0, 0)), [s, s, 0])

    def test_coincident_errors(self):
        light = LightSpec(kind="point", position=(0.5, 0.5, 0.0))
        with pytest.raises(ValueError, match="coincide"):
            light_direction(light, (0.5, 0.5, 0.0))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            LightSpec(kind="directional", direction=(0, 0, 2))
        with pytest.raises(ValueError):
            LightSpec(kind="point", position=(0, 0, 1), color=(2, 0, 0))
        with pytest.raises(ValueError):
            LightSpec(kind="spot", direction=(0, 0, 1))


class TestDiffuse:
    def test_full(self):
        assert diffuse_term((0, 0, 1), (0, 0, 1), unit_ramp) == 1.0

    def test_grazing(self):
        assert diffuse_term((0, 0, 1), (1, 0, 0), unit_ramp) == 0.0

    def test_sixty_degrees(self):
        L = (0.0, math.sqrt(3) / 2, 0.5)
        assert diffuse_term((0, 0, 1), L, unit_ramp) == pytest.approx(0.5, abs=1e-12)

    @given(st.integers(0, 10_000))
    @settings(max_examples=50, deadline=None)
    def test_symmetry(self, seed):
        n = random_unit(seed)
        l = random_unit(seed + 1)
        p = RampParams(-0.8, 0.9, "smooth-step")
        assert diffuse_term(n, l, p) == diffuse_term(l, n, p)


class TestSpecular:
    def test_retroreflection(self):
        assert specular_raw((0, 0, 1), (0, 0, 1)) == 1.0

    def test_orthogonal(self):
        assert specular_raw((0, 0, 1), (1, 0, 0)) == 0.0

    def test_forty_five_mirror(self):
        s = math.sqrt(0.5)
        assert specular_raw((s, 0, s), (1, 0, 0)) == pytest.approx(1.0, abs=1e-12)

    @given(st.integers(0, 10_000))
    @settings(max_examples=50, deadline=None)
    def test_flat_normal_gives_lz(self, seed):
        l = random_unit(seed)
        assert specular_raw((0.0, 0.0, 1.0), l) == pytest.approx(l[2], abs=1e-12)

    def test_ramped(self):
        assert specular_term((0, 0, 1), (0, 0, 1), unit_ramp) == 1.0
