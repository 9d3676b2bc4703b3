import numpy as np
import pytest

from repaint.image import Image
from repaint.shadow import warmup
from repaint.shape import NORMAL_KIND, ShapeField


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    # pay the JIT cost once, outside any timed assertion
    warmup()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)


def flat_shape(size):
    normals = np.zeros((size, size, 3), dtype=np.float32)
    normals[:, :, 2] = 1.0
    return ShapeField(normals=normals, kind=NORMAL_KIND)


def random_image(rng, w, h, channels=3):
    return Image(rng.random((h, w, channels)).astype(np.float32))


def smooth_height_image(seed, size, sigma_frac=0.08):
    from scipy.ndimage import gaussian_filter

    r = np.random.default_rng(seed)
    field = gaussian_filter(r.random((size, size)), sigma_frac * size, mode="wrap")
    field -= field.min()
    field /= field.max()
    return Image(field.astype(np.float32)[:, :, None])
