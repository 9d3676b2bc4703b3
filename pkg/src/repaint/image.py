"""Image container, PPM/PGM/PNG I/O, wrapped bilinear sampling, Gaussian blur.

Everything downstream consumes these images: samples are normalized
floats, nominally in [0, 1] on load and save (intermediate buffers may
exceed that range until the final clamp). Pixel (i, j) has its center at
continuous coordinate (i + 0.5, j + 0.5); texture coordinate (u, v) in
[0, 1]^2 maps to (u * width, v * height).
"""

import io
import math

import numpy as np

from ._numba import njit, prange


class ImageError(Exception):
    """Raised for unreadable, unsupported, or malformed image data."""


class Image:
    """Immutable rectangular grid of 1- or 3-channel float32 samples.

    Data is stored row-major with shape (height, width, channels) and is
    write-locked after construction, so images may be shared freely
    between worker threads.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.float32, copy=True)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3:
            raise ImageError(f"image data must be 2- or 3-dimensional, got shape {arr.shape}")
        h, w, c = arr.shape
        if c not in (1, 3):
            raise ImageError(f"images must have 1 or 3 channels, got {c}")
        if h < 1 or w < 1:
            raise ImageError(f"zero-dimension image: {w}x{h}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Image is immutable")

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def channels(self):
        return self.data.shape[2]

    def to_rgb(self):
        """Return self if 3-channel, else the gray channel replicated."""
        if self.channels == 3:
            return self
        return Image(np.repeat(self.data, 3, axis=2))

    @classmethod
    def constant(cls, width, height, value, channels=3):
        """Uniform image; `value` is a scalar or per-channel sequence."""
        value = np.broadcast_to(np.asarray(value, dtype=np.float32), (channels,))
        return cls(np.broadcast_to(value, (height, width, channels)))

    def __repr__(self):
        return f"Image({self.width}x{self.height}x{self.channels})"


# ---------------------------------------------------------------------------
# file I/O

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def load_image(path):
    """Load a binary PPM (P6), PGM (P5), or PNG file into [0, 1] floats."""
    with open(path, "rb") as f:
        raw = f.read()
    return load_image_bytes(raw, name=str(path))


def load_image_bytes(raw, name="<bytes>"):
    """Decode raw image bytes; format sniffed from the magic number."""
    if raw[:2] in (b"P6", b"P5"):
        return _decode_pnm(raw, name)
    if raw[: len(_PNG_MAGIC)] == _PNG_MAGIC:
        return _decode_png(raw, name)
    raise ImageError(f"{name}: unsupported format (expected P5/P6 PNM or PNG)")


def _decode_pnm(raw, name):
    magic = raw[:2]
    channels = 3 if magic == b"P6" else 1
    pos = 2
    fields = []
    # header tokens: width, height, maxval; '#' comments run to end of line
    while len(fields) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(raw):
            raise ImageError(f"{name}: unreadable (truncated header)")
        if raw[pos : pos + 1] == b"#":
            eol = raw.find(b"\n", pos)
            if eol < 0:
                raise ImageError(f"{name}: unreadable (truncated header)")
            pos = eol + 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        try:
            fields.append(int(raw[start:pos]))
        except ValueError:
            raise ImageError(f"{name}: unreadable (bad header token {raw[start:pos]!r})") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ImageError(f"{name}: zero-dimension image ({width}x{height})")
    if not (0 < maxval < 256):
        raise ImageError(f"{name}: unsupported maxval {maxval} (8-bit only)")
    pos += 1  # single whitespace byte after maxval
    n = width * height * channels
    pixels = raw[pos : pos + n]
    if len(pixels) < n:
        raise ImageError(f"{name}: unreadable (truncated pixel data, {len(pixels)}/{n} bytes)")
    arr = np.frombuffer(pixels, dtype=np.uint8).astype(np.float32) / np.float32(maxval)
    return Image(arr.reshape(height, width, channels))


def _decode_png(raw, name):
    from PIL import Image as PILImage

    try:
        pil = PILImage.open(io.BytesIO(raw))
        pil.load()
    except Exception as exc:
        raise ImageError(f"{name}: unreadable ({exc})") from exc
    if pil.mode in ("L", "I;16", "I"):
        pil = pil.convert("L")
        channels = 1
    else:
        pil = pil.convert("RGB")
        channels = 3
    arr = np.asarray(pil, dtype=np.float32) / 255.0
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    return Image(arr[:, :, :channels])


def quantize(img):
    """Clamp to [0, 1] and quantize to uint8, rounding half up."""
    clamped = np.clip(img.data.astype(np.float64), 0.0, 1.0)
    return np.floor(clamped * 255.0 + 0.5).astype(np.uint8)


def save_image(img, path):
    """Write 8-bit PPM/PGM (by channel count) or PNG (by .png suffix).

    Quantization rounds half up, so load(save(img)) reproduces every
    quantized sample exactly.
    """
    path = str(path)
    bytes8 = quantize(img)
    if path.lower().endswith(".png"):
        from PIL import Image as PILImage

        mode = "RGB" if img.channels == 3 else "L"
        PILImage.fromarray(bytes8.squeeze(axis=2) if img.channels == 1 else bytes8, mode).save(path)
        return
    magic = b"P6" if img.channels == 3 else b"P5"
    header = magic + b"\n%d %d\n255\n" % (img.width, img.height)
    with open(path, "wb") as f:
        f.write(header)
        f.write(bytes8.tobytes())


def encode_png_bytes(img):
    """PNG-encode an image in memory (used by the render service)."""
    from PIL import Image as PILImage

    bytes8 = quantize(img)
    mode = "RGB" if img.channels == 3 else "L"
    buf = io.BytesIO()
    PILImage.fromarray(bytes8.squeeze(axis=2) if img.channels == 1 else bytes8, mode).save(buf, format="PNG")
    return buf.getvalue()


def encode_pnm_bytes(img):
    """PPM/PGM-encode an image in memory."""
    bytes8 = quantize(img)
    magic = b"P6" if img.channels == 3 else b"P5"
    return magic + b"\n%d %d\n255\n" % (img.width, img.height) + bytes8.tobytes()


# ---------------------------------------------------------------------------
# sampling and filtering

def sample_wrapped(img, x, y):
    """Bilinearly sample at continuous pixel coordinates, wrapping both axes.

    Coordinates are reduced modulo (width, height); neighbor indices wrap
    too, so the function is exactly periodic. `x` and `y` may be scalars
    or arrays; the result gains a trailing channel axis.
    """
    h, w, _ = img.data.shape
    xf = np.asarray(x, dtype=np.float64) - 0.5
    yf = np.asarray(y, dtype=np.float64) - 0.5
    x0 = np.floor(xf)
    y0 = np.floor(yf)
    fx = (xf - x0)[..., np.newaxis]
    fy = (yf - y0)[..., np.newaxis]
    i0 = x0.astype(np.int64) % w
    j0 = y0.astype(np.int64) % h
    i1 = (i0 + 1) % w
    j1 = (j0 + 1) % h
    d = img.data
    t00 = d[j0, i0]
    top = t00 + fx * (d[j0, i1] - t00)
    b00 = d[j1, i0]
    bot = b00 + fx * (d[j1, i1] - b00)
    # scalar query -> one (channels,) color; array query -> (..., channels);
    # the interpolation runs in float64 and matches _sample_wrapped_kernel bit for bit
    return (top + fy * (bot - top)).astype(np.float32)


@njit(cache=True, parallel=True)
def _sample_wrapped_kernel(data, xs, ys, out):
    h, w, c = data.shape
    n = xs.shape[0]
    for p in prange(n):
        x = xs[p] - 0.5
        y = ys[p] - 0.5
        x0 = math.floor(x)
        y0 = math.floor(y)
        fx = x - x0
        fy = y - y0
        i0 = int(x0) % w
        j0 = int(y0) % h
        i1 = i0 + 1 if i0 + 1 < w else 0
        j1 = j0 + 1 if j0 + 1 < h else 0
        for k in range(c):
            top = data[j0, i0, k] + fx * (data[j0, i1, k] - data[j0, i0, k])
            bot = data[j1, i0, k] + fx * (data[j1, i1, k] - data[j1, i0, k])
            out[p, k] = top + fy * (bot - top)


def sample_wrapped_field(img, xs, ys):
    """Bulk sample_wrapped over whole coordinate grids.

    Same sampling convention as sample_wrapped (wrapped bilinear at pixel
    centers), fused into one pass; this is what the image warps use.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    out = np.empty(xs.shape + (img.channels,), dtype=np.float32)
    _sample_wrapped_kernel(
        img.data, xs.reshape(-1), ys.reshape(-1), out.reshape(-1, img.channels)
    )
    return out


def gaussian_kernel(sigma):
    """Normalized 1-D Gaussian with kernel radius ceil(3*sigma)."""
    radius = math.ceil(3.0 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (xs / sigma) ** 2)
    return (k / k.sum()).astype(np.float32)


def gaussian_blur(img, sigma):
    """Separable Gaussian blur with wrapped boundary; sigma=0 is identity."""
    if sigma < 0:
        raise ValueError(f"blur sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return img
    from scipy.ndimage import convolve1d

    k = gaussian_kernel(sigma)
    out = convolve1d(img.data, k, axis=0, mode="wrap")
    out = convolve1d(out, k, axis=1, mode="wrap")
    return Image(out)
