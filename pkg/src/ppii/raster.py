"""Intensity rasters and their basic transforms.

A raster is a 2-D float64 numpy array of intensities, nominally in
[0, 1] after :func:`normalize`. All functions are pure and return new
arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput


def _check_raster(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise InvalidInput("expected a nonempty 2-D intensity array")
    return img


def normalize(img: np.ndarray) -> np.ndarray:
    """Linearly rescale intensities to [0, 1].

    A constant image maps to all zeros, so the function is total and
    idempotent.
    """
    img = _check_raster(img)
    lo = img.min()
    hi = img.max()
    if hi == lo:
        return np.zeros_like(img)
    return (img - lo) / (hi - lo)


def equalize_histogram(img: np.ndarray, bins: int = 256) -> np.ndarray:
    """Global histogram equalisation on a [0, 1] image.

    Intensities are quantised to `bins` levels; each level v maps to
    (cdf(v) - cdf_min) / (N - cdf_min), the classic global-cdf rule.
    The mapping is monotone non-decreasing and the output stays in
    [0, 1]. A constant image is returned unchanged (the formula is
    degenerate there).
    """
    img = _check_raster(img)
    if bins < 2:
        raise InvalidInput(f"bins must be >= 2, got {bins}")
    if img.min() < -1e-12 or img.max() > 1.0 + 1e-12:
        raise InvalidInput("equalize_histogram expects a normalized [0, 1] image")
    levels = np.minimum((img * bins).astype(np.int64), bins - 1)
    hist = np.bincount(levels.ravel(), minlength=bins)
    cdf = np.cumsum(hist)
    n = img.size
    cdf_min = cdf[np.argmax(hist > 0)]  # count at the lowest occupied level
    if cdf_min == n:
        return img.copy()
    lut = (cdf - cdf_min) / float(n - cdf_min)
    return lut[levels]


def sample_bilinear(img: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Sample `img` at fractional (row, col) coordinates.

    Out-of-bounds coordinates are clamped to the border (replicate
    padding), so no artificial zero intensities appear at edges.
    """
    h, w = img.shape
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = ys - y0
    fx = xs - x0
    top = img[y0, x0] * (1.0 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1.0 - fx) + img[y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


def resize_bilinear(img: np.ndarray, new_w: int, new_h: int) -> np.ndarray:
    """Resize to new_w x new_h with bilinear interpolation.

    Grid endpoints are aligned, so resizing to the input size is the
    identity and output values never leave the input's [min, max].
    """
    img = _check_raster(img)
    if new_w < 1 or new_h < 1:
        raise InvalidInput(f"target size must be >= 1x1, got {new_w}x{new_h}")
    h, w = img.shape
    ys = _axis_coords(h, new_h)
    xs = _axis_coords(w, new_w)
    grid_y, grid_x = np.meshgrid(ys, xs, indexing="ij")
    return sample_bilinear(img, grid_y, grid_x)


def _axis_coords(src: int, dst: int) -> np.ndarray:
    if dst == 1:
        return np.full(1, (src - 1) / 2.0)
    return np.arange(dst, dtype=np.float64) * ((src - 1) / (dst - 1))
