"""Geometric augmentations: rotation, scaling, elastic deformation.

All three are realised as one backward warp with bilinear resampling
and border replication. Rotation and scaling act about the image
center; the output keeps the input size, so scaling implicitly crops
(factor > 1) or pads from the border (factor < 1). Elastic deformation
draws a coarse grid of Gaussian displacements, upsamples it bilinearly
to full resolution, and adds it to the sampling coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .raster import _check_raster, sample_bilinear

ROTATION_LIMIT_DEG = 10.0


@dataclass(frozen=True)
class ElasticSpec:
    grid_spacing: int = 64
    displacement_sigma: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class AugmentSpec:
    rotation_degrees: float = 0.0
    scale_factor: float = 1.0
    elastic: ElasticSpec | None = None
    scale_limits: tuple[float, float] = (0.9, 1.1)

    def __post_init__(self):
        if abs(self.rotation_degrees) > ROTATION_LIMIT_DEG + 1e-12:
            raise InvalidInput(
                f"rotation_degrees must lie in [-{ROTATION_LIMIT_DEG}, {ROTATION_LIMIT_DEG}]"
            )
        lo, hi = self.scale_limits
        if not 0 < lo <= hi:
            raise InvalidInput(f"scale_limits must satisfy 0 < lo <= hi, got {self.scale_limits}")
        if not lo <= self.scale_factor <= hi:
            raise InvalidInput(
                f"scale_factor must lie in [{lo}, {hi}], got {self.scale_factor}"
            )
        if self.elastic is not None and self.elastic.grid_spacing < 1:
            raise InvalidInput("elastic grid_spacing must be >= 1")


def augment(img: np.ndarray, spec: AugmentSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    """Apply the augmentation described by `spec`.

    The identity spec (0 degrees, factor 1, no elastic) reproduces the
    input exactly. Elastic displacements are drawn from `rng` when one
    is given, else from a generator seeded with ``spec.elastic.seed``.
    """
    img = _check_raster(img)
    h, w = img.shape
    cy = (h - 1) / 2.0
    cx = (w - 1) / 2.0
    grid_y, grid_x = np.meshgrid(
        np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij"
    )
    dy = grid_y - cy
    dx = grid_x - cx
    theta = np.deg2rad(spec.rotation_degrees)
    if theta != 0.0 or spec.scale_factor != 1.0:
        # inverse map: rotate by -theta, then divide by the scale factor
        cos_t = np.cos(-theta)
        sin_t = np.sin(-theta)
        src_y = cy + (sin_t * dx + cos_t * dy) / spec.scale_factor
        src_x = cx + (cos_t * dx - sin_t * dy) / spec.scale_factor
    else:
        src_y = grid_y
        src_x = grid_x
    if spec.elastic is not None and spec.elastic.displacement_sigma > 0:
        if rng is None:
            rng = np.random.default_rng(spec.elastic.seed)
        disp_y, disp_x = _elastic_field(h, w, spec.elastic, rng)
        src_y = src_y + disp_y
        src_x = src_x + disp_x
    return sample_bilinear(img, src_y, src_x)


def _elastic_field(h, w, elastic: ElasticSpec, rng):
    g = elastic.grid_spacing
    coarse_h = h // g + 2
    coarse_w = w // g + 2
    node_dy = rng.normal(0.0, elastic.displacement_sigma, size=(coarse_h, coarse_w))
    node_dx = rng.normal(0.0, elastic.displacement_sigma, size=(coarse_h, coarse_w))
    ys = np.arange(h, dtype=np.float64) / g
    xs = np.arange(w, dtype=np.float64) / g
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    return sample_bilinear(node_dy, gy, gx), sample_bilinear(node_dx, gy, gx)
