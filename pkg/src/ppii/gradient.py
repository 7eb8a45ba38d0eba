"""Guidance fields over patch regions.

A patch region is a rectangle inside a host image whose one-pixel
outer ring is its boundary and whose remaining pixels are the
interior. The guidance field stores one value per unordered
4-neighborhood pixel pair: ``horiz[r, c]`` belongs to the pair
((r, c), (r, c+1)) and ``vert[r, c]`` to ((r, c), (r+1, c)), both
oriented first-pixel minus second-pixel. The reverse orientation is
the negation.

For each pair the field picks between the attenuated target gradient
and the amplified source gradient, whichever is larger in magnitude:

    v = (1 - alpha) * dT   if |(1 - alpha) * dT| > |gain * alpha * dS|
        gain * alpha * dS  otherwise

with dT and dS the target and source intensity differences across the
pair. Ties take the source branch. The gain multiplies the source
branch only; amplifying both sides would cancel in the comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InvalidInput


@dataclass(frozen=True)
class PatchRegion:
    """Rectangle at (x, y) of size width x height inside a host image."""

    x: int
    y: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 3 or self.height < 3:
            raise InvalidInput(
                f"patch must be at least 3x3, got {self.width}x{self.height}"
            )
        if self.x < 0 or self.y < 0:
            raise InvalidInput("patch origin must be non-negative")

    def validate_inside(self, img_h: int, img_w: int, margin: int = 0) -> None:
        if (
            self.x < margin
            or self.y < margin
            or self.x + self.width > img_w - margin
            or self.y + self.height > img_h - margin
        ):
            raise InvalidInput(
                f"patch {self.width}x{self.height}@({self.x},{self.y}) does not fit "
                f"a {img_w}x{img_h} image with margin {margin}"
            )

    @property
    def slices(self) -> tuple[slice, slice]:
        return (slice(self.y, self.y + self.height), slice(self.x, self.x + self.width))

    @property
    def interior_slices(self) -> tuple[slice, slice]:
        return (
            slice(self.y + 1, self.y + self.height - 1),
            slice(self.x + 1, self.x + self.width - 1),
        )


@dataclass(frozen=True)
class BlendParams:
    alpha: float
    gain: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidInput(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.gain < 1.0:
            raise InvalidInput(f"gain must be >= 1, got {self.gain}")


@dataclass(frozen=True)
class GuidanceField:
    horiz: np.ndarray  # (height, width - 1)
    vert: np.ndarray  # (height - 1, width)

    @property
    def patch_shape(self) -> tuple[int, int]:
        return self.horiz.shape[0], self.vert.shape[1]


def neighbor_pairs(region: PatchRegion) -> Iterator[tuple[tuple[int, int], tuple[int, int]]]:
    """Yield each unordered 4-neighborhood pair of the patch exactly once.

    Pairs are in patch-local (row, col) coordinates, horizontal pairs
    first, row-major. The total count is h*(w-1) + (h-1)*w.
    """
    w, h = region.width, region.height
    for r in range(h):
        for c in range(w - 1):
            yield (r, c), (r, c + 1)
    for r in range(h - 1):
        for c in range(w):
            yield (r, c), (r + 1, c)


def build_guidance_field(
    target_patch: np.ndarray,
    source_patch: np.ndarray,
    params: BlendParams,
    mask: np.ndarray | None = None,
) -> GuidanceField:
    """Build the mixed, amplified guidance field for a patch pair.

    With `mask` given (a boolean patch-sized array), the selection rule
    applies only to pairs whose both pixels are inside the mask; every
    other pair carries the plain target gradient, which makes the
    solved blend reproduce the target outside the mask.
    """
    target_patch = np.asarray(target_patch, dtype=np.float64)
    source_patch = np.asarray(source_patch, dtype=np.float64)
    if target_patch.shape != source_patch.shape:
        raise InvalidInput(
            f"patch shapes differ: {target_patch.shape} vs {source_patch.shape}"
        )
    if target_patch.ndim != 2 or min(target_patch.shape) < 3:
        raise InvalidInput("patches must be 2-D and at least 3x3")
    if mask is not None and mask.shape != target_patch.shape:
        raise InvalidInput(f"mask shape {mask.shape} != patch shape {target_patch.shape}")

    horiz = _select(
        target_patch[:, :-1] - target_patch[:, 1:],
        source_patch[:, :-1] - source_patch[:, 1:],
        params,
        None if mask is None else (mask[:, :-1] & mask[:, 1:]),
    )
    vert = _select(
        target_patch[:-1, :] - target_patch[1:, :],
        source_patch[:-1, :] - source_patch[1:, :],
        params,
        None if mask is None else (mask[:-1, :] & mask[1:, :]),
    )
    return GuidanceField(horiz=horiz, vert=vert)


def _select(dt, ds, params: BlendParams, pair_mask):
    target_term = (1.0 - params.alpha) * dt
    source_term = params.gain * params.alpha * ds
    v = np.where(np.abs(target_term) > np.abs(source_term), target_term, source_term)
    if pair_mask is not None:
        v = np.where(pair_mask, v, dt)
    return v


def divergence(field: GuidanceField, region: PatchRegion | None = None) -> np.ndarray:
    """Signed sum of field values around each interior pixel.

    For interior pixel p this is sum_q v_pq over its four neighbors,
    the right-hand side of the 5-point normal equations. Evaluating it
    on a field of plain image gradients gives 4*x_p - sum(neighbors),
    the 5-point Laplacian stencil of that image.
    """
    h, w = field.patch_shape
    if field.horiz.shape != (h, w - 1) or field.vert.shape != (h - 1, w):
        raise InvalidInput("guidance field component shapes are inconsistent")
    if region is not None and (region.height, region.width) != (h, w):
        raise InvalidInput(
            f"field is {w}x{h} but region is {region.width}x{region.height}"
        )
    hz = field.horiz
    vt = field.vert
    # interior pixel (r, c): H[r,c] - H[r,c-1] + V[r,c] - V[r-1,c]
    return (
        hz[1:-1, 1:]
        - hz[1:-1, :-1]
        + vt[1:, 1:-1]
        - vt[:-1, 1:-1]
    )
