"""Probabilistic anomaly generation.

For each anomaly a rectangular patch placement is drawn in the target
image. An ensemble of raters then independently draws a source patch
placement, an interpolation factor, and a circular mask inside the
patch; each rater's draw is blended into its own copy of the target
through the Poisson solve, restricted to the mask. The pixelwise mean
and population variance of the rater composites form the training
signal; the label is the absolute difference between the target and
the mean composite.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDistribution, InvalidInput
from .gradient import BlendParams, PatchRegion
from .seeding import derive_rng
from .solver import blend_patch

_REJECTION_LIMIT = 1000
_DISJOINT_RETRIES = 100


@dataclass(frozen=True)
class MaskDistribution:
    """Normal distributions for disc radius and center, in patch pixels."""

    radius_mean: float
    radius_sigma: float
    loc_mean_x: float
    loc_mean_y: float
    loc_sigma_x: float
    loc_sigma_y: float

    def __post_init__(self):
        if self.radius_sigma < 0 or self.loc_sigma_x < 0 or self.loc_sigma_y < 0:
            raise InvalidInput("mask distribution sigmas must be >= 0")


@dataclass(frozen=True)
class MaskConfig:
    """Mask distribution parameters as fractions of the patch size."""

    radius_mean_frac: float = 0.25
    radius_sigma_frac: float = 0.125
    loc_sigma_frac: float = 0.125

    def for_patch(self, patch_w: int, patch_h: int) -> MaskDistribution:
        side = min(patch_w, patch_h)
        return MaskDistribution(
            radius_mean=self.radius_mean_frac * side,
            radius_sigma=self.radius_sigma_frac * side,
            loc_mean_x=(patch_w - 1) / 2.0,
            loc_mean_y=(patch_h - 1) / 2.0,
            loc_sigma_x=self.loc_sigma_frac * patch_w,
            loc_sigma_y=self.loc_sigma_frac * patch_h,
        )


@dataclass(frozen=True)
class GeneratorConfig:
    patch_frac_min: float = 0.06
    patch_frac_max: float = 0.25
    alpha_min: float = 0.05
    alpha_max: float = 0.95
    gain: float = 2.0
    k_min: int = 1
    k_max: int = 4
    raters: int = 8
    mask: MaskConfig = field(default_factory=MaskConfig)
    label_threshold: float = 0.05
    seed: int = 0
    disjoint: bool = False

    def __post_init__(self):
        if not 0.0 < self.patch_frac_min <= self.patch_frac_max <= 0.5:
            raise InvalidInput(
                "patch fractions must satisfy 0 < min <= max <= 0.5, got "
                f"[{self.patch_frac_min}, {self.patch_frac_max}]"
            )
        if not 0.0 <= self.alpha_min <= self.alpha_max <= 1.0:
            raise InvalidInput("alpha range must satisfy 0 <= min <= max <= 1")
        if self.gain < 1.0:
            raise InvalidInput(f"gain must be >= 1, got {self.gain}")
        if not 1 <= self.k_min <= self.k_max:
            raise InvalidInput("anomaly counts must satisfy 1 <= k_min <= k_max")
        if self.raters < 1:
            raise InvalidInput("raters must be >= 1")
        if self.label_threshold < 0:
            raise InvalidInput("label_threshold must be >= 0")


@dataclass(frozen=True)
class RaterDraw:
    source_index: int
    source_origin: tuple[int, int]
    alpha: float
    disc: tuple[float, float, float]  # center x, center y, radius in patch coords


@dataclass(frozen=True)
class AnomalyRecord:
    target_origin: tuple[int, int]
    patch_size: tuple[int, int]
    raters: list[RaterDraw]


@dataclass(frozen=True)
class AnomalyBundle:
    mean_image: np.ndarray
    variance_map: np.ndarray
    label_map: np.ndarray
    binary_mask: np.ndarray
    anomaly_count: int
    anomalies: list[AnomalyRecord]

    def metadata(self) -> dict:
        return {
            "anomaly_count": self.anomaly_count,
            "anomalies": [dataclasses.asdict(a) for a in self.anomalies],
        }


def sample_patch_spec(
    rng: np.random.Generator, image_w: int, image_h: int, cfg: GeneratorConfig
) -> tuple[PatchRegion, PatchRegion]:
    """Draw a patch size plus independent target and source placements.

    Side lengths are uniform in [patch_frac_min, patch_frac_max] of the
    corresponding image side; placements are uniform among positions
    that keep a one-pixel margin to the image border.
    """
    if cfg.patch_frac_max * min(image_w, image_h) < 3:
        raise InvalidInput(
            f"image {image_w}x{image_h} is too small for patch fraction "
            f"{cfg.patch_frac_max}"
        )
    pw, ph = _draw_patch_size(rng, cfg, image_w, image_h)
    tx, ty = _draw_origin(rng, pw, ph, image_w, image_h)
    sx, sy = _draw_origin(rng, pw, ph, image_w, image_h)
    return (
        PatchRegion(tx, ty, pw, ph),
        PatchRegion(sx, sy, pw, ph),
    )


def _draw_patch_size(rng, cfg, image_w, image_h):
    fw = rng.uniform(cfg.patch_frac_min, cfg.patch_frac_max)
    fh = rng.uniform(cfg.patch_frac_min, cfg.patch_frac_max)
    pw = max(3, int(round(fw * image_w)))
    ph = max(3, int(round(fh * image_h)))
    return pw, ph


def _draw_origin(rng, pw, ph, image_w, image_h):
    if pw > image_w - 2 or ph > image_h - 2:
        raise InvalidInput(
            f"patch {pw}x{ph} cannot be placed in a {image_w}x{image_h} image "
            "with a 1-pixel margin"
        )
    x = int(rng.integers(1, image_w - pw))
    y = int(rng.integers(1, image_h - ph))
    return x, y


def sample_circle_mask(
    rng: np.random.Generator, patch_w: int, patch_h: int, dist: MaskDistribution
) -> np.ndarray:
    """Rasterised disc drawn from the mask distribution, patch-sized boolean.

    Radius and center are redrawn until the disc lies inside the patch
    without touching its outer ring; the radius is additionally
    restricted to [2, floor(min(side)/2) - 1].
    """
    cx, cy, r = draw_circle(rng, patch_w, patch_h, dist)
    return rasterize_disc(patch_w, patch_h, cx, cy, r)


def draw_circle(
    rng: np.random.Generator, patch_w: int, patch_h: int, dist: MaskDistribution
) -> tuple[float, float, float]:
    if patch_w < 3 or patch_h < 3:
        raise InvalidInput(f"patch must be at least 3x3, got {patch_w}x{patch_h}")
    r_lo = 2.0
    r_hi = float(min(patch_w, patch_h) // 2 - 1)
    for _ in range(_REJECTION_LIMIT):
        r = rng.normal(dist.radius_mean, dist.radius_sigma)
        if not r_lo <= r <= r_hi:
            continue
        x = rng.normal(dist.loc_mean_x, dist.loc_sigma_x)
        y = rng.normal(dist.loc_mean_y, dist.loc_sigma_y)
        if x - r >= 1 and x + r <= patch_w - 2 and y - r >= 1 and y + r <= patch_h - 2:
            return float(x), float(y), float(r)
    raise DegenerateDistribution(
        f"no admissible disc after {_REJECTION_LIMIT} draws "
        f"(radius ~ N({dist.radius_mean:.3g}, {dist.radius_sigma:.3g}) "
        f"in a {patch_w}x{patch_h} patch)"
    )


def rasterize_disc(patch_w: int, patch_h: int, cx: float, cy: float, r: float) -> np.ndarray:
    ys, xs = np.mgrid[0:patch_h, 0:patch_w]
    return (xs - cx) ** 2 + (ys - cy) ** 2 <= r * r


def generate_anomalies(
    target: np.ndarray,
    sources: list[np.ndarray],
    cfg: GeneratorConfig,
    seed: int | None = None,
    image_index: int = 0,
    backend: str = "dst",
) -> AnomalyBundle:
    """Run the full probabilistic generator on one target image.

    Draws k ~ UniformInt[k_min, k_max] anomalies; each anomaly gets its
    own independent rater ensemble. Rater r of anomaly a cycles into
    source image (a * raters + r) mod len(sources) and blends the full
    patch, restricting the amplified field to its disc, into a private
    composite. Pixels outside every patch stay bit-identical to the
    target in all composites, so label and variance are exactly zero
    there.
    """
    target = np.asarray(target, dtype=np.float64)
    if target.ndim != 2 or min(target.shape) < 4:
        raise InvalidInput("target must be a 2-D image of at least 4x4 pixels")
    if not sources:
        raise InvalidInput("at least one source image is required")
    sources = [np.asarray(s, dtype=np.float64) for s in sources]
    for s in sources:
        if s.shape != target.shape:
            raise InvalidInput(
                f"source shape {s.shape} != target shape {target.shape}"
            )
    if seed is None:
        seed = cfg.seed
    img_h, img_w = target.shape

    rng_img = derive_rng(seed, image_index)
    k = int(rng_img.integers(cfg.k_min, cfg.k_max + 1))

    composites = [target.copy() for _ in range(cfg.raters)]
    records: list[AnomalyRecord] = []
    placed: list[tuple[int, int, int, int]] = []

    for a in range(k):
        try:
            rec = _generate_one_anomaly(
                composites, target, sources, cfg, seed, image_index, a,
                img_w, img_h, placed, backend,
            )
        except (InvalidInput, DegenerateDistribution) as exc:
            raise type(exc)(f"anomaly {a}: {exc}") from exc
        records.append(rec)

    deltas = np.stack([img - target for img in composites])
    mean_delta = deltas.mean(axis=0)
    mean_image = target + mean_delta
    variance_map = np.mean((deltas - mean_delta) ** 2, axis=0)
    label_map = np.abs(target - mean_image)
    binary_mask = label_map > cfg.label_threshold
    return AnomalyBundle(
        mean_image=mean_image,
        variance_map=variance_map,
        label_map=label_map,
        binary_mask=binary_mask,
        anomaly_count=k,
        anomalies=records,
    )


def _generate_one_anomaly(
    composites, target, sources, cfg, seed, image_index, a,
    img_w, img_h, placed, backend,
):
    rng_a = derive_rng(seed, image_index, a)
    pw, ph = _draw_patch_size(rng_a, cfg, img_w, img_h)
    tx, ty = _place_target_patch(rng_a, pw, ph, img_w, img_h, cfg, placed)
    placed.append((tx, ty, pw, ph))
    dist = cfg.mask.for_patch(pw, ph)
    region = PatchRegion(tx, ty, pw, ph)

    draws: list[RaterDraw] = []
    for r in range(cfg.raters):
        rng_r = derive_rng(seed, image_index, a, r)
        src_idx = (a * cfg.raters + r) % len(sources)
        sx, sy = _draw_origin(rng_r, pw, ph, img_w, img_h)
        alpha = float(rng_r.uniform(cfg.alpha_min, cfg.alpha_max))
        cx, cy, rad = draw_circle(rng_r, pw, ph, dist)
        # solve over the whole patch: the far Dirichlet ring lets the
        # disc's deviation develop instead of being pinned right at it
        mask = rasterize_disc(pw, ph, cx, cy, rad)
        composites[r], _ = blend_patch(
            composites[r],
            sources[src_idx],
            region,
            PatchRegion(sx, sy, pw, ph),
            BlendParams(alpha=alpha, gain=cfg.gain),
            mask=mask,
            backend=backend,
        )
        draws.append(RaterDraw(src_idx, (sx, sy), alpha, (cx, cy, rad)))
    return AnomalyRecord(target_origin=(tx, ty), patch_size=(pw, ph), raters=draws)


def _place_target_patch(rng, pw, ph, img_w, img_h, cfg, placed):
    if not cfg.disjoint:
        return _draw_origin(rng, pw, ph, img_w, img_h)
    for _ in range(_DISJOINT_RETRIES):
        tx, ty = _draw_origin(rng, pw, ph, img_w, img_h)
        if all(not _overlaps((tx, ty, pw, ph), other) for other in placed):
            return tx, ty
    raise InvalidInput(
        f"could not place a disjoint {pw}x{ph} patch after "
        f"{_DISJOINT_RETRIES} retries"
    )


def _overlaps(a, b):
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah
