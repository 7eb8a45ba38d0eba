"""Batch generation and evaluation runs.

Each image's synthetic outputs depend only on (seed, image index, its
own pixels, its partner's pixels), so any worker count produces
byte-identical files. Workers write their own outputs; the coordinator
only aggregates status.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import EvalConfig, RunConfig
from .errors import InvalidInput, NoInputs, UndefinedMetric
from .io import read_image, write_image
from .manifest import Manifest
from .metrics import (
    auroc,
    average_precision,
    froc,
    sample_score,
    sensitivity_at_avg_fp,
)
from .raster import equalize_histogram, normalize, resize_bilinear
from .sampler import generate_anomalies
from .seeding import PAIRING_STREAM, derive_rng

log = logging.getLogger("ppii")

OUTPUT_SCALE = 65535
_MAP_SUFFIXES = ("_mean.png", "_variance.png", "_label.png", "_mask.png")


def preprocess(img: np.ndarray, cfg: RunConfig) -> np.ndarray:
    if cfg.normalize:
        img = normalize(img)
    if cfg.resize:
        img = resize_bilinear(img, cfg.resize, cfg.resize)
    if cfg.equalize:
        img = equalize_histogram(img)
    return img


def pair_indices(n: int, seed: int, allow_self_pair: bool = False) -> np.ndarray:
    """Seeded partner assignment: image i blends with image perm[i].

    Without self-pairing the permutation is resampled until it is a
    derangement; a single image can only pair with itself.
    """
    if n < 1:
        raise InvalidInput("cannot pair an empty image set")
    rng = derive_rng(seed, PAIRING_STREAM)
    if n == 1:
        if not allow_self_pair:
            log.warning("single input image: falling back to self-pairing")
        return np.zeros(1, dtype=np.int64)
    perm = rng.permutation(n)
    if not allow_self_pair:
        while (perm == np.arange(n)).any():
            perm = rng.permutation(n)
    return perm


@dataclass
class GenerateReport:
    results: list = field(default_factory=list)  # (stem, error message or None)

    @property
    def failures(self) -> list[tuple[str, str]]:
        return [(stem, err) for stem, err in self.results if err is not None]

    @property
    def ok(self) -> bool:
        return not self.failures


def _generate_job(args):
    (out_dir, stem, target, partner, gen_cfg, seed, index, backend, meta) = args
    try:
        bundle = generate_anomalies(
            target, [partner], gen_cfg, seed=seed, image_index=index, backend=backend
        )
        out_path = Path(out_dir) / stem
        out_path.parent.mkdir(parents=True, exist_ok=True)
        write_image(f"{out_path}_mean.png", bundle.mean_image)
        write_image(f"{out_path}_variance.png", bundle.variance_map)
        write_image(f"{out_path}_label.png", bundle.label_map)
        write_image(f"{out_path}_mask.png", bundle.binary_mask.astype(np.float64))
        sidecar = {"scale": OUTPUT_SCALE, "seed": seed, "image_index": index}
        sidecar.update(meta)
        sidecar.update(bundle.metadata())
        with open(f"{out_path}.json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
        return stem, None
    except Exception as exc:  # per-image failures must not kill the batch
        return stem, f"{type(exc).__name__}: {exc}"


def run_generate(
    cfg: RunConfig,
    manifest: Manifest,
    output_dir: str | os.PathLike,
    seed: int,
    workers: int | None = None,
) -> GenerateReport:
    """Generate synthetic anomalies for every manifest image.

    Writes, per input image, four 16-bit PNG maps (mean, variance,
    label, binary mask, all scaled by 65535) and a JSON sidecar with
    the drawn parameters. Per-image failures are logged and skipped.
    """
    if len(manifest) == 0:
        raise NoInputs("manifest has no entries")
    if workers is None:
        workers = cfg.workers
    if workers < 1:
        raise InvalidInput(f"workers must be >= 1, got {workers}")
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    images = []
    for entry in manifest:
        img = preprocess(read_image(manifest.absolute(entry)), cfg)
        images.append(img)
    shapes = {img.shape for img in images}
    if len(shapes) > 1:
        raise InvalidInput(
            f"inputs disagree in size after preprocessing: {sorted(shapes)}; "
            "set preprocess.resize to force a common size"
        )

    perm = pair_indices(len(images), seed, cfg.allow_self_pair)
    jobs = []
    for i, entry in enumerate(manifest):
        stem = entry.path.rsplit(".", 1)[0]
        meta = {"source": entry.path, "partner": manifest.entries[perm[i]].path}
        jobs.append((
            str(out_dir), stem, images[i], images[perm[i]],
            cfg.generator, seed, i, cfg.solver, meta,
        ))

    report = GenerateReport()
    if workers == 1:
        outcomes = map(_generate_job, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        outcomes = pool.map(_generate_job, jobs)
    for stem, err in outcomes:
        if err is not None:
            log.error("generation failed for %s: %s", stem, err)
        report.results.append((stem, err))
    if workers > 1:
        pool.shutdown()
    return report


def _aligned_map_files(pred_dir: Path, gt_dir: Path) -> list[tuple[str, Path, Path]]:
    pred_names = {p.name for p in pred_dir.glob("*.png")}
    gt_names = {p.name for p in gt_dir.glob("*.png")}
    if not pred_names and not gt_names:
        raise NoInputs(f"no PNG files under {pred_dir} or {gt_dir}")
    if pred_names != gt_names:
        only_pred = sorted(pred_names - gt_names)
        only_gt = sorted(gt_names - pred_names)
        raise InvalidInput(
            "prediction and ground-truth file sets differ: "
            f"only in predictions {only_pred}, only in ground truth {only_gt}"
        )
    return [(n, pred_dir / n, gt_dir / n) for n in sorted(pred_names)]


def run_evaluate(
    pred_dir: str | os.PathLike,
    gt_dir: str | os.PathLike,
    report_path: str | os.PathLike,
    eval_cfg: EvalConfig | None = None,
) -> dict:
    """Score a directory of prediction maps against ground-truth masks.

    File sets are aligned by name. Ground-truth pixels count as lesion
    at intensity > 0.5; a sample is anomalous when any pixel is. The
    JSON report holds pixel AUROC, sample AUROC and AP under the
    configured reducer, the FROC curve, and the sensitivity at the
    target average false-positive rate. Metrics whose input is single
    class are reported as null.
    """
    if eval_cfg is None:
        eval_cfg = EvalConfig()
    pairs = _aligned_map_files(Path(pred_dir), Path(gt_dir))

    preds, gts = [], []
    for _, pred_path, gt_path in pairs:
        pred = read_image(pred_path)
        gt = read_image(gt_path)
        if pred.shape != gt.shape:
            raise InvalidInput(
                f"{pred_path.name}: prediction shape {pred.shape} != "
                f"ground truth shape {gt.shape}"
            )
        preds.append(pred)
        gts.append(gt > 0.5)

    pixel_scores = np.concatenate([p.ravel() for p in preds])
    pixel_labels = np.concatenate([g.ravel() for g in gts])
    sample_scores = np.array([
        sample_score(p, reducer=eval_cfg.reducer, k=eval_cfg.topk) for p in preds
    ])
    sample_labels = np.array([int(g.any()) for g in gts])

    def guarded(fn, *args):
        try:
            return fn(*args)
        except UndefinedMetric as exc:
            log.warning("metric undefined: %s", exc)
            return None

    report = {
        "auroc_pixel": guarded(auroc, pixel_scores, pixel_labels),
        "auroc_sample": guarded(auroc, sample_scores, sample_labels),
        "ap_sample": guarded(average_precision, sample_scores, sample_labels),
        "froc_points": [],
        "sensitivity_at_10fp": None,
    }
    thresholds = np.arange(1, eval_cfg.thresholds + 1) / (eval_cfg.thresholds + 1)
    try:
        curve = froc(preds, gts, thresholds, hit_criterion=eval_cfg.hit_criterion)
        report["froc_points"] = [[f, s] for f, s in curve.points]
        report["sensitivity_at_10fp"] = sensitivity_at_avg_fp(curve, eval_cfg.fp_target)
    except UndefinedMetric as exc:
        log.warning("metric undefined: %s", exc)

    report_path = Path(report_path)
    if report_path.parent != Path(""):
        report_path.parent.mkdir(parents=True, exist_ok=True)
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return report
