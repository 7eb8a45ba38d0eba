"""Evaluation metrics for anomaly predictions.

AUROC uses the rank (Mann-Whitney) formulation with half credit for
ties; average precision is the area under the precision-recall step
function with tied scores grouped into one cut. FROC counts a
ground-truth lesion as detected when any predicted pixel above the
threshold overlaps it, and every predicted connected component with
zero ground-truth overlap as one false positive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidInput, UndefinedMetric

log = logging.getLogger("ppii")

_STRUCTURE_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCTURE_8 = np.ones((3, 3), dtype=bool)


def _scores_labels(scores, labels):
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise InvalidInput(
            f"scores and labels differ in length: {scores.size} vs {labels.size}"
        )
    if scores.size == 0:
        raise InvalidInput("empty score set")
    uniq = np.unique(labels)
    if not np.isin(uniq, (0, 1)).all():
        raise InvalidInput("labels must be 0 or 1")
    return scores, labels.astype(np.int64)


def _average_ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks, tied values averaged."""
    order = np.argsort(x, kind="stable")
    sx = x[order]
    n = x.size
    starts = np.flatnonzero(np.r_[True, sx[1:] != sx[:-1]])
    ends = np.r_[starts[1:], n]
    group_rank = (starts + 1 + ends) / 2.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = np.repeat(group_rank, ends - starts)
    return ranks


def auroc(scores, labels) -> float:
    """Probability that a random positive outscores a random negative."""
    scores, labels = _scores_labels(scores, labels)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetric("auroc needs at least one positive and one negative")
    ranks = _average_ranks(scores)
    u = ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def average_precision(scores, labels) -> float:
    """Area under the precision-recall step function, ties grouped."""
    scores, labels = _scores_labels(scores, labels)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise UndefinedMetric("average precision needs at least one positive")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    # cut after the last element of each tied-score group
    n = scores.size
    ends = np.flatnonzero(np.r_[sorted_scores[1:] != sorted_scores[:-1], True])
    cum_tp = np.cumsum(sorted_labels)[ends]
    recall = cum_tp / n_pos
    precision = cum_tp / (ends + 1)
    prev_recall = np.r_[0.0, recall[:-1]]
    return float(np.sum((recall - prev_recall) * precision))


def connected_components(mask: np.ndarray, connectivity: int = 8) -> tuple[np.ndarray, int]:
    """Label connected regions of a binary raster.

    Labels are positive integers assigned in order of each component's
    first pixel in row-major scan order; background is 0.
    """
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise InvalidInput("mask must be 2-D")
    if connectivity not in (4, 8):
        raise InvalidInput(f"connectivity must be 4 or 8, got {connectivity}")
    structure = _STRUCTURE_4 if connectivity == 4 else _STRUCTURE_8
    raw, count = ndimage.label(mask != 0, structure=structure)
    if count == 0:
        return raw, 0
    # renumber by first row-major occurrence so the order is deterministic
    flat = raw.ravel()
    first = np.full(count + 1, flat.size, dtype=np.int64)
    idx = np.flatnonzero(flat)
    np.minimum.at(first, flat[idx], idx)
    order = np.argsort(first[1:], kind="stable")
    remap = np.zeros(count + 1, dtype=raw.dtype)
    remap[1:][order] = np.arange(1, count + 1)
    return remap[raw], count


@dataclass(frozen=True)
class FrocCurve:
    avg_fp: np.ndarray
    sensitivity: np.ndarray
    thresholds: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return [(float(f), float(s)) for f, s in zip(self.avg_fp, self.sensitivity)]


HIT_CRITERIA = ("overlap", "center")


def froc(pred_maps, gt_masks, thresholds, hit_criterion: str = "overlap") -> FrocCurve:
    """Free-response ROC over a dataset of prediction maps.

    For each threshold t the predictions are binarised at score > t.
    With the "overlap" criterion a lesion counts as detected when any
    predicted pixel above t lies inside it; with "center" its
    center-of-mass pixel must be above t. Sensitivity is detected
    lesions over total lesions across the dataset; avg_fp is total
    false-positive components (zero ground-truth overlap) per image.
    """
    if len(pred_maps) != len(gt_masks):
        raise InvalidInput(
            f"{len(pred_maps)} prediction maps vs {len(gt_masks)} ground-truth masks"
        )
    if len(pred_maps) == 0:
        raise InvalidInput("froc needs at least one image")
    if hit_criterion not in HIT_CRITERIA:
        raise InvalidInput(
            f"hit_criterion must be one of {HIT_CRITERIA}, got {hit_criterion!r}"
        )
    thresholds = np.asarray(thresholds, dtype=np.float64)

    lesion_scores = []  # per lesion: the score that must exceed t for a hit
    total_lesions = 0
    images = []
    for pred, gt in zip(pred_maps, gt_masks):
        pred = np.asarray(pred, dtype=np.float64)
        gt_bool = np.asarray(gt) > 0.5
        if pred.shape != gt_bool.shape:
            raise InvalidInput(
                f"prediction shape {pred.shape} != ground truth shape {gt_bool.shape}"
            )
        gt_labels, n_lesions = connected_components(gt_bool, connectivity=8)
        if n_lesions:
            index = np.arange(1, n_lesions + 1)
            if hit_criterion == "overlap":
                scores = ndimage.maximum(pred, labels=gt_labels, index=index)
            else:
                centers = ndimage.center_of_mass(gt_bool, labels=gt_labels, index=index)
                scores = [pred[round(cy), round(cx)] for cy, cx in np.atleast_2d(centers)]
            lesion_scores.append(np.atleast_1d(scores))
        total_lesions += n_lesions
        images.append((pred, gt_bool))
    if total_lesions == 0:
        raise UndefinedMetric("froc needs at least one ground-truth lesion")
    scores = np.concatenate(lesion_scores)

    sens = np.empty(thresholds.size)
    avg_fp = np.empty(thresholds.size)
    for i, t in enumerate(thresholds):
        sens[i] = np.count_nonzero(scores > t) / total_lesions
        fp = 0
        for pred, gt_bool in images:
            binary = pred > t
            if not binary.any():
                continue
            pred_labels, n_comp = ndimage.label(binary, structure=_STRUCTURE_8)
            hit = np.unique(pred_labels[gt_bool])
            fp += n_comp - np.count_nonzero(hit)
        avg_fp[i] = fp / len(images)
    curve = FrocCurve(avg_fp=avg_fp, sensitivity=sens, thresholds=thresholds)
    _warn_if_nonmonotone(curve)
    return curve


def _warn_if_nonmonotone(curve: FrocCurve) -> None:
    # component splitting at high thresholds can raise the FP count; that
    # is data-dependent and legitimate, so it is reported, not fatal
    order = np.argsort(curve.thresholds, kind="stable")
    fps = curve.avg_fp[order]
    if fps.size > 1 and (np.diff(fps) > 0).any():
        log.warning("FROC avg_fp is not monotone in the threshold")


def sensitivity_at_avg_fp(curve: FrocCurve, target_fp: float = 10.0) -> float:
    """Sensitivity linearly interpolated at the given average FP rate.

    Outside the curve's range the nearest endpoint value is returned.
    """
    if curve.avg_fp.size == 0:
        raise InvalidInput("empty FROC curve")
    order = np.argsort(curve.avg_fp, kind="stable")
    fps = curve.avg_fp[order]
    sens = curve.sensitivity[order]
    # collapse duplicate fp values to the best sensitivity achieved there
    uniq, inverse = np.unique(fps, return_inverse=True)
    best = np.zeros(uniq.size)
    np.maximum.at(best, inverse, sens)
    return float(np.interp(target_fp, uniq, best))


def sample_score(pred_map: np.ndarray, reducer: str = "max", k: int = 10) -> float:
    """Reduce a pixel prediction map to one sample-level score."""
    pred_map = np.asarray(pred_map, dtype=np.float64)
    if pred_map.size == 0:
        raise InvalidInput("empty prediction map")
    if reducer == "max":
        return float(pred_map.max())
    if reducer == "mean":
        return float(pred_map.mean())
    if reducer == "topk_mean":
        if k < 1:
            raise InvalidInput(f"topk_mean needs k >= 1, got {k}")
        flat = pred_map.ravel()
        k = min(k, flat.size)
        top = np.partition(flat, flat.size - k)[flat.size - k:]
        return float(top.mean())
    raise InvalidInput(f"unknown reducer {reducer!r}")
