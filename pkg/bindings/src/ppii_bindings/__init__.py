"""In-process bindings for batch anomaly synthesis and ranking metrics.

Training pipelines call these two entry points with in-memory arrays
instead of shelling out to the CLI and round-tripping PNG files. The
array contract is float32, C-contiguous, row-major: `as_view` returns
the input buffer itself when it already satisfies the contract and one
explicit copy otherwise, never a silently aliased intermediate. Heavy
computation happens inside the core's numpy/scipy kernels, which drop
the interpreter lock while they run.

Outputs match a CLI `ppii generate` run for the same configuration and
seed to within one 16-bit quantisation step (the CLI stores maps as
PNG scaled by 65535); the metric functions match the core exactly.
"""

from __future__ import annotations

import numpy as np

from ppii import (
    InvalidInput,
    auroc,
    average_precision,
    config_from_mapping,
    generate_anomalies,
    preprocess,
)
from ppii import __version__ as _core_version

__version__ = _core_version

__all__ = ["as_view", "bound_generate", "bound_metrics", "__version__"]


def as_view(arr) -> np.ndarray:
    """Float32 C-contiguous view of `arr`; zero-copy when already one."""
    return np.ascontiguousarray(arr, dtype=np.float32)


def _image_view(name: str, arr) -> np.ndarray:
    view = as_view(arr)
    if view.ndim != 2 or view.size == 0:
        raise InvalidInput(
            f"{name} must be a nonempty 2-D array, got shape {view.shape}"
        )
    lo, hi = float(view.min()), float(view.max())
    if lo < 0.0 or hi > 1.0:
        raise InvalidInput(f"{name} values must lie in [0, 1], got [{lo}, {hi}]")
    return view


def bound_generate(target, sources, config, seed: int) -> dict[str, np.ndarray]:
    """Synthesise anomalies for one target image, all in memory.

    `config` is the same nested mapping the TOML config file encodes;
    preprocessing, generator parameters, and the solver backend are
    honoured exactly as in a batch run, so the returned maps equal the
    decoded PNGs of a CLI run on the same pair within 1/65535. The
    `run.workers` key is validated but has no effect on a single-image
    call; parallelism across images belongs to the batch layer.

    Returns {"mean", "variance", "label", "mask"}, each a fresh float32
    array of the target's shape. Input buffers are never written.
    """
    cfg = config_from_mapping(config)
    target_view = _image_view("target", target)
    if not sources:
        raise InvalidInput("sources must not be empty")
    source_views = [
        _image_view(f"sources[{i}]", s) for i, s in enumerate(sources)
    ]
    for i, view in enumerate(source_views):
        if view.shape != target_view.shape:
            raise InvalidInput(
                f"sources[{i}] shape {view.shape} != target shape "
                f"{target_view.shape}"
            )
    target64 = preprocess(target_view.astype(np.float64), cfg)
    sources64 = [preprocess(v.astype(np.float64), cfg) for v in source_views]
    bundle = generate_anomalies(
        target64, sources64, cfg.generator, seed=seed, image_index=0,
        backend=cfg.solver,
    )
    return {
        "mean": np.ascontiguousarray(bundle.mean_image, dtype=np.float32),
        "variance": np.ascontiguousarray(bundle.variance_map, dtype=np.float32),
        "label": np.ascontiguousarray(bundle.label_map, dtype=np.float32),
        "mask": np.ascontiguousarray(
            bundle.binary_mask.astype(np.float32)
        ),
    }


def bound_metrics(scores, labels) -> dict[str, float]:
    """AUROC and average precision of a scored sample set.

    Thin pass-through to the core ranking metrics; results are exactly
    the core's. Single-class labels raise UndefinedMetric unchanged.
    """
    score_view = as_view(scores).ravel()
    label_view = as_view(labels).ravel()
    return {
        "auroc": auroc(score_view, label_view),
        "ap": average_precision(score_view, label_view),
    }
