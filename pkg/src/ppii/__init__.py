"""Probabilistic self-supervised anomaly synthesis for grayscale images.

Healthy images are turned into training data by Poisson-blending
patches between image pairs with amplified source gradients; an
ensemble of randomised raters yields a mean composite, a pixelwise
variance (uncertainty) map, and an anomaly label map per image.
"""

from .augment import AugmentSpec, ElasticSpec, augment
from .config import DEFAULT_CONFIG, EvalConfig, RunConfig, config_from_mapping, load_config
from .errors import (
    CapExceeded,
    DegenerateDistribution,
    InvalidInput,
    NoInputs,
    PpiiError,
    UndefinedMetric,
)
from .gradient import (
    BlendParams,
    GuidanceField,
    PatchRegion,
    build_guidance_field,
    divergence,
)
from .io import read_image, write_image
from .manifest import IngestReport, Manifest, ManifestEntry, ingest
from .metrics import (
    FrocCurve,
    auroc,
    average_precision,
    connected_components,
    froc,
    sample_score,
    sensitivity_at_avg_fp,
)
from .pipeline import pair_indices, preprocess, run_evaluate, run_generate
from .raster import equalize_histogram, normalize, resize_bilinear
from .sampler import (
    AnomalyBundle,
    AnomalyRecord,
    GeneratorConfig,
    MaskConfig,
    RaterDraw,
    generate_anomalies,
    sample_circle_mask,
    sample_patch_spec,
)
from .seeding import derive_rng
from .solver import (
    BACKENDS,
    DirichletProblem,
    SolverReport,
    blend_patch,
    solve_cg,
    solve_direct,
    solve_dst,
)

__version__ = "0.1.0"

__all__ = [
    "AnomalyBundle",
    "AnomalyRecord",
    "AugmentSpec",
    "BACKENDS",
    "BlendParams",
    "CapExceeded",
    "DEFAULT_CONFIG",
    "DegenerateDistribution",
    "DirichletProblem",
    "ElasticSpec",
    "EvalConfig",
    "FrocCurve",
    "GeneratorConfig",
    "GuidanceField",
    "IngestReport",
    "InvalidInput",
    "Manifest",
    "ManifestEntry",
    "MaskConfig",
    "NoInputs",
    "PatchRegion",
    "PpiiError",
    "RaterDraw",
    "RunConfig",
    "SolverReport",
    "UndefinedMetric",
    "augment",
    "auroc",
    "average_precision",
    "blend_patch",
    "build_guidance_field",
    "config_from_mapping",
    "connected_components",
    "derive_rng",
    "divergence",
    "equalize_histogram",
    "froc",
    "generate_anomalies",
    "ingest",
    "load_config",
    "normalize",
    "pair_indices",
    "preprocess",
    "read_image",
    "resize_bilinear",
    "run_evaluate",
    "run_generate",
    "sample_circle_mask",
    "sample_patch_spec",
    "sample_score",
    "sensitivity_at_avg_fp",
    "solve_cg",
    "solve_direct",
    "solve_dst",
    "write_image",
]
