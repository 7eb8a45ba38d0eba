"""Run configuration: a small TOML schema with keyed diagnostics.

Every tunable constant of the generator appears in the schema with its
default, so a written-out default config doubles as documentation.
Unknown keys are rejected by their full dotted name; range violations
name the offending key and value.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import InvalidInput
from .metrics import HIT_CRITERIA
from .sampler import GeneratorConfig, MaskConfig
from .solver import BACKENDS

REDUCERS = ("max", "mean", "topk_mean")

DEFAULT_CONFIG = """\
# Anomaly generator configuration. All keys are optional; the values
# below are the defaults.

[generator]
patch_frac_min = 0.06    # patch side, fraction of image side
patch_frac_max = 0.25
alpha_min = 0.05         # interpolation factor range
alpha_max = 0.95
gain = 2.0               # amplification of the source gradients
k_min = 1                # anomalies per image, inclusive range
k_max = 4
raters = 8               # ensemble size per anomaly
label_threshold = 0.05   # binary mask cutoff on |target - mean|
disjoint = false         # forbid overlapping target patches
seed = 0                 # default seed, overridden by --seed

[generator.mask]
radius_mean_frac = 0.25   # of the shorter patch side
radius_sigma_frac = 0.125
loc_sigma_frac = 0.125    # of the respective patch side

[preprocess]
normalize = true
equalize = true
resize = 0               # square target size; 0 keeps the input size

[run]
solver = "dst"           # dst | direct | cg
workers = 1
allow_self_pair = false  # permit pairing an image with itself

[evaluate]
reducer = "max"          # max | mean | topk_mean
topk = 10                # k for topk_mean
thresholds = 256         # FROC threshold count, evenly spaced in (0,1)
fp_target = 10.0         # avg FP rate for the summary sensitivity
hit_criterion = "overlap"  # overlap | center
"""


@dataclass(frozen=True)
class EvalConfig:
    reducer: str = "max"
    topk: int = 10
    thresholds: int = 256
    fp_target: float = 10.0
    hit_criterion: str = "overlap"

    def __post_init__(self):
        if self.reducer not in REDUCERS:
            raise InvalidInput(f"reducer must be one of {REDUCERS}, got {self.reducer!r}")
        if self.topk < 1:
            raise InvalidInput(f"topk must be >= 1, got {self.topk}")
        if self.thresholds < 1:
            raise InvalidInput(f"thresholds must be >= 1, got {self.thresholds}")
        if not self.fp_target > 0:
            raise InvalidInput(f"fp_target must be > 0, got {self.fp_target}")
        if self.hit_criterion not in HIT_CRITERIA:
            raise InvalidInput(
                f"hit_criterion must be one of {HIT_CRITERIA}, got {self.hit_criterion!r}"
            )


@dataclass(frozen=True)
class RunConfig:
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    normalize: bool = True
    equalize: bool = True
    resize: int = 0
    solver: str = "dst"
    workers: int = 1
    allow_self_pair: bool = False
    evaluate: EvalConfig = field(default_factory=EvalConfig)

    def __post_init__(self):
        if self.resize != 0 and self.resize < 4:
            raise InvalidInput(f"resize must be 0 or >= 4, got {self.resize}")
        if self.solver not in BACKENDS:
            raise InvalidInput(f"solver must be one of {BACKENDS}, got {self.solver!r}")
        if self.workers < 1:
            raise InvalidInput(f"workers must be >= 1, got {self.workers}")


class _Table:
    """One TOML table; tracks consumption so leftovers can be rejected."""

    def __init__(self, name: str, data: dict):
        self.name = name
        self.data = dict(data)

    def take(self, key: str, kind: type, default):
        if key not in self.data:
            return default
        value = self.data.pop(key)
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if kind is not bool and isinstance(value, bool):
            self._bad(key, value, kind)
        if not isinstance(value, kind):
            self._bad(key, value, kind)
        return value

    def _bad(self, key, value, kind):
        dotted = f"{self.name}.{key}" if self.name else key
        raise InvalidInput(
            f"config key {dotted!r}: expected {kind.__name__}, got {value!r}"
        )

    def subtable(self, key: str) -> "_Table":
        value = self.data.pop(key, {})
        name = f"{self.name}.{key}" if self.name else key
        if not isinstance(value, dict):
            raise InvalidInput(f"config key {name!r}: expected a table")
        return _Table(name, value)

    def finish(self):
        if self.data:
            dotted = sorted(
                f"{self.name}.{k}" if self.name else k for k in self.data
            )
            raise InvalidInput(f"unknown config keys: {', '.join(dotted)}")


def _build(section: _Table, ctor, values: dict):
    try:
        return ctor(**values)
    except InvalidInput as exc:
        where = section.name or "config"
        raise InvalidInput(f"[{where}] {exc}") from exc


def config_from_mapping(mapping: dict, source: str = "<config>") -> RunConfig:
    root = _Table("", mapping)
    gen_t = root.subtable("generator")
    mask_t = gen_t.subtable("mask")
    pre_t = root.subtable("preprocess")
    run_t = root.subtable("run")
    eval_t = root.subtable("evaluate")
    root.finish()

    mask = _build(mask_t, MaskConfig, {
        "radius_mean_frac": mask_t.take("radius_mean_frac", float, 0.25),
        "radius_sigma_frac": mask_t.take("radius_sigma_frac", float, 0.125),
        "loc_sigma_frac": mask_t.take("loc_sigma_frac", float, 0.125),
    })
    mask_t.finish()

    generator = _build(gen_t, GeneratorConfig, {
        "patch_frac_min": gen_t.take("patch_frac_min", float, 0.06),
        "patch_frac_max": gen_t.take("patch_frac_max", float, 0.25),
        "alpha_min": gen_t.take("alpha_min", float, 0.05),
        "alpha_max": gen_t.take("alpha_max", float, 0.95),
        "gain": gen_t.take("gain", float, 2.0),
        "k_min": gen_t.take("k_min", int, 1),
        "k_max": gen_t.take("k_max", int, 4),
        "raters": gen_t.take("raters", int, 8),
        "label_threshold": gen_t.take("label_threshold", float, 0.05),
        "disjoint": gen_t.take("disjoint", bool, False),
        "seed": gen_t.take("seed", int, 0),
        "mask": mask,
    })
    gen_t.finish()

    evaluate = _build(eval_t, EvalConfig, {
        "reducer": eval_t.take("reducer", str, "max"),
        "topk": eval_t.take("topk", int, 10),
        "thresholds": eval_t.take("thresholds", int, 256),
        "fp_target": eval_t.take("fp_target", float, 10.0),
        "hit_criterion": eval_t.take("hit_criterion", str, "overlap"),
    })
    eval_t.finish()

    values = {
        "generator": generator,
        "normalize": pre_t.take("normalize", bool, True),
        "equalize": pre_t.take("equalize", bool, True),
        "resize": pre_t.take("resize", int, 0),
        "solver": run_t.take("solver", str, "dst"),
        "workers": run_t.take("workers", int, 1),
        "allow_self_pair": run_t.take("allow_self_pair", bool, False),
        "evaluate": evaluate,
    }
    pre_t.finish()
    run_t.finish()
    try:
        return RunConfig(**values)
    except InvalidInput as exc:
        raise InvalidInput(f"{source}: {exc}") from exc


def load_config(path: str | os.PathLike) -> RunConfig:
    """Parse a TOML config file; a missing key means its default."""
    path = os.fspath(path)
    try:
        with open(path, "rb") as fh:
            mapping = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise InvalidInput(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        # tomllib error messages carry line and column
        raise InvalidInput(f"{path}: {exc}") from exc
    try:
        return config_from_mapping(mapping, source=path)
    except InvalidInput as exc:
        raise InvalidInput(f"{path}: {exc}") from exc
