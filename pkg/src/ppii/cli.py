"""Command-line entry points.

Subcommands: generate (batch synthesis over a directory), evaluate
(score predictions against masks), blend (single-patch demo), equalize
(histogram equalization of one file). The PPII_LOG environment
variable sets the log level. Exit code 0 means success, 1 partial
per-image failures, 2 invalid input or configuration.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import RunConfig, load_config
from .errors import PpiiError
from .gradient import BlendParams, PatchRegion
from .io import read_image, write_image
from .manifest import ingest
from .pipeline import run_evaluate, run_generate
from .raster import equalize_histogram, normalize
from .solver import blend_patch

log = logging.getLogger("ppii")

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_INVALID = 2


def _parse_rect(text: str) -> PatchRegion:
    parts = text.split(",")
    if len(parts) != 4:
        raise PpiiError(f"rect must be x,y,w,h, got {text!r}")
    try:
        x, y, w, h = (int(p) for p in parts)
    except ValueError as exc:
        raise PpiiError(f"rect must be four integers, got {text!r}") from exc
    return PatchRegion(x, y, w, h)


def _cmd_generate(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    report = ingest(args.input)
    for rel, message in report.errors:
        log.warning("skipping %s: %s", rel, message)
    outcome = run_generate(
        cfg, report.manifest, args.output, args.seed, workers=args.workers
    )
    n_fail = len(outcome.failures) + len(report.errors)
    n_total = len(report.manifest) + len(report.errors)
    print(f"generated {n_total - n_fail}/{n_total} images -> {args.output}")
    return EXIT_PARTIAL if n_fail else EXIT_OK


def _cmd_evaluate(args) -> int:
    eval_cfg = load_config(args.config).evaluate if args.config else None
    report = run_evaluate(args.pred, args.gt, args.report, eval_cfg)
    for key in ("auroc_pixel", "auroc_sample", "ap_sample", "sensitivity_at_10fp"):
        value = report[key]
        print(f"{key}: {'undefined' if value is None else f'{value:.6f}'}")
    print(f"report -> {args.report}")
    return EXIT_OK


def _cmd_blend(args) -> int:
    source = read_image(args.source)
    target = read_image(args.target)
    if source.shape != target.shape:
        raise PpiiError(
            f"source shape {source.shape} != target shape {target.shape}"
        )
    region = _parse_rect(args.rect)
    region.validate_inside(*target.shape, margin=1)
    out, report = blend_patch(
        target, source, region, region, BlendParams(alpha=args.alpha, gain=args.gain)
    )
    write_image(args.out, out)
    print(f"residual {report.residual_norm:.3e}, {report.wall_time * 1000:.1f} ms")
    return EXIT_OK


def _cmd_equalize(args) -> int:
    img = equalize_histogram(normalize(read_image(args.input)))
    write_image(args.output, img)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppii",
        description="Self-supervised anomaly synthesis and evaluation for "
        "grayscale images.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthesise anomalies for a directory")
    p.add_argument("--config", help="TOML configuration file")
    p.add_argument("--input", required=True, help="directory of grayscale images")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--workers", type=int, help="process count (default from config)")
    p.set_defaults(run=_cmd_generate)

    p = sub.add_parser("evaluate", help="score predictions against masks")
    p.add_argument("--pred", required=True, help="directory of prediction maps")
    p.add_argument("--gt", required=True, help="directory of ground-truth masks")
    p.add_argument("--report", required=True, help="JSON report path")
    p.add_argument("--config", help="TOML configuration file (evaluate table)")
    p.set_defaults(run=_cmd_evaluate)

    p = sub.add_parser("blend", help="blend one source patch into a target")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--rect", required=True, help="x,y,w,h")
    p.add_argument("--alpha", required=True, type=float)
    p.add_argument("--gain", required=True, type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_blend)

    p = sub.add_parser("equalize", help="histogram-equalize one image")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(run=_cmd_equalize)
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("PPII_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except PpiiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
