"""End-to-end demo: synthesise a small dataset, generate anomalies, evaluate.

Creates a working directory with healthy inputs, runs the seeded batch
generator, then scores the emitted label maps against the emitted
binary masks (a format self-consistency check) and prints the report.
"""

import argparse
import json
import shutil
from pathlib import Path

from make_synthetic_dataset import write_dataset

from ppii import EvalConfig, RunConfig, ingest, run_evaluate, run_generate


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default="demo_run")
    parser.add_argument("--count", type=int, default=8)
    parser.add_argument("--size", type=int, default=256)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    work = Path(args.workdir)
    inputs = work / "inputs"
    outputs = work / "outputs"
    write_dataset(inputs, args.count, args.size, seed=args.seed)
    print(f"inputs -> {inputs}")

    cfg = RunConfig()
    manifest = ingest(inputs).manifest
    outcome = run_generate(cfg, manifest, outputs, seed=args.seed)
    print(f"generated {len(manifest) - len(outcome.failures)}/{len(manifest)} bundles -> {outputs}")

    pred = work / "pred"
    gt = work / "gt"
    for d in (pred, gt):
        d.mkdir(exist_ok=True)
    for label in outputs.glob("*_label.png"):
        stem = label.name[: -len("_label.png")]
        shutil.copyfile(label, pred / f"{stem}.png")
        shutil.copyfile(outputs / f"{stem}_mask.png", gt / f"{stem}.png")

    report = run_evaluate(pred, gt, work / "report.json", EvalConfig(thresholds=64))
    print(json.dumps({k: v for k, v in report.items() if k != "froc_points"}, indent=2))


if __name__ == "__main__":
    main()
