"""Write a folder of synthetic chest-radiograph-like grayscale images.

The images mimic the gross anatomy and texture statistics of equalized
frontal radiographs: a bright mediastinal column, two dark lung
fields, rib-like bands, band-limited stochastic texture at several
scales, and film grain. They are intended as normal ("healthy") inputs
for the anomaly generator.
"""

import argparse
from pathlib import Path

import numpy as np

from ppii import normalize, resize_bilinear, write_image


def synthetic_radiograph(rng: np.random.Generator, size: int = 512) -> np.ndarray:
    """One normalized radiograph-like image with per-call random texture."""
    ax = np.linspace(0.0, 1.0, size)
    y, x = np.meshgrid(ax, ax, indexing="ij")
    img = 0.55 - 0.15 * y
    img += 0.30 * np.exp(-((x - 0.5) / 0.16) ** 2)
    for cx in (0.28, 0.72):
        img -= 0.22 * np.exp(-(((x - cx) / 0.14) ** 2 + ((y - 0.45) / 0.26) ** 2))
    phase = rng.uniform(0.0, 2.0 * np.pi)
    img += 0.09 * np.sin(2.0 * np.pi * (9.0 * y + 2.0 * (x - 0.5) ** 2) + phase)
    img += 0.20 * resize_bilinear(rng.normal(0.0, 1.0, (33, 33)), size, size)
    img += 0.16 * resize_bilinear(rng.normal(0.0, 1.0, (17, 17)), size, size)
    img += 0.10 * resize_bilinear(rng.normal(0.0, 1.0, (9, 9)), size, size)
    img += 0.06 * rng.standard_normal((size, size))
    return normalize(img)


def write_dataset(out_dir: Path, count: int, size: int, seed: int) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        path = out_dir / f"img{i:03d}.png"
        write_image(path, synthetic_radiograph(rng, size))
        paths.append(path)
    return paths


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", required=True, help="target directory")
    parser.add_argument("--count", type=int, default=93)
    parser.add_argument("--size", type=int, default=512)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    paths = write_dataset(Path(args.output), args.count, args.size, args.seed)
    print(f"wrote {len(paths)} images to {args.output}")


if __name__ == "__main__":
    main()
