"""Grayscale image file IO.

Supported formats: single-channel PNG (8- and 16-bit, via Pillow) and
binary PGM (P5, maxval up to 65535, parsed directly). Intensities are
float64 in [0, 1] in memory; 8-bit files are divided by 255 on load,
16-bit by 65535. Saving quantises with round-half-to-even.
"""

from __future__ import annotations

import os
import re

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import InvalidInput


def read_image(path: str | os.PathLike) -> np.ndarray:
    """Load a grayscale image as a float64 array in [0, 1]."""
    path = os.fspath(path)
    if path.lower().endswith((".pgm", ".pnm")):
        return _read_pgm(path)
    try:
        with Image.open(path) as im:
            mode = im.mode
            arr = np.asarray(im)
    except (UnidentifiedImageError, OSError) as exc:
        raise InvalidInput(f"cannot decode {path}: {exc}") from exc
    if arr.ndim != 2:
        raise InvalidInput(f"{path}: expected single-channel image, got mode {mode!r}")
    if mode == "L":
        return arr.astype(np.float64) / 255.0
    if mode in ("I;16", "I;16B", "I"):
        return arr.astype(np.float64) / 65535.0
    if mode == "F":
        return arr.astype(np.float64)
    raise InvalidInput(f"{path}: unsupported image mode {mode!r}")


def write_image(path: str | os.PathLike, img: np.ndarray, bit_depth: int = 16) -> None:
    """Save a [0, 1] float image as an 8- or 16-bit PNG or PGM file."""
    path = os.fspath(path)
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise InvalidInput("write_image expects a nonempty 2-D array")
    if bit_depth not in (8, 16):
        raise InvalidInput(f"bit_depth must be 8 or 16, got {bit_depth}")
    maxval = 255 if bit_depth == 8 else 65535
    # np.rint rounds half to even
    q = np.rint(np.clip(img, 0.0, 1.0) * maxval)
    if path.lower().endswith((".pgm", ".pnm")):
        _write_pgm(path, q, maxval)
        return
    if bit_depth == 8:
        Image.fromarray(q.astype(np.uint8), mode="L").save(path)
    else:
        Image.fromarray(q.astype(np.uint16)).save(path)


_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    pos = 0
    tokens = []
    for _ in range(4):
        m = _PGM_TOKEN.match(data, pos)
        if m is None:
            raise InvalidInput(f"{path}: truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    if tokens[0] != b"P5":
        raise InvalidInput(f"{path}: not a binary PGM (P5) file")
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise InvalidInput(f"{path}: malformed PGM header") from exc
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise InvalidInput(f"{path}: bad PGM dimensions or maxval")
    pos += 1  # single whitespace byte after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
    count = width * height
    if len(data) - pos < count * dtype.itemsize:
        raise InvalidInput(f"{path}: truncated PGM pixel data")
    raw = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
    return raw.reshape(height, width).astype(np.float64) / maxval


def _write_pgm(path: str, q: np.ndarray, maxval: int) -> None:
    h, w = q.shape
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    if maxval > 255:
        body = q.astype(">u2").tobytes()
    else:
        body = q.astype(np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(header + body)
