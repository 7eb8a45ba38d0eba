"""Independent oracles and problem builders shared across test modules."""

from __future__ import annotations

import numpy as np

from ppii import DirichletProblem, PatchRegion


def random_problem(rng: np.random.Generator, m: int, n: int, scale: float = 1.0) -> DirichletProblem:
    """Random Dirichlet problem with an m x n interior."""
    rhs = scale * rng.normal(size=(m, n))
    boundary = scale * rng.normal(size=(m + 2, n + 2))
    return DirichletProblem(rhs, boundary, PatchRegion(0, 0, n + 2, m + 2))


def harmonic_problem(rng: np.random.Generator, m: int, n: int) -> DirichletProblem:
    """Zero right-hand side, random boundary."""
    return DirichletProblem(
        np.zeros((m, n)), rng.normal(size=(m + 2, n + 2)), PatchRegion(0, 0, n + 2, m + 2)
    )


def auroc_by_pairs(scores, labels) -> float:
    """Exhaustive pair enumeration: P(pos > neg) with half credit for ties."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    pos = scores[labels]
    neg = scores[~labels]
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def ap_by_steps(scores, labels) -> float:
    """Hand step-sum over descending score cuts, tied scores grouped."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(np.int64)
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    total_pos = int(y.sum())
    ap = 0.0
    tp = fp = 0
    i = 0
    while i < len(s):
        j = i
        while j < len(s) and s[j] == s[i]:
            j += 1
        tp_prev = tp
        tp += int(y[i:j].sum())
        fp += (j - i) - int(y[i:j].sum())
        if tp > tp_prev:
            ap += (tp - tp_prev) / total_pos * (tp / (tp + fp))
        i = j
    return ap


def flood_components(mask, connectivity: int):
    """Stack-based flood fill, labels in row-major first-pixel order."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    if connectivity == 4:
        steps = ((-1, 0), (1, 0), (0, -1), (0, 1))
    else:
        steps = tuple(
            (dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0)
        )
    labels = np.zeros((h, w), dtype=np.int64)
    count = 0
    for y in range(h):
        for x in range(w):
            if not mask[y, x] or labels[y, x]:
                continue
            count += 1
            stack = [(y, x)]
            labels[y, x] = count
            while stack:
                cy, cx = stack.pop()
                for dy, dx in steps:
                    ny, nx = cy + dy, cx + dx
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not labels[ny, nx]:
                        labels[ny, nx] = count
                        stack.append((ny, nx))
    return labels, count
