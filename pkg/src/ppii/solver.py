"""Dirichlet solvers for the patch interior and full-image blending.

The discrete problem: for every interior pixel p of a patch,

    4*f_p - sum(f_q, q interior neighbor) = rhs_p + sum(b_q, q boundary neighbor)

with rhs the guidance-field divergence and b the target intensities on
the patch's outer ring. Three backends solve the identical system:

* ``solve_direct`` assembles the dense normal-equation matrix and
  factorises it (the correctness oracle, capped in size),
* ``solve_dst`` diagonalises the same matrix in the type-I discrete
  sine basis, O(N log N) for any interior size,
* ``solve_cg`` runs conjugate gradients on the sparse matrix (timing
  reference only).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.fft import dstn, idstn
from scipy.sparse.linalg import cg as _cg

from .errors import CapExceeded, InvalidInput
from .gradient import BlendParams, PatchRegion, build_guidance_field, divergence

DIRECT_CAP = (64, 64)  # largest interior the dense backend accepts


@dataclass(frozen=True)
class DirichletProblem:
    """Interior right-hand side plus boundary ring for one patch."""

    interior_rhs: np.ndarray  # (region.height - 2, region.width - 2)
    boundary: np.ndarray  # full patch, (region.height, region.width); only the ring is read
    region: PatchRegion

    def __post_init__(self):
        m = self.region.height - 2
        n = self.region.width - 2
        if self.interior_rhs.shape != (m, n):
            raise InvalidInput(
                f"interior rhs must be {m}x{n}, got {self.interior_rhs.shape}"
            )
        if self.boundary.shape != (self.region.height, self.region.width):
            raise InvalidInput(
                f"boundary patch must be {self.region.height}x{self.region.width}, "
                f"got {self.boundary.shape}"
            )

    def boundary_ring(self) -> np.ndarray:
        """The ring values as one vector of length 2w + 2h - 4, clockwise."""
        b = self.boundary
        return np.concatenate(
            [b[0, :], b[1:-1, -1], b[-1, ::-1], b[-2:0:-1, 0]]
        )


@dataclass(frozen=True)
class SolverReport:
    backend: str
    residual_norm: float
    wall_time: float


def folded_rhs(prob: DirichletProblem) -> np.ndarray:
    """Interior rhs with boundary neighbor values moved to the right side."""
    rhs = np.array(prob.interior_rhs, dtype=np.float64)
    b = prob.boundary
    rhs[0, :] += b[0, 1:-1]
    rhs[-1, :] += b[-1, 1:-1]
    rhs[:, 0] += b[1:-1, 0]
    rhs[:, -1] += b[1:-1, -1]
    return rhs


def residual_max(prob: DirichletProblem, interior: np.ndarray) -> float:
    """Max-norm residual of the normal equations at a candidate interior."""
    full = np.array(prob.boundary, dtype=np.float64)
    full[1:-1, 1:-1] = interior
    stencil = (
        4.0 * full[1:-1, 1:-1]
        - full[:-2, 1:-1]
        - full[2:, 1:-1]
        - full[1:-1, :-2]
        - full[1:-1, 2:]
    )
    return float(np.abs(stencil - prob.interior_rhs).max())


def _laplacian_1d(k: int) -> np.ndarray:
    return 2.0 * np.eye(k) - np.eye(k, k=1) - np.eye(k, k=-1)


def solve_direct(prob: DirichletProblem) -> tuple[np.ndarray, SolverReport]:
    """Dense factorisation of the normal equations (oracle backend)."""
    m, n = prob.interior_rhs.shape
    if m > DIRECT_CAP[0] or n > DIRECT_CAP[1]:
        raise CapExceeded(
            f"{m}x{n} interior exceeds the direct-solver cap "
            f"{DIRECT_CAP[0]}x{DIRECT_CAP[1]}; use solve_dst"
        )
    t0 = time.perf_counter()
    a = np.kron(np.eye(m), _laplacian_1d(n)) + np.kron(_laplacian_1d(m), np.eye(n))
    f = np.linalg.solve(a, folded_rhs(prob).ravel()).reshape(m, n)
    wall = time.perf_counter() - t0
    return f, SolverReport("direct", residual_max(prob, f), wall)


def solve_dst(prob: DirichletProblem) -> tuple[np.ndarray, SolverReport]:
    """Spectral solve via the 2-D type-I discrete sine transform.

    The 5-point matrix has eigenvalues
    4 - 2*cos(i*pi/(m+1)) - 2*cos(j*pi/(n+1)) in the sine basis, so the
    solve is forward transform, pointwise divide, inverse transform.
    """
    m, n = prob.interior_rhs.shape
    t0 = time.perf_counter()
    rhs = folded_rhs(prob)
    lam = (
        (2.0 - 2.0 * np.cos(np.pi * np.arange(1, m + 1) / (m + 1)))[:, None]
        + (2.0 - 2.0 * np.cos(np.pi * np.arange(1, n + 1) / (n + 1)))[None, :]
    )
    f = idstn(dstn(rhs, type=1) / lam, type=1)
    wall = time.perf_counter() - t0
    return f, SolverReport("dst", residual_max(prob, f), wall)


def solve_cg(prob: DirichletProblem, rtol: float = 1e-6) -> tuple[np.ndarray, SolverReport]:
    """Conjugate-gradient reference on the sparse system."""
    m, n = prob.interior_rhs.shape
    t0 = time.perf_counter()
    tn = sp.diags([2.0 * np.ones(n), -np.ones(n - 1), -np.ones(n - 1)], [0, 1, -1])
    tm = sp.diags([2.0 * np.ones(m), -np.ones(m - 1), -np.ones(m - 1)], [0, 1, -1])
    a = sp.kron(sp.eye(m), tn) + sp.kron(tm, sp.eye(n))
    rhs = folded_rhs(prob).ravel()
    f, info = _cg(a.tocsr(), rhs, rtol=rtol, atol=0.0)
    wall = time.perf_counter() - t0
    if info != 0:
        raise InvalidInput(f"conjugate gradients did not converge (info={info})")
    f = f.reshape(m, n)
    return f, SolverReport("cg", residual_max(prob, f), wall)


_BACKENDS = {"direct": solve_direct, "dst": solve_dst, "cg": solve_cg}
BACKENDS = tuple(_BACKENDS)


def blend_patch(
    target: np.ndarray,
    source: np.ndarray,
    region: PatchRegion,
    source_region: PatchRegion,
    params: BlendParams,
    mask: np.ndarray | None = None,
    backend: str = "dst",
) -> tuple[np.ndarray, SolverReport]:
    """Blend a source patch into the target image through the Poisson solve.

    Returns a copy of `target` whose region interior holds the solved,
    [0, 1]-clamped intensities; every pixel outside the interior is
    bit-identical to the input. `mask` (patch-sized boolean) restricts
    the source gradients to pairs inside it, see
    :func:`ppii.gradient.build_guidance_field`.
    """
    target = np.asarray(target, dtype=np.float64)
    source = np.asarray(source, dtype=np.float64)
    if (region.width, region.height) != (source_region.width, source_region.height):
        raise InvalidInput("target and source regions must have identical dimensions")
    region.validate_inside(*target.shape)
    source_region.validate_inside(*source.shape)
    if backend not in _BACKENDS:
        raise InvalidInput(f"unknown solver backend {backend!r}")

    target_patch = target[region.slices]
    source_patch = source[source_region.slices]
    field = build_guidance_field(target_patch, source_patch, params, mask=mask)
    prob = DirichletProblem(divergence(field), target_patch, region)
    interior, report = _BACKENDS[backend](prob)

    out = target.copy()
    out[region.interior_slices] = np.clip(interior, 0.0, 1.0)
    return out, report
