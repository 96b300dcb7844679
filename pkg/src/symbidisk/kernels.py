"""Kernels restricted to finite node sets, and their admissibility.

A kernel on a finite node set is a PSD Hermitian matrix (scalar case) or a
block-PSD matrix with one block per node pair (operator-valued case) whose
diagonal does not vanish.  A kernel K is *admissible on an alpha grid* when,
for every grid alpha, the matrix

    (1 - phi(alpha, node_i) * conj(phi(alpha, node_j))) . K_ij

is PSD.  This is the finite surrogate for admissibility quantified over the
whole closed disk of alpha: certification only holds on the grid, and
reports always carry the worst alpha so callers can refine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GenerationError, ValidationError
from .geometry import GPoint, phi_values, require_member
from .hermitian import (
    hermitian_part,
    min_eigenvalue,
    psd_project,
    schur_oslash,
)

MAX_BLOCK_SIZE = 16


@dataclass(frozen=True)
class NodeSet:
    """Ordered, pairwise-distinct member points of the open domain."""

    points: tuple[GPoint, ...]

    def __post_init__(self):
        if not self.points:
            raise ValidationError("node set must be nonempty")
        seen = []
        for q in self.points:
            require_member(q)
            for other in seen:
                if abs(q.s - other.s) <= 1e-12 and abs(q.p - other.p) <= 1e-12:
                    raise ValidationError(f"duplicate node ({q.s}, {q.p})")
            seen.append(q)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def s(self) -> np.ndarray:
        return np.array([q.s for q in self.points], dtype=complex)

    @property
    def p(self) -> np.ndarray:
        return np.array([q.p for q in self.points], dtype=complex)

    @staticmethod
    def from_pairs(pairs) -> "NodeSet":
        return NodeSet(tuple(GPoint(complex(s), complex(p)) for s, p in pairs))

    def prefix(self, n: int) -> "NodeSet":
        return NodeSet(self.points[:n])


@dataclass(frozen=True)
class AlphaGrid:
    """Finite discretization of the coordinate parameter alpha in the closed disk."""

    alphas: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        al = np.asarray(self.alphas, dtype=complex).ravel()
        if al.size == 0:
            raise ValidationError("alpha grid must be nonempty")
        if np.any(np.abs(al) > 1.0 + 1e-12):
            raise ValidationError("alpha grid points must lie in the closed unit disk")
        for i in range(al.size):
            if np.any(np.abs(al[i + 1 :] - al[i]) <= 1e-14):
                raise ValidationError("alpha grid points must be distinct")
        object.__setattr__(self, "alphas", al)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float).ravel()
            if w.shape != al.shape or np.any(w <= 0):
                raise ValidationError("weights must be positive and match the grid")
            object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.alphas)

    @staticmethod
    def boundary(n: int, include_zero: bool = True, rotate: float = 0.0) -> "AlphaGrid":
        """n-th roots of unity (optionally rotated), plus the origin."""
        if n < 1:
            raise ValidationError("need n >= 1 boundary points")
        al = np.exp(1j * (2.0 * np.pi * np.arange(n) / n + rotate))
        if include_zero:
            al = np.concatenate([[0.0 + 0.0j], al])
        return AlphaGrid(al)

    @staticmethod
    def solver_default() -> "AlphaGrid":
        """Compact grid used by the feasibility solvers: {0} plus 8 boundary points."""
        return AlphaGrid.boundary(8, include_zero=True)

    @staticmethod
    def check_default() -> "AlphaGrid":
        """Dense grid for admissibility audits: 64 boundary points, the origin,
        and 8 interior radii times 16 angles."""
        parts = [np.exp(2j * np.pi * np.arange(64) / 64), np.array([0.0 + 0.0j])]
        radii = (np.arange(1, 9) / 9.0)[:, None]
        angles = np.exp(2j * np.pi * np.arange(16) / 16)[None, :]
        parts.append((radii * angles).ravel())
        return AlphaGrid(np.concatenate(parts))


@dataclass(frozen=True)
class KernelMatrix:
    """A PSD node-indexed matrix with nonvanishing diagonal blocks."""

    nodes: NodeSet
    matrix: np.ndarray
    block: int = 1

    def __post_init__(self):
        m = hermitian_part(self.matrix)
        n = len(self.nodes) * self.block
        if self.block < 1 or self.block > MAX_BLOCK_SIZE:
            raise ValidationError(f"block size must be in [1, {MAX_BLOCK_SIZE}]")
        if m.shape != (n, n):
            raise ValidationError(f"kernel matrix shape {m.shape} != ({n}, {n})")
        object.__setattr__(self, "matrix", m)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def diagonal_block(self, i: int) -> np.ndarray:
        d = self.block
        return self.matrix[i * d : (i + 1) * d, i * d : (i + 1) * d]


@dataclass(frozen=True)
class AdmissibilityReport:
    min_eig_per_alpha: tuple[tuple[complex, float], ...]
    worst_alpha: complex
    is_admissible_on_grid: bool
    tol: float

    @property
    def worst_min_eig(self) -> float:
        return min(v for _, v in self.min_eig_per_alpha)


def coefficient_masks(grid: AlphaGrid, nodes: NodeSet) -> np.ndarray:
    """Stack of matrices C_m(i, j) = 1 - phi(alpha_m, node_i) conj(phi(alpha_m, node_j))."""
    vals = phi_values(grid.alphas, nodes.s, nodes.p)  # (M, N)
    if np.any(np.abs(vals) >= 1.0):
        raise ValidationError("a node maps outside the unit disk under some grid alpha")
    return 1.0 - vals[:, :, None] * vals.conj()[:, None, :]


def admissibility_check(
    kernel: KernelMatrix, grid: AlphaGrid, tol: float = 1e-10
) -> AdmissibilityReport:
    """Per-alpha minimum eigenvalue of the scaled kernel; grid-level certificate only."""
    if len(grid) == 0:
        raise ValidationError("alpha grid must be nonempty")
    masks = coefficient_masks(grid, kernel.nodes)
    rows = []
    worst_alpha = complex(grid.alphas[0])
    worst = math.inf
    for m, alpha in enumerate(grid.alphas):
        scaled = schur_oslash(masks[m], kernel.matrix, 1, kernel.block)
        lam = min_eigenvalue(scaled)
        rows.append((complex(alpha), lam))
        if lam < worst:
            worst = lam
            worst_alpha = complex(alpha)
    return AdmissibilityReport(
        min_eig_per_alpha=tuple(rows),
        worst_alpha=worst_alpha,
        is_admissible_on_grid=worst >= -tol,
        tol=tol,
    )


def make_b_kernel(alpha: complex, nodes: NodeSet) -> KernelMatrix:
    """Szego-type pullback 1 / (1 - phi(alpha, .) conj(phi(alpha, .))); always PSD."""
    if abs(alpha) > 1.0 + 1e-12:
        raise ValidationError("|alpha| <= 1 required")
    vals = phi_values(np.array([alpha]), nodes.s, nodes.p)[0]
    mat = 1.0 / (1.0 - np.outer(vals, vals.conj()))
    return KernelMatrix(nodes=nodes, matrix=mat)


def make_d_kernel(alpha: complex, nodes: NodeSet, u_vectors) -> KernelMatrix:
    """Rank-one-valued pullback with block (i, j) = u_i u_j^* / (1 - phi phi-bar).

    One vector per node, common dimension d; the all-one-dimensional case
    with unit entries reduces to the b-kernel.  A zero vector family gives a
    weak kernel (vanishing diagonal), which KernelMatrix still stores.
    """
    us = [np.asarray(u, dtype=complex).ravel() for u in u_vectors]
    if len(us) != len(nodes):
        raise ValidationError("one vector per node required")
    d = us[0].size
    if any(u.size != d for u in us):
        raise ValidationError("vectors must share a common dimension")
    base = make_b_kernel(alpha, nodes).matrix
    n = len(nodes)
    mat = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            mat[i * d : (i + 1) * d, j * d : (j + 1) * d] = base[i, j] * np.outer(
                us[i], us[j].conj()
            )
    return KernelMatrix(nodes=nodes, matrix=mat, block=d)


def grammian_normalize(kernel: KernelMatrix) -> np.ndarray:
    """Scalar-kernel rescaling K_ij / sqrt(K_ii K_jj); unit diagonal, PSD preserved."""
    if kernel.block != 1:
        raise ValidationError("grammian normalization applies to scalar kernels")
    diag = np.real(np.diag(kernel.matrix))
    if np.any(diag <= 0):
        raise ValidationError("not a kernel (weak kernel only): vanishing diagonal")
    d = 1.0 / np.sqrt(diag)
    g = kernel.matrix * np.outer(d, d)
    np.fill_diagonal(g, 1.0)
    return hermitian_part(g)


def random_admissible_kernel(
    nodes: NodeSet,
    grid: AlphaGrid,
    seed: int = 0,
    iters: int = 500,
    tol: float = 1e-8,
) -> KernelMatrix:
    """Seeded random kernel passing the grid admissibility check.

    Starts from the identity plus a random PSD bump and cycles retractions
    onto {PSD}, {diag >= 1}, and each per-alpha constraint set (pulled back
    through the b-kernel at that alpha).  Deterministic in the seed; raises
    GenerationError if the cycle has not settled after ``iters`` sweeps.
    """
    if len(grid) == 0:
        raise ValidationError("alpha grid must be nonempty")
    rng = np.random.default_rng(seed)
    n = len(nodes)
    masks = coefficient_masks(grid, nodes)
    pullbacks = 1.0 / masks

    w = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    bump = w @ w.conj().T
    nb = np.linalg.norm(bump, 2)
    if nb > 0:
        bump /= nb
    k = np.eye(n) + (0.3 + 0.5 * rng.random()) * bump

    for _ in range(iters):
        k = psd_project(k)
        diag = np.maximum(np.real(np.diag(k)), 1.0)
        np.fill_diagonal(k, diag)
        for m in range(len(grid)):
            k = pullbacks[m] * psd_project(masks[m] * k)
        k = hermitian_part(k)

        ok = (
            min_eigenvalue(k) >= -1e-10
            and np.min(np.real(np.diag(k))) >= 1.0 - 1e-6
            and all(
                min_eigenvalue(masks[m] * k) >= -tol for m in range(len(grid))
            )
        )
        if ok:
            kern = KernelMatrix(nodes=nodes, matrix=psd_project(k) + 1e-14 * np.eye(n))
            report = admissibility_check(kern, grid, tol)
            if report.is_admissible_on_grid:
                return kern
    raise GenerationError("generation failed; retry with a new seed")
