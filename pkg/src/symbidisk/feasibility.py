"""Semidefinite feasibility core.

Decides whether a Hermitian node-indexed target J splits as

    J = sum_m C_m . B_m,      C_m(i, j) = 1 - phi(alpha_m, i) conj(phi(alpha_m, j)),

with every B_m PSD, where "." scales block (i, j) of B_m by the scalar
C_m(i, j).  This is the finite, grid-atomic form of representing J against
the coordinate family, and a witness is exactly the data the realization
builder needs.

Algorithm: von Neumann alternating projections with Dykstra correction on
the product PSD cone.  The affine constraint decouples per node pair, so its
orthogonal projection is a closed-form least-squares update (the stacked
realified constraint map is block diagonal over node pairs; the QR of each
tiny block reduces to normalization by sum_m |C_m(i,j)|^2).

Infeasibility is certified by a grid-admissible kernel K whose Schur product
with J has a negative eigenvalue: any exact witness would force
J . K = sum_m B_m . (C_m . K) to be PSD term by term, so a violating K and a
witness cannot coexist on the same grid.  When the iteration stalls and no
certificate emerges the honest terminal status is Unknown; the exact
dichotomy holds only for the full alpha continuum, not the grid.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import GenerationError, ValidationError
from .hermitian import (
    hermitian_part,
    min_eigenvalue,
    psd_project,
    psd_project_stack,
    schur_oslash,
)
from .kernels import (
    AlphaGrid,
    KernelMatrix,
    NodeSet,
    admissibility_check,
    coefficient_masks,
    grammian_normalize,
    random_admissible_kernel,
)


class SolveStatus(str, Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE_CERTIFIED = "InfeasibleCertified"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-8
    max_iter: int = 20000
    seed: int = 0
    # residual polish after the tolerance is first met; improves downstream
    # synthesis without changing the decision
    polish_tol: float = 1e-12
    polish_iter: int = 4000
    stall_window: int = 500
    stall_rel_improvement: float = 1e-3
    probe_steps: int = 200


@dataclass(frozen=True)
class FeasibilityTarget:
    """Hermitian node-indexed target; block (i, j) must equal block (j, i)*."""

    nodes: NodeSet
    matrix: np.ndarray
    block: int = 1

    def __post_init__(self):
        n = len(self.nodes) * self.block
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (n, n):
            raise ValidationError(f"target shape {m.shape} != ({n}, {n})")
        if np.abs(m - m.conj().T).max(initial=0.0) > 1e-10 * max(
            1.0, np.abs(m).max(initial=0.0)
        ):
            raise ValidationError("target is not self-adjoint")
        object.__setattr__(self, "matrix", hermitian_part(m))


@dataclass(frozen=True)
class CPBlocks:
    """One PSD block per grid alpha; the discretized representation data."""

    grid: AlphaGrid
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.grid):
            raise ValidationError("need exactly one block per grid alpha")

    def stacked(self) -> np.ndarray:
        return np.stack(self.blocks)


@dataclass(frozen=True)
class SolveReport:
    status: SolveStatus
    residual: float
    iterations: int
    wall_time: float
    blocks: CPBlocks | None = None
    certificate: KernelMatrix | None = None
    certificate_min_eig: float | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)


def _expand_masks(masks: np.ndarray, block: int) -> np.ndarray:
    """Per node-pair scalars replicated across the d x d entries of each block."""
    if block == 1:
        return masks
    return np.kron(masks, np.ones((block, block)))


def residual(target: FeasibilityTarget, blocks: CPBlocks) -> float:
    """Frobenius mismatch of the affine identity plus total PSD violation."""
    masks = coefficient_masks(blocks.grid, target.nodes)
    cexp = _expand_masks(masks, target.block)
    stack = blocks.stacked()
    if stack.shape != cexp.shape:
        raise ValidationError("blocks do not conform to target/grid shapes")
    mismatch = np.linalg.norm(np.einsum("mij,mij->ij", cexp, stack) - target.matrix)
    psd_violation = 0.0
    for b in stack:
        lam = min_eigenvalue(b)
        if lam < 0:
            psd_violation += -lam
    return float(mismatch + psd_violation)


def solve(
    target: FeasibilityTarget, grid: AlphaGrid, opts: SolveOptions = SolveOptions()
) -> SolveReport:
    """Decide grid feasibility of the target; see module docstring.

    Feasible reports carry the witness blocks with residual <= tol.
    InfeasibleCertified reports carry a grid-admissible kernel certificate.
    Deterministic given (target, grid, opts).
    """
    t0 = time.perf_counter()
    masks = coefficient_masks(grid, target.nodes)  # raises if a node leaves the disk
    cexp = _expand_masks(masks, target.block)
    cconj = cexp.conj()
    ssum = (np.abs(cexp) ** 2).sum(axis=0)
    j = target.matrix
    notes: list[str] = []

    atom = _single_atom_witness(target, grid, cexp, opts)
    if atom is not None:
        blocks, res0 = atom
        return SolveReport(
            status=SolveStatus.FEASIBLE,
            residual=res0,
            iterations=0,
            wall_time=time.perf_counter() - t0,
            blocks=blocks,
            notes=("single-atom witness",),
        )

    cheap = _cheap_certificates(target, grid, masks, opts)
    if cheap is not None:
        kern, lam = cheap
        return SolveReport(
            status=SolveStatus.INFEASIBLE_CERTIFIED,
            residual=float(np.linalg.norm(j)),
            iterations=0,
            wall_time=time.perf_counter() - t0,
            certificate=kern,
            certificate_min_eig=lam,
            notes=("certified by direct kernel candidate",),
        )

    b = np.zeros_like(cexp, dtype=complex)
    corr = np.zeros_like(b)
    best_res = np.inf
    res = np.inf
    window_anchor = np.inf
    probes_left = 2
    it = 0
    target_res = opts.tol
    polish_deadline = opts.max_iter
    polishing = False
    cone = b
    best_cone = b

    while it < opts.max_iter:
        it += 1
        y = b + corr
        cone = psd_project_stack(y)
        corr = y - cone
        r = np.einsum("mij,mij->ij", cexp, cone) - j
        res = float(np.linalg.norm(r))
        if res < best_res:
            best_res = res
            best_cone = cone

        if res <= target_res:
            if polishing or res <= opts.polish_tol:
                break
            # decision reached; keep iterating briefly to tighten the witness
            polishing = True
            target_res = opts.polish_tol
            polish_deadline = min(opts.max_iter, it + opts.polish_iter)
            notes.append(f"tolerance met at iteration {it}; polishing")
            window_anchor = np.inf
            probes_left = 0
        if polishing and it >= polish_deadline:
            break

        if it % opts.stall_window == 0:
            if window_anchor - res <= opts.stall_rel_improvement * max(res, 1e-30):
                if polishing:
                    break
                if probes_left > 0:
                    probes_left -= 1
                    cert = dual_probe(target, grid, opts)
                    if cert is not None:
                        kern, lam = cert
                        return SolveReport(
                            status=SolveStatus.INFEASIBLE_CERTIFIED,
                            residual=res,
                            iterations=it,
                            wall_time=time.perf_counter() - t0,
                            certificate=kern,
                            certificate_min_eig=lam,
                            notes=tuple(notes) + ("certified after stall",),
                        )
                    notes.append(f"stall at iteration {it}; no certificate found")
                else:
                    break
            window_anchor = res

        b = cone - cconj * (r / ssum)[None, :, :]
        b = (b + b.conj().transpose(0, 2, 1)) / 2.0

    wall = time.perf_counter() - t0
    final_res = best_res if np.isfinite(best_res) else float(np.linalg.norm(j))
    if final_res <= opts.tol:
        blocks = CPBlocks(
            grid=grid, blocks=tuple(hermitian_part(x) for x in best_cone)
        )
        return SolveReport(
            status=SolveStatus.FEASIBLE,
            residual=final_res,
            iterations=it,
            wall_time=wall,
            blocks=blocks,
            notes=tuple(notes),
        )
    return SolveReport(
        status=SolveStatus.UNKNOWN,
        residual=final_res,
        iterations=it,
        wall_time=wall,
        notes=tuple(notes) + (f"best residual {best_res:.3e}",),
    )


def dual_probe(
    target: FeasibilityTarget, grid: AlphaGrid, opts: SolveOptions = SolveOptions()
) -> tuple[KernelMatrix, float] | None:
    """Search for a grid-admissible kernel K with lambda_min(J . K) <= -tol.

    Tries cheap closed-form candidates first (identity, the b-kernel at each
    grid alpha), then runs a seeded heuristic ascent from a random admissible
    kernel: move K against the gradient of the most negative eigenvalue of
    J . K and retract onto the per-alpha constraint sets.  Returning nothing
    is a valid outcome.
    """
    masks = coefficient_masks(grid, target.nodes)
    found = _cheap_certificates(target, grid, masks, opts)
    if found is not None:
        return found

    n = len(target.nodes)
    try:
        kern = random_admissible_kernel(target.nodes, grid, seed=opts.seed)
    except GenerationError:
        return None
    k = kern.matrix.copy()
    pullbacks = 1.0 / masks
    j = target.matrix

    step = 0.5
    for _ in range(opts.probe_steps):
        lam, vec = _most_negative_pair(j, k, target.block)
        if lam <= -opts.tol:
            cand = _normalize_certificate(target, grid, k, opts)
            if cand is not None:
                return cand
        grad = _violation_gradient(j, vec, n, target.block)
        gn = np.abs(grad).max(initial=0.0)
        if gn <= 1e-16:
            break
        k_try = k - step * (grad / gn) * max(1.0, np.abs(k).max())
        for m in range(len(grid)):
            k_try = pullbacks[m] * psd_project(masks[m] * k_try)
        k_try = psd_project(k_try)
        lam_try, _ = _most_negative_pair(j, k_try, target.block)
        if lam_try < lam:
            k = k_try
            step = min(1.0, step * 1.3)
        else:
            step *= 0.5
            if step < 1e-6:
                break
    lam, _ = _most_negative_pair(j, k, target.block)
    if lam <= -opts.tol:
        return _normalize_certificate(target, grid, k, opts)
    return None


def _single_atom_witness(target, grid, cexp, opts):
    """Closed-form witness concentrated at one grid alpha, when one exists.

    C_m . B = J is solved exactly by B = J / C_m entrywise; whenever that
    quotient is PSD the problem is feasible with zero residual, a geometry
    alternating projections approach only asymptotically (every other block
    sits on the cone boundary).
    """
    j = target.matrix
    scale = max(1.0, float(np.abs(j).max(initial=0.0)))
    best = None
    for m in range(cexp.shape[0]):
        cand = hermitian_part(j / cexp[m])
        lam = min_eigenvalue(cand)
        if lam >= -1e-12 * scale:
            stack = np.zeros_like(cexp, dtype=complex)
            stack[m] = psd_project(cand)
            blocks = CPBlocks(grid=grid, blocks=tuple(stack))
            res = residual(target, blocks)
            if res <= opts.tol and (best is None or res < best[1]):
                best = (blocks, res)
                if res == 0.0:
                    break
    return best


def _cheap_certificates(target, grid, masks, opts):
    """Identity kernel and per-alpha b-kernels, filtered by grid admissibility."""
    n = len(target.nodes)
    candidates = [np.eye(n, dtype=complex)]
    for m in range(len(grid)):
        candidates.append(1.0 / masks[m])
    for k in candidates:
        lam, _ = _most_negative_pair(target.matrix, k, target.block)
        if lam <= -opts.tol:
            cand = _normalize_certificate(target, grid, k, opts)
            if cand is not None:
                return cand
    return None


def _most_negative_pair(j, k, block) -> tuple[float, np.ndarray]:
    prod = schur_oslash(j, k, block, 1)
    prod = hermitian_part(prod)
    lam, vecs = np.linalg.eigh(prod)
    return float(lam[0]), vecs[:, 0]


def _violation_gradient(j, vec, n, block) -> np.ndarray:
    """Gradient of v* (J . K) v with respect to K, reduced to node scale."""
    d = block
    grad = np.zeros((n, n), dtype=complex)
    for i in range(n):
        vi = vec[i * d : (i + 1) * d]
        for jd in range(n):
            vj = vec[jd * d : (jd + 1) * d]
            jb = j[i * d : (i + 1) * d, jd * d : (jd + 1) * d]
            grad[i, jd] = np.conj(vi) @ jb @ vj
    return hermitian_part(grad)


def _normalize_certificate(target, grid, k, opts) -> tuple[KernelMatrix, float] | None:
    """Unit-diagonal rescale, then re-verify admissibility and the violation."""
    k = hermitian_part(k)
    diag = np.real(np.diag(k))
    if np.any(diag <= 1e-14):
        k = k + 1e-12 * np.eye(k.shape[0])
        diag = np.real(np.diag(k))
    kern = KernelMatrix(nodes=target.nodes, matrix=k)
    g = grammian_normalize(kern)
    kern = KernelMatrix(nodes=target.nodes, matrix=g)
    report = admissibility_check(kern, grid, tol=opts.tol)
    if not report.is_admissible_on_grid:
        return None
    lam, _ = _most_negative_pair(target.matrix, kern.matrix, target.block)
    if lam > -opts.tol:
        return None
    return kern, lam
