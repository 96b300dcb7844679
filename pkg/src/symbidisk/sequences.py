"""Finite-truncation diagnostics for interpolating sequences.

Whether a sequence of domain points admits bounded interpolation of every
bounded target sequence is controlled by two-sided eigenvalue bounds of the
normalized Grammians of admissible kernels, by strong separation (unit
vectors interpolated with a uniform bound), and by a family of Carleson-type
products through any single coordinate function.  Everything here works on
finite truncations: the universally quantified kernel conditions are sampled
(grid-admissible kernels only), so the reports are one-sided evidence, never
a verdict on the infinite sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .feasibility import SolveOptions
from .geometry import phi_values, pseudo_hyperbolic
from .kernels import (
    AlphaGrid,
    KernelMatrix,
    NodeSet,
    admissibility_check,
    grammian_normalize,
    make_b_kernel,
    random_admissible_kernel,
)
from .pick import PickProblem, PickSolution, minimal_norm, solve_pick

MAX_TRUNCATION = 32
DEFAULT_KERNEL_CENSUS = 32


@dataclass(frozen=True)
class SequenceTruncation:
    """First n terms of a sequence, as a node set."""

    nodes: NodeSet

    def __post_init__(self):
        if len(self.nodes) > MAX_TRUNCATION:
            raise ValidationError(f"truncation capped at {MAX_TRUNCATION} nodes")

    @property
    def n(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class GrammianReport:
    per_kernel: tuple[tuple[str, float, float], ...]  # (kernel id, lam_min, lam_max)
    worst_lower: float
    worst_upper: float
    kernel_count: int


def grammian_bounds(
    trunc: SequenceTruncation,
    kernels: list[tuple[str, KernelMatrix]],
    grid: AlphaGrid,
    tol: float = 1e-8,
) -> GrammianReport:
    """Eigenvalue range of each kernel's normalized Grammian on the truncation.

    Every kernel must pass the grid admissibility check; an inadmissible one
    is rejected with its failing alpha.  The bounds are evidence over the
    sampled kernels only.
    """
    if not kernels:
        raise ValidationError("need at least one kernel")
    rows = []
    worst_lower = np.inf
    worst_upper = -np.inf
    for kid, kern in kernels:
        if kern.nodes is not trunc.nodes and kern.nodes != trunc.nodes:
            raise ValidationError(f"kernel {kid} is not defined on the truncation nodes")
        report = admissibility_check(kern, grid, tol)
        if not report.is_admissible_on_grid:
            raise ValidationError(
                f"kernel {kid} inadmissible on the grid at alpha = {report.worst_alpha}"
            )
        g = grammian_normalize(kern)
        lam = np.linalg.eigvalsh(g)
        rows.append((kid, float(lam[0]), float(lam[-1])))
        worst_lower = min(worst_lower, float(lam[0]))
        worst_upper = max(worst_upper, float(lam[-1]))
    return GrammianReport(
        per_kernel=tuple(rows),
        worst_lower=worst_lower,
        worst_upper=worst_upper,
        kernel_count=len(rows),
    )


def sample_kernel_census(
    trunc: SequenceTruncation,
    grid: AlphaGrid,
    seed: int = 0,
    count: int = DEFAULT_KERNEL_CENSUS,
    tol: float = 1e-8,
) -> list[tuple[str, KernelMatrix]]:
    """Grid-admissible kernels: filtered coordinate pullbacks plus random draws.

    The pullback (b-type) kernels are admissible at their own alpha by
    construction but not at every other alpha, so each candidate is checked
    on the full grid and dropped if it fails; seeded random draws fill the
    census to ``count``.
    """
    out: list[tuple[str, KernelMatrix]] = []
    for m, alpha in enumerate(grid.alphas):
        if len(out) >= count // 2:
            break
        kern = make_b_kernel(alpha, trunc.nodes)
        if admissibility_check(kern, grid, tol).is_admissible_on_grid:
            out.append((f"b[{m}]", kern))
    k = 0
    while len(out) < count and k < 4 * count:
        try:
            kern = random_admissible_kernel(trunc.nodes, grid, seed=seed + k, tol=tol)
            out.append((f"rand[{seed + k}]", kern))
        except Exception:
            pass
        k += 1
    if not out:
        raise ValidationError("kernel census came up empty; refine the grid")
    return out


def carleson_condition(trunc: SequenceTruncation, alpha: complex) -> float:
    """Worst Carleson product of the truncation through phi(alpha, .).

    Returns min over k of prod over j != k of the pseudo-hyperbolic distance
    of the coordinate images; positive values certify separation through this
    single coordinate direction (coincident images give zero).
    """
    if abs(alpha) > 1.0 + 1e-12:
        raise ValidationError("|alpha| <= 1 required")
    z = phi_values(np.array([alpha]), trunc.nodes.s, trunc.nodes.p)[0]
    n = trunc.n
    if n == 1:
        return 1.0
    worst = np.inf
    for k in range(n):
        prod = 1.0
        for j in range(n):
            if j == k:
                continue
            prod *= pseudo_hyperbolic(complex(z[j]), complex(z[k]))
        worst = min(worst, prod)
    return float(worst)


def best_carleson_alpha(
    trunc: SequenceTruncation, grid: AlphaGrid
) -> tuple[complex, float]:
    """Grid alpha with the largest Carleson product for the truncation."""
    best_alpha = complex(grid.alphas[0])
    best = -np.inf
    for alpha in grid.alphas:
        v = carleson_condition(trunc, complex(alpha))
        if v > best:
            best = v
            best_alpha = complex(alpha)
    return best_alpha, float(best)


def strong_separation(
    trunc: SequenceTruncation,
    bound: float,
    grid: AlphaGrid | None = None,
    opts: SolveOptions = SolveOptions(),
) -> list[PickSolution]:
    """One unit-vector problem per node: f_i(node_i) = 1, zero elsewhere.

    All Feasible means the truncation is strongly separated with constant at
    most ``bound``.
    """
    if bound <= 0:
        raise ValidationError("bound must be positive")
    grid = grid or AlphaGrid.solver_default()
    out = []
    for i in range(trunc.n):
        targets = [
            np.array([[1.0 + 0.0j if j == i else 0.0 + 0.0j]]) for j in range(trunc.n)
        ]
        problem = PickProblem(nodes=trunc.nodes, targets=tuple(targets), norm_bound=bound)
        out.append(solve_pick(problem, grid, opts))
    return out


def weak_separation(
    trunc: SequenceTruncation,
    bound: float,
    grid: AlphaGrid | None = None,
    opts: SolveOptions = SolveOptions(),
) -> list[list[str]]:
    """Pairwise two-point solves; entry (i, j) asks for 1 at node i, 0 at node j."""
    if bound <= 0:
        raise ValidationError("bound must be positive")
    grid = grid or AlphaGrid.solver_default()
    n = trunc.n
    statuses = [["n/a"] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            pair = NodeSet((trunc.nodes.points[i], trunc.nodes.points[j]))
            problem = PickProblem(
                nodes=pair,
                targets=(np.array([[1.0 + 0.0j]]), np.array([[0.0 + 0.0j]])),
                norm_bound=bound,
            )
            statuses[i][j] = solve_pick(problem, grid, opts).status.value
    return statuses


def phase_pattern_family(n: int, budget: int = 64) -> np.ndarray:
    """Unimodular target patterns forming a full residue-class group.

    Patterns are all n-tuples of L-th roots of unity with L chosen so the
    family size L**n stays within the budget (at least L = 2).  Averaging
    over this family reproduces the exact character orthogonality the
    Grammian sandwich argument needs, so the interpolation-constant estimate
    it produces bounds every sampled normalized Grammian two-sidedly.
    """
    lroot = max(2, int(np.floor(budget ** (1.0 / n) + 1e-9)))
    roots = np.exp(2j * np.pi * np.arange(lroot) / lroot)
    grids = np.meshgrid(*([roots] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)  # (L**n, n)


def interpolation_constant(
    trunc: SequenceTruncation,
    grid: AlphaGrid | None = None,
    opts: SolveOptions = SolveOptions(),
    budget: int = 64,
    width: float = 1e-4,
) -> float:
    """Measured interpolation constant: max minimal norm over phase patterns.

    Each pattern contributes its certified-feasible bracket endpoint (the
    bisection midpoint plus the bracket allowance), so every pattern is known
    solvable at the returned constant and the Grammian sandwich derived from
    it holds without a sampling gap.
    """
    grid = grid or AlphaGrid.solver_default()
    best = 0.0
    seen: set[tuple] = set()
    for pattern in phase_pattern_family(trunc.n, budget):
        # a global unimodular factor leaves the assembled target unchanged,
        # so one representative per phase class decides the whole class
        canonical = pattern / pattern[0]
        key = tuple(np.round(canonical, 9))
        if key in seen:
            continue
        seen.add(key)
        problem = PickProblem(
            nodes=trunc.nodes,
            targets=tuple(np.array([[w]]) for w in pattern),
        )
        mid = minimal_norm(problem, grid, opts, width=width)
        best = max(best, mid + width * max(1.0, mid))
    return best
