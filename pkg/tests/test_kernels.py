import numpy as np
import pytest

from symbidisk import (
    AlphaGrid,
    KernelMatrix,
    NodeSet,
    ValidationError,
    admissibility_check,
    grammian_normalize,
    make_b_kernel,
    make_d_kernel,
    phi,
    random_admissible_kernel,
)
from symbidisk.hermitian import min_eigenvalue

from conftest import random_nodes


class TestNodeSet:
    def test_rejects_duplicates(self):
        with pytest.raises(ValidationError):
            NodeSet.from_pairs([(0.1, 0.0), (0.1, 0.0)])

    def test_rejects_non_members(self):
        with pytest.raises(ValidationError):
            NodeSet.from_pairs([(2.0, 1.0)])

    def test_coordinate_arrays(self, diagonal_pair):
        assert np.allclose(diagonal_pair.s, [1.0, -1.0])
        assert np.allclose(diagonal_pair.p, [0.25, 0.25])


class TestAlphaGrid:
    def test_boundary_sizes(self):
        assert len(AlphaGrid.boundary(8)) == 9
        assert len(AlphaGrid.boundary(8, include_zero=False)) == 8

    def test_check_default_census(self):
        # 64 boundary + origin + 8 radii x 16 angles
        assert len(AlphaGrid.check_default()) == 64 + 1 + 128

    def test_rejects_exterior_alpha(self):
        with pytest.raises(ValidationError):
            AlphaGrid(np.array([1.5 + 0.0j]))

    def test_rejects_duplicates(self):
        with pytest.raises(ValidationError):
            AlphaGrid(np.array([0.5, 0.5]))

    def test_weights_must_match(self):
        with pytest.raises(ValidationError):
            AlphaGrid(np.array([0.1, 0.2]), weights=np.array([1.0]))


class TestAdmissibilityCheck:
    def test_single_node_closed_form(self, solver_grid):
        nodes = NodeSet.from_pairs([(0.8, 0.15)])
        c = 2.5
        kern = KernelMatrix(nodes=nodes, matrix=np.array([[c]]))
        rep = admissibility_check(kern, solver_grid)
        assert rep.is_admissible_on_grid
        for alpha, lam in rep.min_eig_per_alpha:
            expected = (1.0 - abs(phi(alpha, nodes.points[0])) ** 2) * c
            assert lam == pytest.approx(expected, abs=1e-12)

    def test_b_kernel_at_own_alpha_gives_all_ones(self, diagonal_pair):
        alpha = 0.3 + 0.4j
        kern = make_b_kernel(alpha, diagonal_pair)
        rep = admissibility_check(kern, AlphaGrid(np.array([alpha])))
        assert rep.is_admissible_on_grid
        # (1 - phi phibar) cancels the kernel: all-ones matrix, min eig 0
        assert rep.min_eig_per_alpha[0][1] == pytest.approx(0.0, abs=1e-12)

    def test_all_ones_kernel_needs_equal_images(self, solver_grid):
        # ones - v v* is PSD only when the coordinate images v_i coincide, so
        # the all-ones kernel fails admissibility on generic distinct nodes
        nodes = NodeSet.from_pairs([(0.6, 0.05), (-0.4, 0.02), (0.1, -0.2)])
        kern = KernelMatrix(nodes=nodes, matrix=np.ones((3, 3)))
        rep = admissibility_check(kern, solver_grid)
        assert not rep.is_admissible_on_grid
        # a single node always passes: 1 - |phi|^2 > 0
        one = KernelMatrix(
            nodes=NodeSet.from_pairs([(0.6, 0.05)]), matrix=np.ones((1, 1))
        )
        assert admissibility_check(one, solver_grid).is_admissible_on_grid

    def test_subgrid_monotonicity(self, rng, solver_grid):
        nodes = random_nodes(rng, 3)
        kern = random_admissible_kernel(nodes, solver_grid, seed=3)
        sub = AlphaGrid(solver_grid.alphas[::3])
        assert admissibility_check(kern, sub, tol=1e-8).is_admissible_on_grid


class TestBKernel:
    def test_single_origin_node(self):
        kern = make_b_kernel(0.7, NodeSet.from_pairs([(0.0, 0.0)]))
        assert np.allclose(kern.matrix, [[1.0]])

    def test_diagonal_pair_closed_form(self, diagonal_pair):
        for alpha in (0.0, 0.5j, np.exp(1j * 0.3)):
            kern = make_b_kernel(alpha, diagonal_pair)
            expected = np.array([[4.0 / 3.0, 0.8], [0.8, 4.0 / 3.0]])
            assert np.abs(kern.matrix - expected).max() <= 1e-12

    def test_always_psd(self, rng):
        for _ in range(10):
            nodes = random_nodes(rng, 4)
            alpha = 0.9 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            kern = make_b_kernel(alpha, nodes)
            assert min_eigenvalue(kern.matrix) >= -1e-10 * np.abs(kern.matrix).max()

    def test_own_alpha_admissibility_sampled(self, rng):
        for k in range(5):
            nodes = random_nodes(rng, 3)
            alpha = np.exp(2j * np.pi * rng.random())
            kern = make_b_kernel(alpha, nodes)
            rep = admissibility_check(kern, AlphaGrid(np.array([alpha])), tol=1e-12)
            assert rep.is_admissible_on_grid


class TestDKernel:
    def test_scalar_reduction(self, diagonal_pair):
        alpha = 0.4
        d = make_d_kernel(alpha, diagonal_pair, [np.array([1.0]), np.array([1.0])])
        b = make_b_kernel(alpha, diagonal_pair)
        assert np.abs(d.matrix - b.matrix).max() <= 1e-14

    def test_zero_vectors_give_weak_kernel(self, diagonal_pair):
        d = make_d_kernel(0.2, diagonal_pair, [np.zeros(2), np.zeros(2)])
        assert np.abs(d.matrix).max() == 0.0

    def test_block_psd(self, rng):
        nodes = random_nodes(rng, 3)
        us = [rng.standard_normal(2) + 1j * rng.standard_normal(2) for _ in range(3)]
        us = [u / np.linalg.norm(u) for u in us]
        d = make_d_kernel(0.3 + 0.2j, nodes, us)
        assert d.block == 2
        assert min_eigenvalue(d.matrix) >= -1e-10 * np.abs(d.matrix).max()

    def test_dimension_mismatch(self, diagonal_pair):
        with pytest.raises(ValidationError):
            make_d_kernel(0.1, diagonal_pair, [np.ones(2), np.ones(3)])


class TestRandomAdmissibleKernel:
    def test_single_node_scalar(self, solver_grid):
        nodes = NodeSet.from_pairs([(0.4, 0.1)])
        kern = random_admissible_kernel(nodes, solver_grid, seed=0)
        assert kern.matrix.shape == (1, 1)
        assert np.real(kern.matrix[0, 0]) >= 1.0 - 1e-9

    def test_deterministic_in_seed(self, rng, solver_grid):
        nodes = random_nodes(rng, 3)
        k1 = random_admissible_kernel(nodes, solver_grid, seed=11)
        k2 = random_admissible_kernel(nodes, solver_grid, seed=11)
        assert k1.matrix.tobytes() == k2.matrix.tobytes()

    def test_output_passes_own_check(self, rng, solver_grid):
        for seed in range(4):
            nodes = random_nodes(rng, 3)
            kern = random_admissible_kernel(nodes, solver_grid, seed=seed)
            assert admissibility_check(kern, solver_grid, tol=1e-8).is_admissible_on_grid


class TestGrammianNormalize:
    def test_unit_diagonal(self, rng, solver_grid):
        nodes = random_nodes(rng, 3)
        kern = random_admissible_kernel(nodes, solver_grid, seed=5)
        g = grammian_normalize(kern)
        assert np.allclose(np.diag(g), 1.0)

    def test_scaling_invariance(self, diagonal_pair):
        kern = KernelMatrix(nodes=diagonal_pair, matrix=3.7 * np.ones((2, 2)))
        assert np.allclose(grammian_normalize(kern), np.ones((2, 2)))

    def test_b_kernel_value(self, diagonal_pair):
        g = grammian_normalize(make_b_kernel(0.2, diagonal_pair))
        assert np.abs(g - np.array([[1.0, 0.6], [0.6, 1.0]])).max() <= 1e-12

    def test_diagonal_congruence_invariance(self, rng, diagonal_pair):
        kern = make_b_kernel(0.5, diagonal_pair)
        d = np.diag(rng.random(2) + 0.5)
        conj = KernelMatrix(nodes=diagonal_pair, matrix=d @ kern.matrix @ d)
        assert np.abs(grammian_normalize(conj) - grammian_normalize(kern)).max() <= 1e-12

    def test_rejects_vanishing_diagonal(self, diagonal_pair):
        weak = KernelMatrix(nodes=diagonal_pair, matrix=np.zeros((2, 2)))
        with pytest.raises(ValidationError):
            grammian_normalize(weak)
