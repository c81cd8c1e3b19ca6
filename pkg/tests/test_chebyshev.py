"""Tests for scalar/matrix Chebyshev evaluation and the iterate block
formula."""

import numpy as np
import pytest

from symindex.chebyshev import (
    AlphaDegenerateError,
    ChebKind,
    cheb_matrix,
    cheb_scalar,
    cheb_trig_reference,
    iterate_blocks,
)
from symindex.errors import InvalidBlocksError
from symindex.linalg import inf_norm
from symindex.returnmap import ReturnMapBlocks, random_return_map, rotation_blocks


class TestScalar:
    def test_degree_two_first_kind(self):
        # T_2(x) = 2x^2 - 1
        assert cheb_scalar(ChebKind.FIRST, 2, 0.3) == pytest.approx(-0.82)

    def test_degree_two_second_kind(self):
        # U_2(x) = 4x^2 - 1
        assert cheb_scalar(ChebKind.SECOND, 2, 0.3) == pytest.approx(-0.64)

    def test_cosine_argument(self):
        # T_7(cos 0.4) = cos 2.8
        assert cheb_scalar(ChebKind.FIRST, 7, np.cos(0.4)) == pytest.approx(
            np.cos(2.8), abs=1e-12
        )

    def test_base_cases(self):
        assert cheb_scalar(ChebKind.FIRST, 0, 0.77) == 1.0
        assert cheb_scalar(ChebKind.FIRST, 1, 0.77) == 0.77
        assert cheb_scalar(ChebKind.SECOND, 0, 0.77) == 1.0
        assert cheb_scalar(ChebKind.SECOND, 1, 0.77) == pytest.approx(1.54)

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError):
            cheb_scalar(ChebKind.FIRST, -1, 0.0)


class TestTrigReference:
    def test_degree_zero(self):
        t, u = cheb_trig_reference(0, 1.1)
        assert t == pytest.approx(1.0)
        assert u == pytest.approx(1.0)

    def test_degree_one(self):
        t, u = cheb_trig_reference(1, 0.9)
        assert t == pytest.approx(np.cos(0.9))
        assert u == pytest.approx(2 * np.cos(0.9))

    def test_matches_recurrence(self):
        t, u = cheb_trig_reference(5, 0.7)
        x = np.cos(0.7)
        assert abs(t - cheb_scalar(ChebKind.FIRST, 5, x)) <= 1e-12
        assert abs(u - cheb_scalar(ChebKind.SECOND, 5, x)) <= 1e-12

    def test_degenerate_alpha(self):
        with pytest.raises(AlphaDegenerateError):
            cheb_trig_reference(3, 0.0)

    def test_closed_form_grid(self):
        # |T_k(cos a) - cos(ka)| <= 1e-11 and the U analogue <= 1e-10
        alphas = np.linspace(0.05, np.pi - 0.05, 100)
        for k in range(21):
            for alpha in alphas:
                x = np.cos(alpha)
                assert abs(cheb_scalar(ChebKind.FIRST, k, x) - np.cos(k * alpha)) <= 1e-11
                assert (
                    abs(cheb_scalar(ChebKind.SECOND, k, x) - np.sin((k + 1) * alpha) / np.sin(alpha))
                    <= 1e-10
                )


class TestMutualRecursion:
    def test_scalar_grid(self):
        # T_{k+1}(x) = x T_k(x) - (1 - x^2) U_{k-1}(x)
        # U_k(x) = x U_{k-1}(x) + T_k(x)
        for x in np.linspace(-0.95, 0.95, 41):
            for k in range(1, 12):
                t_k = cheb_scalar(ChebKind.FIRST, k, x)
                t_k1 = cheb_scalar(ChebKind.FIRST, k + 1, x)
                u_km1 = cheb_scalar(ChebKind.SECOND, k - 1, x)
                u_k = cheb_scalar(ChebKind.SECOND, k, x)
                assert abs(t_k1 - (x * t_k - (1 - x * x) * u_km1)) <= 1e-9
                assert abs(u_k - (x * u_km1 + t_k)) <= 1e-9

    def test_matrix_identities(self):
        rng = np.random.default_rng(314)
        eye = np.eye(4)
        for _ in range(10):
            a = rng.uniform(-1, 1, size=(4, 4))
            for k in range(1, 11):
                t_k = cheb_matrix(ChebKind.FIRST, k, a)
                t_k1 = cheb_matrix(ChebKind.FIRST, k + 1, a)
                u_km1 = cheb_matrix(ChebKind.SECOND, k - 1, a)
                u_k = cheb_matrix(ChebKind.SECOND, k, a)
                assert inf_norm(t_k1 - (a @ t_k - (eye - a @ a) @ u_km1)) <= 1e-9
                assert inf_norm(u_k - (a @ u_km1 + t_k)) <= 1e-9


class TestMatrix:
    def test_base_cases(self):
        a = np.array([[0.2, 1.0], [0.0, -0.5]])
        np.testing.assert_array_equal(cheb_matrix(ChebKind.FIRST, 0, a), np.eye(2))
        np.testing.assert_array_equal(cheb_matrix(ChebKind.FIRST, 1, a), a)
        np.testing.assert_allclose(cheb_matrix(ChebKind.SECOND, 1, a), 2 * a)

    def test_diagonal_reduces_to_scalar(self):
        d = np.diag([0.4, -0.9])
        for k in range(8):
            expected = np.diag(
                [cheb_scalar(ChebKind.FIRST, k, 0.4), cheb_scalar(ChebKind.FIRST, k, -0.9)]
            )
            np.testing.assert_allclose(cheb_matrix(ChebKind.FIRST, k, d), expected, atol=1e-12)


class TestIterateBlocks:
    def test_k1_is_identity_map(self):
        blocks = random_return_map(2, rng_seed=8)
        out = iterate_blocks(blocks, 1)
        np.testing.assert_allclose(out.assemble(), blocks.assemble(), atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_matches_matrix_power(self, n):
        for seed in range(30):
            blocks = random_return_map(n, rng_seed=seed)
            phi = blocks.assemble()
            power = phi.copy()
            for k in range(2, 7):
                power = power @ phi
                out = iterate_blocks(blocks, k, validate_tol=None)
                assert inf_norm(out.assemble() - power) <= 1e-9 * max(1.0, inf_norm(phi) ** k)

    def test_iterate_satisfies_identities(self):
        from symindex.returnmap import validate_blocks

        blocks = random_return_map(3, rng_seed=77)
        scale = max(1.0, inf_norm(blocks.assemble()) ** 5)
        out = iterate_blocks(blocks, 5)
        assert validate_blocks(out, tol=1e-9 * scale).passed

    def test_rotation_adds_angles(self):
        theta = 0.37
        for k in range(1, 9):
            out = iterate_blocks(rotation_blocks(theta), k)
            expected = rotation_blocks(k * theta).assemble()
            assert inf_norm(out.assemble() - expected) <= 1e-12

    def test_composition_consistency(self):
        blocks = random_return_map(2, rng_seed=21)
        phi = blocks.assemble()
        for j, k in [(1, 2), (2, 3), (3, 3)]:
            combined = iterate_blocks(blocks, j + k).assemble()
            product = iterate_blocks(blocks, j).assemble() @ iterate_blocks(blocks, k).assemble()
            assert inf_norm(combined - product) <= 1e-9 * max(1.0, inf_norm(phi) ** (j + k))

    def test_invalid_blocks_rejected(self):
        bad = ReturnMapBlocks(
            1, np.array([[2.0]]), np.array([[1.0]]), np.array([[1.0]]), np.array([[2.0]])
        )  # a^2 - bc = 3 != 1
        with pytest.raises(InvalidBlocksError):
            iterate_blocks(bad, 2)
