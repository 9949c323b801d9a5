import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ringcert.errors import DimensionError, DomainError
from ringcert.tensor_core import (
    StateVector,
    apply_local,
    as_matrix,
    binary_entropy,
    embed_operator,
    fidelity,
    ket,
    operator_schmidt,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    random_density_matrix,
    random_state,
    random_unitary,
    schmidt_decompose,
    tensor_product,
    trace_distance,
    von_neumann_entropy,
)

PSI_PLUS = (ket(0, 1) + ket(1, 0)) / np.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

seeds = st.integers(0, 2**32 - 1)
small_dims = st.lists(st.integers(1, 3), min_size=2, max_size=3)


class TestMatrixBasics:
    def test_as_matrix_rejects_nan(self):
        with pytest.raises(DomainError):
            as_matrix([[1.0, np.nan]])

    def test_as_matrix_rejects_3d(self):
        with pytest.raises(DimensionError):
            as_matrix(np.zeros((2, 2, 2)))

    def test_state_requires_norm(self):
        with pytest.raises(DomainError):
            StateVector((2,), [1.0, 1.0])

    def test_state_dim_mismatch(self):
        with pytest.raises(DimensionError):
            StateVector((2, 2), [1, 0, 0])

    def test_tensor_product_identity(self):
        assert np.allclose(tensor_product(np.eye(2), np.eye(2)), np.eye(4))

    def test_tensor_product_basis(self):
        v = tensor_product(ket(0), ket(1)).ravel()
        assert np.argmax(np.abs(v)) == 1 and np.isclose(v[1], 1)

    def test_tensor_product_shape(self):
        assert tensor_product(np.ones((2, 3)), np.ones((4, 5))).shape == (8, 15)


class TestPartialOps:
    def test_trace_bell_pair(self):
        rho = np.outer(PSI_PLUS, PSI_PLUS.conj())
        assert np.allclose(partial_trace(rho, (2, 2), [0]), np.eye(2) / 2, atol=1e-15)

    def test_trace_product(self, rng):
        a = random_density_matrix(2, seed=rng)
        b = 0.7 * random_density_matrix(3, seed=rng)
        assert np.allclose(partial_trace(np.kron(a, b), (2, 3), [0]), a * np.trace(b), atol=1e-14)

    def test_trace_dims_mismatch(self):
        with pytest.raises(DimensionError):
            partial_trace(np.eye(4), (2, 3), [0])

    @given(seeds, small_dims)
    def test_trace_preserved(self, seed, dims):
        d = int(np.prod(dims))
        rho = random_density_matrix(d, seed=seed)
        red = partial_trace(rho, dims, [0])
        assert abs(np.trace(red) - np.trace(rho)) <= 1e-12

    @given(seeds)
    def test_partial_transpose_involution(self, seed):
        m = random_density_matrix(6, seed=seed)
        once = partial_transpose(m, (2, 3), 1)
        assert np.allclose(partial_transpose(once, (2, 3), 1), m)
        assert np.allclose(partial_transpose(np.kron(m[:2, :2], m[:3, :3]), (2, 3), 1),
                           np.kron(m[:2, :2], m[:3, :3].T))

    @given(seeds)
    def test_apply_local_matches_embed(self, seed):
        rng = np.random.default_rng(seed)
        dims = (2, 3, 2)
        psi = random_state(dims, rng)
        u = random_unitary(6, rng)
        via_tensor = apply_local(psi.tensor(), u, (2, 1)).ravel()
        full = embed_operator(u, dims, (2, 1))
        assert np.allclose(via_tensor, full @ psi.amplitudes, atol=1e-12)

    def test_permute_roundtrip(self, rng):
        psi = random_state((2, 3, 4), rng)
        moved = permute_subsystems(psi.amplitudes, (2, 3, 4), (2, 0, 1))
        back = permute_subsystems(moved, (4, 2, 3), (1, 2, 0))
        assert np.allclose(back, psi.amplitudes)


class TestSchmidt:
    def test_bell_pair(self):
        dec = schmidt_decompose(StateVector((2, 2), PSI_PLUS), [0])
        assert dec.numerical_rank == 2
        assert np.allclose(dec.coefficients[:2], [2**-0.5] * 2, atol=1e-14)

    def test_product(self, rng):
        psi = random_state((3,), rng) @ random_state((2,), rng)
        dec = schmidt_decompose(psi, [0])
        assert dec.numerical_rank == 1
        assert np.isclose(dec.coefficients[0], 1.0)

    @given(seeds, small_dims)
    def test_reconstruction_and_norm(self, seed, dims):
        psi = random_state(dims, seed)
        dec = schmidt_decompose(psi, [0])
        assert abs(np.sum(dec.coefficients**2) - 1) <= 1e-10
        assert np.max(np.abs(dec.reconstruct() - psi.amplitudes)) <= 1e-12

    def test_operator_product(self, rng):
        a, b = random_unitary(2, rng), random_unitary(3, rng)
        dec = operator_schmidt(np.kron(a, b), (2, 3))
        assert dec.numerical_rank == 1
        rebuilt = dec.coefficients[0] * np.kron(dec.left(0), dec.right(0))
        assert np.allclose(rebuilt, np.kron(a, b), atol=1e-12)
        # factors agree with the inputs up to reciprocal scalars
        ratio = dec.left(0) / a
        assert np.allclose(ratio, ratio.flat[0])

    def test_cnot_rank(self):
        assert operator_schmidt(CNOT, (2, 2)).numerical_rank == 2
        # independent route: plain numpy SVD of the realigned matrix
        r = CNOT.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
        assert np.sum(np.linalg.svd(r, compute_uv=False) > 1e-8) == 2

    def test_swap_rank(self):
        assert operator_schmidt(SWAP, (2, 2)).numerical_rank == 4


class TestEntropies:
    @pytest.mark.parametrize("q,h", [(0.5, 1.0), (0.0, 0.0), (1.0, 0.0), (0.25, 0.8112781244591328)])
    def test_binary_entropy(self, q, h):
        assert binary_entropy(q) == pytest.approx(h, abs=1e-15)

    @pytest.mark.parametrize("q", [-0.1, 1.1, float("nan")])
    def test_binary_entropy_domain(self, q):
        with pytest.raises(DomainError):
            binary_entropy(q)

    def test_von_neumann(self):
        assert von_neumann_entropy(np.outer(ket(0), ket(0))) == pytest.approx(0.0, abs=1e-15)
        assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0)
        assert von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(binary_entropy(0.25))

    def test_von_neumann_rejects_non_hermitian(self):
        with pytest.raises(DomainError):
            von_neumann_entropy(np.array([[0.5, 1.0], [0.0, 0.5]]))

    @given(st.floats(0, 1))
    def test_binary_entropy_symmetric(self, q):
        assert binary_entropy(q) == pytest.approx(binary_entropy(1 - q), abs=1e-12)


class TestDistances:
    def test_identical(self, rng):
        rho = random_density_matrix(3, seed=rng)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-7)
        assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-14)

    def test_orthogonal(self):
        p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
        assert fidelity(p0, p1) == pytest.approx(0.0, abs=1e-14)
        assert trace_distance(p0, p1) == pytest.approx(1.0)

    def test_pure_vs_mixed(self):
        assert fidelity(np.diag([1.0, 0.0]), np.eye(2) / 2) == pytest.approx(2**-0.5)
        assert trace_distance(np.diag([1.0, 0.0]), np.eye(2) / 2) == pytest.approx(0.5)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            fidelity(np.eye(2) / 2, np.eye(3) / 3)


class TestRandom:
    @given(seeds, st.integers(1, 5))
    def test_unitary(self, seed, d):
        u = random_unitary(d, seed)
        assert np.max(np.abs(u.conj().T @ u - np.eye(d))) <= 1e-12

    def test_deterministic(self):
        assert np.array_equal(random_unitary(3, 11), random_unitary(3, 11))

    def test_dim_one(self):
        u = random_unitary(1, 5)
        assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) <= 1e-12
