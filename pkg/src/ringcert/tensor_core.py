"""Dense complex linear algebra on small multipartite Hilbert spaces.

Conventions
-----------
A list of subsystem dimensions ``dims`` fixes the tensor-factor order
everywhere: the computational basis index of a product state is the
row-major (C order) index into ``dims``.  Multi-system operators are built
by embedding local operators with identities (:func:`embed_operator`,
:func:`apply_local`); nothing is reordered implicitly.

Matrices are plain ``numpy.ndarray`` of dtype ``complex128``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError

NORM_TOL = 1e-12
RANK_TOL = 1e-8
EIG_CLAMP = 1e-10

__all__ = [
    "StateVector",
    "SchmidtDecomposition",
    "as_matrix",
    "ket",
    "basis_state",
    "projector",
    "tensor_product",
    "kron_all",
    "partial_trace",
    "permute_subsystems",
    "apply_local",
    "embed_operator",
    "partial_transpose",
    "realign",
    "schmidt_decompose",
    "operator_schmidt",
    "binary_entropy",
    "von_neumann_entropy",
    "psd_sqrt",
    "fidelity",
    "trace_distance",
    "random_unitary",
    "random_state",
    "random_density_matrix",
    "is_unitary",
    "is_hermitian",
]


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array (vectors become columns)."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got array with shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    return m


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state on the ordered product space ``dims``."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1).copy()
        if any(d < 1 for d in dims):
            raise DimensionError(f"subsystem dimensions must be >= 1, got {dims}")
        if amps.size != prod(dims):
            raise DimensionError(
                f"{amps.size} amplitudes do not match dims {dims} (product {prod(dims)})"
            )
        if not np.all(np.isfinite(amps)):
            raise DomainError("state has non-finite amplitudes")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized: |v|^2 = {norm2!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, dims, amplitudes) -> "StateVector":
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if n == 0:
            raise DomainError("cannot normalize the zero vector")
        return cls(tuple(dims), v / n)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem."""
        return self.amplitudes.reshape(self.dims)

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def __matmul__(self, other: "StateVector") -> "StateVector":
        return StateVector(self.dims + other.dims, np.kron(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Singular-value split of a bipartite vector or a realigned operator.

    The input is reconstructed as
    ``sum_i coefficients[i] * kron(left_vectors[:, i], right_vectors[:, i])``.
    For an operator decomposition, ``left_shape``/``right_shape`` give the
    matrix shapes that the vectorized factors reshape to.
    """

    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    numerical_rank: int
    tol: float
    left_shape: tuple[int, ...] | None = None
    right_shape: tuple[int, ...] | None = None

    def left(self, i: int) -> np.ndarray:
        v = self.left_vectors[:, i]
        return v.reshape(self.left_shape) if self.left_shape else v

    def right(self, i: int) -> np.ndarray:
        v = self.right_vectors[:, i]
        return v.reshape(self.right_shape) if self.right_shape else v

    def reconstruct(self, rank: int | None = None) -> np.ndarray:
        k = len(self.coefficients) if rank is None else rank
        out = sum(
            self.coefficients[i] * np.kron(self.left_vectors[:, i], self.right_vectors[:, i])
            for i in range(k)
        )
        return np.asarray(out)


def ket(*indices: int, dims: Sequence[int] | None = None) -> np.ndarray:
    """Computational basis vector ``|i1 i2 ...>``; qubits unless ``dims`` given."""
    dims = tuple(dims) if dims is not None else (2,) * len(indices)
    if len(dims) != len(indices):
        raise DimensionError("one index per subsystem required")
    v = np.zeros(prod(dims), dtype=complex)
    v[np.ravel_multi_index(indices, dims)] = 1.0
    return v


def basis_state(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; ``a`` is the first (most significant) factor."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim == 1 and b.ndim == 1:
        return np.kron(a, b)
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors) -> np.ndarray:
    out = np.ones((1,), dtype=complex) if np.asarray(factors[0]).ndim == 1 else np.eye(1, dtype=complex)
    for f in factors:
        out = tensor_product(out, f)
    return out


def _check_square(m: np.ndarray, dims: Sequence[int]) -> None:
    d = prod(dims)
    if m.shape != (d, d):
        raise DimensionError(f"matrix shape {m.shape} does not match dims {tuple(dims)}")


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems retain their original relative order regardless of the
    order in which they are listed.
    """
    m = as_matrix(m)
    dims = tuple(int(d) for d in dims)
    _check_square(m, dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    t = m.reshape(dims + dims)
    letters = [chr(ord("a") + i) for i in range(2 * n)]
    row = letters[:n]
    col = letters[n:]
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = prod(dims[i] for i in keep)
    return reduced.reshape(dk, dk)


def permute_subsystems(v, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of a state vector.

    ``order[j]`` is the old position of the factor that ends up at position j.
    """
    dims = tuple(dims)
    t = np.asarray(v, dtype=complex).reshape(dims)
    return np.transpose(t, tuple(order)).reshape(-1)


def apply_local(tensor: np.ndarray, op, axes: Sequence[int]) -> np.ndarray:
    """Apply ``op`` to the listed axes of a state tensor.

    ``op`` acts on the ordered product of ``axes`` (first listed axis is the
    most significant factor).  Extra trailing axes of ``tensor`` beyond the
    system axes are allowed and untouched only if not listed.
    """
    axes = [int(a) for a in axes]
    dsub = [tensor.shape[a] for a in axes]
    op = as_matrix(op)
    dk = prod(dsub)
    if op.shape != (dk, dk):
        raise DimensionError(f"operator shape {op.shape} does not match axes dims {dsub}")
    k = len(axes)
    opt = op.reshape(dsub + dsub)
    out = np.tensordot(opt, tensor, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the k output axes first; move them back in place
    return np.moveaxis(out, list(range(k)), axes)


def embed_operator(op, dims: Sequence[int], sites: Sequence[int]) -> np.ndarray:
    """Full matrix of ``op`` acting on ``sites`` (in that order) of ``dims``."""
    dims = tuple(int(d) for d in dims)
    d = prod(dims)
    ident = np.eye(d, dtype=complex).reshape(dims + (d,))
    return apply_local(ident, op, sites).reshape(d, d)


def partial_transpose(m, dims: Sequence[int], sys: int) -> np.ndarray:
    m = as_matrix(m)
    dims = tuple(dims)
    _check_square(m, dims)
    n = len(dims)
    t = m.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[sys], axes[n + sys] = axes[n + sys], axes[sys]
    return np.transpose(t, axes).reshape(m.shape)


def realign(o, dims: tuple[int, int]) -> np.ndarray:
    """Map ``O[(i,k),(j,l)]`` to ``R[(i,j),(k,l)]`` for ``O`` on ``dA x dB``.

    ``O = A (x) B`` becomes the rank-one matrix ``vec(A) vec(B)^T``.
    """
    o = as_matrix(o)
    da, db = dims
    _check_square(o, (da, db))
    return o.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)


def _fix_phases(u: np.ndarray, vh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # largest-magnitude entry of every left vector made real positive
    u = u.copy()
    vh = vh.copy()
    for i in range(u.shape[1]):
        j = int(np.argmax(np.abs(u[:, i])))
        if abs(u[j, i]) == 0:
            continue
        ph = u[j, i] / abs(u[j, i])
        u[:, i] /= ph
        vh[i, :] *= ph
    return u, vh


def _svd_decomposition(mat, tol, left_shape=None, right_shape=None) -> SchmidtDecomposition:
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    u, vh = _fix_phases(u, vh)
    rank = int(np.sum(s > tol))
    return SchmidtDecomposition(
        coefficients=s,
        left_vectors=u,
        right_vectors=vh.T,
        numerical_rank=rank,
        tol=tol,
        left_shape=left_shape,
        right_shape=right_shape,
    )


def schmidt_decompose(v: StateVector, cut: Sequence[int], tol: float = RANK_TOL) -> SchmidtDecomposition:
    """Schmidt decomposition of ``v`` across ``cut | rest``.

    Subsystems in ``cut`` form the left factor (kept in their original
    relative order); the remaining subsystems form the right factor.
    Reconstruction is in the permuted order ``cut + rest``.
    """
    cut = sorted(set(int(c) for c in cut))
    rest = [i for i in range(len(v.dims)) if i not in cut]
    order = cut + rest
    t = np.transpose(v.tensor(), order)
    dl = prod(v.dims[i] for i in cut)
    dr = prod(v.dims[i] for i in rest)
    return _svd_decomposition(t.reshape(dl, dr), tol)


def operator_schmidt(o, dims: tuple[int, int], tol: float = RANK_TOL) -> SchmidtDecomposition:
    """Operator-Schmidt decomposition ``O = sum_i s_i A_i (x) B_i``.

    ``A_i = decomposition.left(i)`` and ``B_i = decomposition.right(i)`` are
    orthonormal in the Hilbert-Schmidt inner product.  Rank one iff ``O`` is
    a product operator up to ``tol``.
    """
    da, db = int(dims[0]), int(dims[1])
    return _svd_decomposition(realign(o, (da, db)), tol, (da, da), (db, db))


def binary_entropy(q: float) -> float:
    """Shannon entropy in bits of the distribution ``(q, 1 - q)``."""
    q = float(q)
    if not 0.0 <= q <= 1.0 or np.isnan(q):
        raise DomainError(f"probability must lie in [0, 1], got {q!r}")
    out = 0.0
    for p in (q, 1.0 - q):
        if p > 0.0:
            out -= p * np.log2(p)
    return float(out)


def is_hermitian(m, tol: float = EIG_CLAMP) -> bool:
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def is_unitary(m, tol: float = NORM_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])), initial=0.0) <= tol)


def _density_eigs(rho: np.ndarray) -> np.ndarray:
    if not is_hermitian(rho):
        raise DomainError("density matrix is not Hermitian")
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if np.any(w < -EIG_CLAMP):
        raise DomainError(f"matrix is not positive semidefinite (min eigenvalue {w.min():.3e})")
    return np.clip(w, 0.0, None)


def von_neumann_entropy(rho) -> float:
    """``-tr(rho log2 rho)``; eigenvalues in ``[-1e-10, 0]`` count as zero."""
    rho = as_matrix(rho)
    w = _density_eigs(rho)
    if abs(w.sum() - 1.0) > EIG_CLAMP:
        raise DomainError(f"density matrix has trace {w.sum()!r}, expected 1")
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def psd_sqrt(m) -> np.ndarray:
    m = as_matrix(m)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _check_pair(rho, sigma):
    rho = as_matrix(rho)
    sigma = as_matrix(sigma)
    if rho.shape != sigma.shape or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrices of shapes {rho.shape} and {sigma.shape}")
    return rho, sigma


def fidelity(rho, sigma) -> float:
    """Root fidelity ``tr|sqrt(rho) sqrt(sigma)|`` (in ``[0, 1]``)."""
    rho, sigma = _check_pair(rho, sigma)
    s = np.linalg.svd(psd_sqrt(rho) @ psd_sqrt(sigma), compute_uv=False)
    return float(min(1.0, s.sum()))


def trace_distance(rho, sigma) -> float:
    rho, sigma = _check_pair(rho, sigma)
    diff = rho - sigma
    w = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(min(1.0, 0.5 * np.abs(w).sum()))


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary from QR of a complex Ginibre matrix."""
    if dim < 1:
        raise DomainError(f"dimension must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_state(dims: Sequence[int], seed=None) -> StateVector:
    rng = np.random.default_rng(seed)
    d = prod(dims)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return StateVector.normalized(tuple(dims), v)


def random_density_matrix(dim: int, rank: int | None = None, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    k = dim if rank is None else rank
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
