"""Transfer operators along the ring in the sources' Schmidt frames.

Every source ``k`` is rotated so that it reads ``sum_i lam_i |ii>``; with
``Lam_k = diag(sqrt(d_k) lam)`` and ``omega_k = sum_i |ii> / sqrt(d_k)`` the
party unitaries can be pushed from the party's own systems to the far ends
of its two neighbouring sources (``G``), or absorbed into maximally
entangled pairs (``F``).  For odd rings the last party needs an extra
partial-transposed operator ``Q`` that links ``L_{n-1}`` to ``L_0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, PreconditionError
from ..ring_model import QuantumRingStrategy
from ..tensor_core import RANK_TOL, apply_local, partial_transpose, schmidt_decompose
from .unitaries import PartyUnitary


@dataclass(frozen=True)
class ChainOperators:
    """Schmidt-frame data and transfer operators for a full-rank ring.

    ``right_basis[k]`` / ``left_basis[k]`` hold, as columns, the Schmidt
    vectors of source ``k`` on ``R_k`` and on ``L_{k+1}``.  ``frame_unitaries``
    are the party unitaries expressed in those bases (acting on ``L_k R_k``).
    ``g_ops[k]`` acts on ``(R_{k-1}, L_{k+1})`` and ``f_ops[k]`` on
    ``(L_k, R_k)``; ``q_op`` acts on ``(L_{n-1}, L_0)`` and is only set for odd
    ``n``.
    """

    n: int
    schmidt_coefficients: tuple[np.ndarray, ...]
    right_basis: tuple[np.ndarray, ...]
    left_basis: tuple[np.ndarray, ...]
    frame_unitaries: tuple[np.ndarray, ...]
    g_ops: tuple[np.ndarray, ...]
    f_ops: tuple[np.ndarray, ...]
    q_op: np.ndarray | None

    def lam(self, k: int) -> np.ndarray:
        k %= self.n
        c = self.schmidt_coefficients[k]
        return np.diag(np.sqrt(len(c)) * c).astype(complex)

    def dim(self, k: int) -> int:
        return len(self.schmidt_coefficients[k % self.n])

    # ---- local identities -------------------------------------------------

    def _pair(self, a: int, b: int, maximal: bool) -> np.ndarray:
        """Sources ``a`` then ``b`` as a tensor on ``(R_a, L_{a+1}, R_b, L_{b+1})``."""
        out = []
        for k in (a, b):
            c = self.schmidt_coefficients[k % self.n]
            w = np.full(len(c), 1 / np.sqrt(len(c))) if maximal else c
            out.append(np.diag(w).astype(complex))
        return np.einsum("ij,kl->ijkl", out[0], out[1])

    def g_residual(self, k: int) -> float:
        """``U_k |psi psi> = G_k |omega omega>`` on sources ``k-1, k``."""
        psi = self._pair(k - 1, k, False)
        lhs = apply_local(psi, self.frame_unitaries[k], [1, 2])
        rhs = apply_local(self._pair(k - 1, k, True), self.g_ops[k], [0, 3])
        return float(np.linalg.norm(lhs - rhs))

    def f_residual(self, k: int) -> float:
        """``U_k^dag |psi psi> = F_k |omega omega>`` on sources ``k-1, k``."""
        psi = self._pair(k - 1, k, False)
        lhs = apply_local(psi, self.frame_unitaries[k].conj().T, [1, 2])
        rhs = apply_local(self._pair(k - 1, k, True), self.f_ops[k], [1, 2])
        return float(np.linalg.norm(lhs - rhs))

    def q_residual(self) -> float:
        """Moving ``R_{n-1}`` onto ``L_0`` through ``omega_{n-1}``."""
        if self.q_op is None:
            raise PreconditionError("Q is only defined for odd rings")
        k = self.n - 1
        om = self._pair(k - 1, k, True)
        op = self.frame_unitaries[k].conj().T @ np.kron(self.lam(k - 1), np.eye(self.dim(k)))
        lhs = apply_local(om, op, [1, 2])
        rhs = apply_local(om, self.q_op, [1, 3])
        return float(np.linalg.norm(lhs - rhs))

    def local_residuals(self) -> dict[str, float]:
        out = {}
        for k in range(self.n):
            out[f"G_{k}"] = self.g_residual(k)
            out[f"F_{k}"] = self.f_residual(k)
        if self.q_op is not None:
            out["Q"] = self.q_residual()
        return out

    # ---- whole-ring identities --------------------------------------------

    def _ring(self, maximal: bool) -> np.ndarray:
        t = np.ones((), dtype=complex)
        for k in range(self.n):
            c = self.schmidt_coefficients[k]
            w = np.full(len(c), 1 / np.sqrt(len(c))) if maximal else c
            t = np.multiply.outer(t, np.diag(w).astype(complex))
        return t

    def _r(self, k: int) -> int:
        return 2 * (k % self.n)

    def _l(self, k: int) -> int:
        return (2 * (k % self.n) - 1) % (2 * self.n)

    def ring_residuals(self) -> dict[str, float]:
        """Residuals of the two chain products against the direct action.

        ``first_*`` covers the parties ``1, 3, 5, ...`` (plus ``0, 2, ...`` for
        even rings on the other side); ``chain_equality`` compares the two
        chain products, which vanishes exactly when the stabilizer condition
        holds.
        """
        n = self.n
        psi = self._ring(False)
        omega = self._ring(True)
        u = self.frame_unitaries
        if n % 2 == 0:
            g_parties = list(range(0, n, 2))
            f_parties = list(range(1, n, 2))
            left_chain = omega
        else:
            g_parties = list(range(1, n - 1, 2))
            f_parties = list(range(0, n, 2))
            left_chain = apply_local(omega, self.lam(n - 1), [self._r(n - 1)])
        direct_g = psi
        for k in g_parties:
            direct_g = apply_local(direct_g, u[k], [self._l(k), self._r(k)])
            left_chain = apply_local(left_chain, self.g_ops[k], [self._r(k - 1), self._l(k + 1)])
        direct_f = psi
        for k in f_parties:
            direct_f = apply_local(direct_f, u[k].conj().T, [self._l(k), self._r(k)])
        right_chain = omega
        if n % 2:
            right_chain = apply_local(right_chain, self.q_op, [self._l(n - 1), self._l(0)])
            f_chain = f_parties[:-1]
        else:
            f_chain = f_parties
        for k in f_chain:
            right_chain = apply_local(right_chain, self.f_ops[k], [self._l(k), self._r(k)])
        return {
            "g_chain": float(np.linalg.norm(direct_g - left_chain)),
            "f_chain": float(np.linalg.norm(direct_f - right_chain)),
            "chain_equality": float(np.linalg.norm(left_chain - right_chain)),
        }


def build_chain_operators(s: QuantumRingStrategy, units, tol: float = RANK_TOL) -> ChainOperators:
    """Transfer operators for ``s`` and party unitaries ``units``.

    Requires every source to have full Schmidt rank on both of its systems;
    otherwise a :class:`PreconditionError` names the offending sources.
    """
    n = s.n
    if len(units) != n:
        raise DimensionError(f"{len(units)} unitaries for {n} parties")
    coeffs, rb, lb = [], [], []
    bad = []
    for k, st in enumerate(s.source_states):
        dec = schmidt_decompose(st, [0], tol)
        dr, dl = st.dims
        if dec.numerical_rank < max(dr, dl):
            bad.append(f"source {k}: Schmidt rank {dec.numerical_rank}, dims {st.dims}")
            continue
        coeffs.append(dec.coefficients[: dec.numerical_rank])
        rb.append(dec.left_vectors[:, : dec.numerical_rank])
        lb.append(dec.right_vectors[:, : dec.numerical_rank])
    if bad:
        raise PreconditionError("sources are not full Schmidt rank: " + "; ".join(bad))

    frame = []
    for k in range(n):
        m = units[k].matrix if isinstance(units[k], PartyUnitary) else np.asarray(units[k], dtype=complex)
        basis = np.kron(lb[(k - 1) % n], rb[k])
        frame.append(basis.conj().T @ m @ basis)

    def lam(k):
        c = coeffs[k % n]
        return np.diag(np.sqrt(len(c)) * c).astype(complex)

    g_ops, f_ops = [], []
    for k in range(n):
        both = np.kron(lam(k - 1), lam(k))
        g_ops.append(both @ frame[k].T)
        f_ops.append(frame[k].conj().T @ both)
    q_op = None
    if n % 2:
        k = n - 1
        dl, dr = len(coeffs[k - 1]), len(coeffs[k])
        op = frame[k].conj().T @ np.kron(lam(k - 1), np.eye(dr))
        q_op = partial_transpose(op, (dl, dr), 1)
    return ChainOperators(
        n, tuple(coeffs), tuple(rb), tuple(lb), tuple(frame), tuple(g_ops), tuple(f_ops), q_op
    )
