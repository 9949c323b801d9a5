"""Explicit dilation of a two-outcome POVM on a projector's range."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..tensor_core import as_matrix


@dataclass(frozen=True)
class NaimarkDilation:
    """Reflection ``V`` on ``H (x) C^2`` and the dilated projectors.

    The auxiliary qubit is the last tensor factor and starts in ``|0>``.
    ``basis[:, k]`` diagonalizes ``E0`` on the range of ``support`` with
    eigenvalue ``weights[k]``.
    """

    unitary: np.ndarray
    projectors: tuple[np.ndarray, np.ndarray]
    weights: np.ndarray
    basis: np.ndarray
    support: np.ndarray

    def compress(self, i: int) -> np.ndarray:
        """``<0| Pi_i |0>`` on the auxiliary qubit."""
        d = self.support.shape[0]
        return self.projectors[i].reshape(d, 2, d, 2)[:, 0, :, 0]


def naimark_dilate_binary(e0, e1, tol: float = 1e-10) -> NaimarkDilation:
    e0 = as_matrix(e0)
    e1 = as_matrix(e1)
    failures = []
    if e0.shape != e1.shape or e0.shape[0] != e0.shape[1]:
        raise ValidationError("cannot dilate", [f"shapes {e0.shape} and {e1.shape}"])
    for name, e in (("E0", e0), ("E1", e1)):
        herm = float(np.max(np.abs(e - e.conj().T)))
        if herm > tol:
            failures.append(f"{name} not Hermitian (residual {herm:.3e})")
        elif np.linalg.eigvalsh(e).min() < -tol:
            failures.append(f"{name} not PSD (min eigenvalue {np.linalg.eigvalsh(e).min():.3e})")
    pi = e0 + e1
    idem = float(np.max(np.abs(pi @ pi - pi)))
    if idem > tol:
        failures.append(f"E0 + E1 is not a projector (residual {idem:.3e})")
    if failures:
        raise ValidationError("cannot dilate", failures)

    d = e0.shape[0]
    w, v = np.linalg.eigh((pi + pi.conj().T) / 2)
    rng_basis = v[:, w > 0.5]
    m = rng_basis.conj().T @ e0 @ rng_basis
    p, wk = np.linalg.eigh((m + m.conj().T) / 2)
    p = np.clip(p, 0.0, 1.0)
    phi = rng_basis @ wk

    aux0 = np.array([1.0, 0.0])
    aux1 = np.array([0.0, 1.0])
    big = np.kron(np.eye(d) - pi, np.eye(2)).astype(complex)
    for k in range(phi.shape[1]):
        f = phi[:, k]
        sp, sq = np.sqrt(p[k]), np.sqrt(1.0 - p[k])
        f0 = np.kron(f, aux0)
        f1 = np.kron(f, aux1)
        big += np.outer(sp * f0 + sq * f1, f0.conj()) + np.outer(sq * f0 - sp * f1, f1.conj())
    projs = tuple(
        big.conj().T @ np.kron(pi, np.outer(a, a)) @ big for a in (aux0, aux1)
    )
    return NaimarkDilation(big, projs, p, phi, pi)
