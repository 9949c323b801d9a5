"""Phase-weighted party unitaries and the stabilizer condition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import DimensionError, ValidationError, ConsistencyError
from ..ring_model import QuantumRingStrategy, label_token_count
from ..tensor_core import as_matrix, is_unitary, operator_schmidt

PHASE_TOL = 1e-12


@dataclass(frozen=True)
class PartyUnitary:
    """``U = sum_x exp(i phi_x) Pi^x`` together with the phase assigned to each value."""

    matrix: np.ndarray
    phase_map: Mapping[int, complex]

    def __post_init__(self):
        failures = []
        if not is_unitary(self.matrix, 1e-12):
            failures.append("matrix is not unitary within 1e-12")
        phases = list(self.phase_map.values())
        for i, a in enumerate(phases):
            if abs(abs(a) - 1) > PHASE_TOL:
                failures.append(f"phase {a} is not unit modulus")
            if any(abs(a - b) <= PHASE_TOL for b in phases[i + 1:]):
                failures.append("phases are not distinct")
        if failures:
            raise ValidationError("invalid party unitary", failures)


def tc_phase(x: int, total_tokens: int, n: int) -> complex:
    """``exp(2 pi i (x + 1/n) / (N + 1))``."""
    return complex(np.exp(2j * np.pi * (x + 1.0 / n) / (total_tokens + 1)))


def _label_values(pvm: Mapping, label_values: Mapping | None) -> dict[str, int]:
    out = {}
    bad = []
    for label in pvm:
        try:
            out[label] = int(label_values[label]) if label_values is not None else int(str(label))
        except (KeyError, ValueError, TypeError):
            bad.append(f"label {label!r} has no integer value")
    if bad:
        raise ValidationError("cannot build party unitary", bad)
    return out


def build_party_unitary(pvm: Mapping, total_tokens: int, n: int, label_values: Mapping | None = None) -> PartyUnitary:
    """Phase-weighted sum of a projective measurement with token-count outcomes.

    Outcome ``x`` gets phase ``2 pi (x + 1/n) / (N + 1)``.  Labels are read as
    integers unless ``label_values`` maps them (several labels may share a
    value, e.g. ``"1_0"`` and ``"1_1"`` both counting one token).
    """
    values = _label_values(pvm, label_values)
    out_of_range = [f"{l!r} -> {v}" for l, v in values.items() if not 0 <= v <= total_tokens]
    if out_of_range:
        raise ValidationError(f"values outside 0..{total_tokens}", out_of_range)
    phase_map = {v: tc_phase(v, total_tokens, n) for v in sorted(set(values.values()))}
    first = as_matrix(next(iter(pvm.values())))
    u = np.zeros_like(first)
    for label, op in pvm.items():
        u = u + phase_map[values[label]] * as_matrix(op)
    return PartyUnitary(u, phase_map)


def parity_party_unitary(pvm: Mapping) -> PartyUnitary:
    """``Pi^1 - Pi^0`` for a binary parity measurement."""
    values = _label_values(pvm, None)
    first = as_matrix(next(iter(pvm.values())))
    u = np.zeros_like(first)
    for label, op in pvm.items():
        u = u + (1.0 if values[label] % 2 else -1.0) * as_matrix(op)
    return PartyUnitary(u, {0: -1.0 + 0j, 1: 1.0 + 0j})


def rgb4_label_values() -> dict[str, int]:
    return {l: label_token_count(l) for l in ("0", "1_0", "1_1", "2")}


def tc_party_unitaries(s: QuantumRingStrategy, total_tokens: int, label_values=None) -> list[PartyUnitary]:
    return [build_party_unitary(m, total_tokens, s.n, label_values) for m in s.party_measurements]


def apply_party_unitaries(s: QuantumRingStrategy, units: Sequence, state=None) -> np.ndarray:
    """``(U_0 (x) ... (x) U_{n-1}) |Psi>`` as a party-major tensor."""
    if len(units) != s.n:
        raise DimensionError(f"{len(units)} unitaries for {s.n} parties")
    t = s.party_major_tensor(state)
    for k, u in enumerate(units):
        m = u.matrix if isinstance(u, PartyUnitary) else as_matrix(u)
        if m.shape != (t.shape[k], t.shape[k]):
            raise DimensionError(f"party {k} unitary shape {m.shape} != party dim {t.shape[k]}")
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [k])), 0, k)
    return t


def stabilizer_residual(s: QuantumRingStrategy, units: Sequence) -> float:
    """``|| (x)_k U_k |Psi> - |Psi> ||``."""
    psi = s.party_major_tensor()
    return float(np.linalg.norm(apply_party_unitaries(s, units) - psi))


def pvm_from_unitarity(povm: Mapping, phases, tol: float = 1e-10) -> bool:
    """Decide projectivity of a POVM through unitarity of ``sum_x e^{i phi_x} E_x``.

    Returns True iff the weighted sum is unitary within ``tol``; in that case
    every ``E_x`` is also checked to be idempotent and a
    :class:`ConsistencyError` is raised if one is not.
    """
    labels = list(povm)
    if isinstance(phases, Mapping):
        ph = [complex(phases[l]) for l in labels]
    else:
        ph = [complex(p) for p in phases]
    if len(ph) != len(labels):
        raise ValidationError("phase list mismatch", [f"{len(ph)} phases for {len(labels)} outcomes"])
    bad = [f"|{p}| != 1" for p in ph if abs(abs(p) - 1) > PHASE_TOL]
    bad += [
        f"phases of {labels[i]!r} and {labels[j]!r} coincide"
        for i in range(len(ph))
        for j in range(i + 1, len(ph))
        if abs(ph[i] - ph[j]) <= PHASE_TOL
    ]
    if bad:
        raise ValidationError("phases must be distinct and unit modulus", bad)
    ops = [as_matrix(povm[l]) for l in labels]
    u = sum(p * e for p, e in zip(ph, ops))
    if not is_unitary(u, tol):
        return False
    not_idem = [l for l, e in zip(labels, ops) if np.max(np.abs(e @ e - e)) > tol]
    if not_idem:
        raise ConsistencyError(f"weighted sum unitary but outcomes {not_idem} are not idempotent")
    return True


def factor_product_unitary(u, dims: tuple[int, int], tol: float = 1e-8):
    """Split ``U = V (x) W`` when ``U`` has operator-Schmidt rank one.

    Returns ``(V, W)`` with the overall phase fixed so that ``det V`` is
    real positive, or ``None`` when the rank exceeds one.
    """
    u = as_matrix(u)
    dl, dr = dims
    dec = operator_schmidt(u, (dl, dr), tol)
    if dec.numerical_rank != 1:
        return None
    a = dec.left(0) * np.sqrt(dl)
    b = dec.right(0) * (dec.coefficients[0] / np.sqrt(dl))
    det = np.linalg.det(a)
    if abs(det) > 0:
        ph = np.exp(-1j * np.angle(det) / dl)
        a = a * ph
        b = b / ph
    return a, b
