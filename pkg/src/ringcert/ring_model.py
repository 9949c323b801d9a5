"""Quantum and classical strategies on n-party ring networks.

Ring bookkeeping: party ``k`` (0-indexed) receives system ``L_k`` from source
``k-1`` and system ``R_k`` from source ``k`` (indices mod n).  Source ``k``
prepares a pure state on ``R_k (x) L_{k+1}``.

The global state is assembled source-major, ``R_0 L_1 R_1 L_2 ... R_{n-1} L_0``.
Measurements act party-major on ``L_k (x) R_k``.  :meth:`RingLayout.party_major_order`
is the permutation between the two and is the only place the regrouping
happens.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from math import comb, prod
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, ValidationError
from .tensor_core import StateVector, as_matrix

PROB_CLAMP = 1e-12
TOTAL_TOL = 1e-10
POVM_TOL = 1e-10

__all__ = [
    "RingLayout",
    "QuantumRingStrategy",
    "TokenStrategy",
    "OutcomeDistribution",
    "label_sort_key",
    "label_token_count",
    "quantum_distribution",
    "classical_distribution",
    "coarse_grain",
    "marginal",
    "support_check",
    "token_sum_predicate",
    "parity_predicate",
    "binomial_probs",
]


def label_sort_key(label: str):
    """Natural sort key: ``"0" < "1_0" < "1_1" < "2" < "10"``."""
    parts = re.split(r"(\d+)", str(label))
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts)


def label_token_count(label: str) -> int:
    """Integer read of an outcome label; ``"1_0"`` and ``"1_1"`` both read 1."""
    return int(str(label).split("_")[0])


@dataclass(frozen=True)
class RingLayout:
    """Number of parties and per-source local dimensions ``(dim R_k, dim L_{k+1})``."""

    n: int
    source_dims: tuple[tuple[int, int], ...]

    def __post_init__(self):
        sd = tuple((int(a), int(b)) for a, b in self.source_dims)
        object.__setattr__(self, "source_dims", sd)
        if self.n < 3:
            raise ValidationError("invalid ring layout", [f"n = {self.n} < 3"])
        if len(sd) != self.n:
            raise ValidationError("invalid ring layout", [f"{len(sd)} sources for {self.n} parties"])
        bad = [f"source {k} dims {d}" for k, d in enumerate(sd) if min(d) < 1]
        if bad:
            raise ValidationError("invalid ring layout", bad)

    def left_dim(self, k: int) -> int:
        return self.source_dims[(k - 1) % self.n][1]

    def right_dim(self, k: int) -> int:
        return self.source_dims[k % self.n][0]

    def party_dims(self, k: int) -> tuple[int, int]:
        return self.left_dim(k), self.right_dim(k)

    def party_dim(self, k: int) -> int:
        return self.left_dim(k) * self.right_dim(k)

    def source_major_dims(self) -> tuple[int, ...]:
        return tuple(d for pair in self.source_dims for d in pair)

    def left_axis(self, k: int) -> int:
        """Source-major axis of ``L_k``."""
        return (2 * k - 1) % (2 * self.n)

    def right_axis(self, k: int) -> int:
        """Source-major axis of ``R_k``."""
        return 2 * (k % self.n)

    def party_major_order(self) -> tuple[int, ...]:
        """Source-major axes listed in party-major order ``L_0 R_0 L_1 R_1 ...``."""
        return tuple(a for k in range(self.n) for a in (self.left_axis(k), self.right_axis(k)))

    def party_major_dims(self) -> tuple[int, ...]:
        smd = self.source_major_dims()
        return tuple(smd[a] for a in self.party_major_order())


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact probability table over all outcome tuples of the product of label sets."""

    party_labels: tuple[tuple[str, ...], ...]
    probabilities: Mapping[tuple[str, ...], float]

    def __post_init__(self):
        labels = tuple(tuple(str(x) for x in ls) for ls in self.party_labels)
        for k, ls in enumerate(labels):
            if len(set(ls)) != len(ls):
                raise ValidationError("invalid distribution", [f"party {k} has repeated labels"])
        table = {}
        failures = []
        for key, p in self.probabilities.items():
            key = tuple(str(x) for x in key)
            if len(key) != len(labels) or any(l not in ls for l, ls in zip(key, labels)):
                failures.append(f"outcome {key} not in label sets")
                continue
            p = float(p)
            if p < -PROB_CLAMP:
                failures.append(f"P{key} = {p!r} < 0")
            table[key] = 0.0 if abs(p) < PROB_CLAMP else p
        full = {o: table.get(o, 0.0) for o in itertools.product(*labels)}
        total = sum(full.values())
        if abs(total - 1.0) > TOTAL_TOL:
            failures.append(f"total probability {total!r} != 1")
        if failures:
            raise ValidationError("invalid distribution", failures)
        object.__setattr__(self, "party_labels", labels)
        object.__setattr__(self, "probabilities", full)

    @property
    def n_parties(self) -> int:
        return len(self.party_labels)

    def __getitem__(self, outcome) -> float:
        return self.probabilities[tuple(str(x) for x in outcome)]

    def get(self, outcome, default: float = 0.0) -> float:
        return self.probabilities.get(tuple(str(x) for x in outcome), default)

    def items(self):
        """``(outcome, p)`` pairs sorted by outcome under :func:`label_sort_key`."""
        return sorted(self.probabilities.items(), key=lambda kv: tuple(map(label_sort_key, kv[0])))

    def total(self) -> float:
        return float(sum(self.probabilities.values()))

    def support(self, tol: float = PROB_CLAMP) -> list[tuple[str, ...]]:
        return [o for o, p in self.items() if p > tol]

    def max_abs_diff(self, other: "OutcomeDistribution") -> float:
        keys = set(self.probabilities) | set(other.probabilities)
        return max(abs(self.get(k) - other.get(k)) for k in keys)


def _as_label_map(measurements) -> dict[str, np.ndarray]:
    if isinstance(measurements, Mapping):
        pairs = measurements.items()
    else:
        pairs = measurements
    return {str(label): as_matrix(op) for label, op in pairs}


@dataclass(frozen=True)
class QuantumRingStrategy:
    """Pure source states and per-party measurement operators on a ring.

    ``party_measurements[k]`` maps outcome labels to operators on
    ``L_k (x) R_k``.  With ``projective=True`` the operators must also be
    mutually orthogonal projectors.
    """

    layout: RingLayout
    source_states: tuple[StateVector, ...]
    party_measurements: tuple[dict, ...]
    projective: bool = False
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "source_states", tuple(self.source_states))
        object.__setattr__(
            self, "party_measurements", tuple(_as_label_map(m) for m in self.party_measurements)
        )
        self.validate()

    @property
    def n(self) -> int:
        return self.layout.n

    @property
    def outcome_labels(self) -> tuple[tuple[str, ...], ...]:
        return tuple(tuple(m) for m in self.party_measurements)

    def validate(self, tol: float = POVM_TOL) -> None:
        """Raise :class:`ValidationError` listing every failed invariant."""
        lay = self.layout
        failures = []
        if len(self.source_states) != lay.n:
            failures.append(f"{len(self.source_states)} source states for {lay.n} sources")
        if len(self.party_measurements) != lay.n:
            failures.append(f"{len(self.party_measurements)} measurements for {lay.n} parties")
        if failures:
            raise ValidationError("invalid quantum strategy", failures)
        for k, st in enumerate(self.source_states):
            if st.dims != lay.source_dims[k]:
                failures.append(f"source {k} state dims {st.dims} != layout {lay.source_dims[k]}")
        for k, meas in enumerate(self.party_measurements):
            d = lay.party_dim(k)
            if not meas:
                failures.append(f"party {k} has no outcomes")
                continue
            total = np.zeros((d, d), dtype=complex)
            for label, op in meas.items():
                if op.shape != (d, d):
                    failures.append(f"party {k} operator {label!r} shape {op.shape} != ({d}, {d})")
                    continue
                if np.max(np.abs(op - op.conj().T)) > tol:
                    failures.append(f"party {k} operator {label!r} not Hermitian")
                elif np.linalg.eigvalsh((op + op.conj().T) / 2).min() < -tol:
                    failures.append(f"party {k} operator {label!r} not PSD")
                total = total + op
            if total.shape == (d, d) and np.max(np.abs(total - np.eye(d))) > tol:
                failures.append(f"party {k} operators do not sum to identity")
            if self.projective:
                ops = list(meas.items())
                for i, (la, a) in enumerate(ops):
                    if a.shape == (d, d) and np.max(np.abs(a @ a - a)) > tol:
                        failures.append(f"party {k} operator {la!r} not idempotent")
                    for lb, b in ops[i + 1:]:
                        if a.shape == b.shape == (d, d) and np.max(np.abs(a @ b)) > tol:
                            failures.append(f"party {k} operators {la!r}, {lb!r} not orthogonal")
        if failures:
            raise ValidationError("invalid quantum strategy", failures)

    def global_state(self) -> StateVector:
        """``|Psi>`` in source-major order."""
        amps = np.ones(1, dtype=complex)
        for st in self.source_states:
            amps = np.kron(amps, st.amplitudes)
        return StateVector(self.layout.source_major_dims(), amps)

    def party_major_tensor(self, state=None) -> np.ndarray:
        """Amplitudes regrouped to one axis per party (``L_k R_k`` merged)."""
        lay = self.layout
        amps = self.global_state().amplitudes if state is None else np.asarray(state, dtype=complex)
        t = amps.reshape(lay.source_major_dims())
        t = np.transpose(t, lay.party_major_order())
        return t.reshape([lay.party_dim(k) for k in range(lay.n)])


def quantum_distribution(s: QuantumRingStrategy) -> OutcomeDistribution:
    """Exact ``P(a_1..a_n) = <Psi| E^{a_1} (x) ... (x) E^{a_n} |Psi>``."""
    psi = s.party_major_tensor()
    n = s.n
    x = psi
    for k in range(n):
        ops = np.stack(list(s.party_measurements[k].values()))
        x = np.tensordot(ops, x, axes=([2], [2 * k]))
        x = np.moveaxis(x, [0, 1], [k, 2 * k + 1])
    sys_axes = tuple(range(n, 2 * n))
    probs = np.tensordot(x, psi.conj(), axes=(sys_axes, tuple(range(n)))).real
    labels = s.outcome_labels
    table = {
        tuple(labels[k][i] for k, i in enumerate(idx)): float(probs[idx])
        for idx in itertools.product(*(range(len(ls)) for ls in labels))
    }
    return OutcomeDistribution(labels, table)


def binomial_probs(n_tokens: int, q: float) -> tuple[float, ...]:
    """``P(t)`` when each of ``n_tokens`` goes to ``R_k`` independently with prob ``q``."""
    return tuple(comb(n_tokens, t) * q**t * (1 - q) ** (n_tokens - t) for t in range(n_tokens + 1))


@dataclass(frozen=True)
class TokenStrategy:
    """Classical (parity) token-counting strategy.

    ``send_right_probs[k][t]`` is the probability that source ``k`` sends
    ``t`` of its ``tokens[k]`` tokens to ``R_k`` (party ``k``) and the
    remaining ``tokens[k] - t`` to ``L_{k+1}`` (party ``k+1``).
    """

    n: int
    tokens: tuple[int, ...]
    send_right_probs: tuple[tuple[float, ...], ...]
    mode: str = "TC"

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(int(t) for t in self.tokens))
        object.__setattr__(
            self, "send_right_probs", tuple(tuple(float(p) for p in ps) for ps in self.send_right_probs)
        )
        failures = []
        if self.n < 3:
            failures.append(f"n = {self.n} < 3")
        if self.mode not in ("TC", "PTC"):
            failures.append(f"mode {self.mode!r} not in ('TC', 'PTC')")
        if len(self.tokens) != self.n or len(self.send_right_probs) != self.n:
            failures.append("need one token count and one distribution per source")
        else:
            for k, (nk, ps) in enumerate(zip(self.tokens, self.send_right_probs)):
                if nk < 0:
                    failures.append(f"source {k} has {nk} tokens")
                if len(ps) != nk + 1:
                    failures.append(f"source {k}: {len(ps)} probabilities for {nk} tokens")
                if any(p < 0 for p in ps):
                    failures.append(f"source {k} has negative probabilities")
                if abs(sum(ps) - 1.0) > 1e-12:
                    failures.append(f"source {k} probabilities sum to {sum(ps)!r}")
            if self.mode == "PTC" and any(t != 1 for t in self.tokens):
                failures.append("PTC mode requires exactly one token per source")
        if failures:
            raise ValidationError("invalid token strategy", failures)

    @property
    def total_tokens(self) -> int:
        return sum(self.tokens)

    def party_labels(self) -> tuple[tuple[str, ...], ...]:
        if self.mode == "PTC":
            return (("0", "1"),) * self.n
        return tuple(
            tuple(str(a) for a in range(self.tokens[k - 1] + self.tokens[k] + 1)) for k in range(self.n)
        )


def classical_distribution(t: TokenStrategy) -> OutcomeDistribution:
    """Exact enumeration over all token splits."""
    n = t.n
    table: dict[tuple[str, ...], float] = {}
    for split in itertools.product(*(range(nk + 1) for nk in t.tokens)):
        w = prod(t.send_right_probs[k][split[k]] for k in range(n))
        if w == 0.0:
            continue
        counts = [(t.tokens[k - 1] - split[k - 1]) + split[k] for k in range(n)]
        if t.mode == "PTC":
            counts = [c % 2 for c in counts]
        key = tuple(str(c) for c in counts)
        table[key] = table.get(key, 0.0) + w
    return OutcomeDistribution(t.party_labels(), table)


def coarse_grain(d: OutcomeDistribution, maps: Sequence[Mapping[str, str] | None]) -> OutcomeDistribution:
    """Relabel each party's outcomes through ``maps[k]`` and sum preimages.

    ``None`` in ``maps`` keeps that party's labels unchanged.
    """
    if len(maps) != d.n_parties:
        raise ValidationError("invalid coarse graining", [f"{len(maps)} maps for {d.n_parties} parties"])
    failures = []
    full_maps = []
    for k, (m, labels) in enumerate(zip(maps, d.party_labels)):
        m = {l: l for l in labels} if m is None else {str(a): str(b) for a, b in m.items()}
        missing = [l for l in labels if l not in m]
        if missing:
            failures.append(f"party {k} labels {missing} unmapped")
        full_maps.append(m)
    if failures:
        raise ValidationError("invalid coarse graining", failures)
    new_labels = tuple(
        tuple(sorted({m[l] for l in labels}, key=label_sort_key)) for m, labels in zip(full_maps, d.party_labels)
    )
    table: dict[tuple[str, ...], float] = {}
    for o, p in d.probabilities.items():
        key = tuple(m[l] for m, l in zip(full_maps, o))
        table[key] = table.get(key, 0.0) + p
    return OutcomeDistribution(new_labels, table)


def marginal(d: OutcomeDistribution, party: int) -> OutcomeDistribution:
    if not 0 <= party < d.n_parties:
        raise IndexError(f"party {party} out of range for {d.n_parties} parties")
    table: dict[tuple[str, ...], float] = {}
    for o, p in d.probabilities.items():
        table[(o[party],)] = table.get((o[party],), 0.0) + p
    return OutcomeDistribution((d.party_labels[party],), table)


def support_check(d: OutcomeDistribution, predicate: Callable[[tuple], bool], tol: float = PROB_CLAMP) -> bool:
    """True iff every outcome with probability above ``tol`` satisfies ``predicate``."""
    return all(predicate(o) for o, p in d.probabilities.items() if p > tol)


def token_sum_predicate(total: int) -> Callable[[tuple], bool]:
    return lambda o: sum(label_token_count(l) for l in o) == total


def parity_predicate(parity: int = 1) -> Callable[[tuple], bool]:
    return lambda o: sum(label_token_count(l) for l in o) % 2 == parity


def check_layout_dims(layout: RingLayout, states: Sequence[StateVector]) -> None:
    for k, st in enumerate(states):
        if st.dims != layout.source_dims[k]:
            raise DimensionError(f"source {k} dims {st.dims} != {layout.source_dims[k]}")
