"""The four-outcome triangle family built from maximally entangled qubit pairs.

Parties sit on a triangle: party ``k`` holds ``L_k`` (from source ``k-1``) and
``R_k`` (from source ``k``).  Every system is a token qubit, optionally
tensored with a junk register.  A party's outcomes are ``"0"`` and ``"2"``
(no token / two tokens) and two refinements ``"1_0"``, ``"1_1"`` of the
single-token event, read out in the entangled basis

    |1bar_i> = u_i |01> + v_i |10>      (order: L token, R token)

with ``(u_0, v_0) = (cos t, sin t)`` and ``(u_1, v_1) = (sin t, -cos t)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, DomainError, ValidationError
from .ring_model import OutcomeDistribution, QuantumRingStrategy, RingLayout, coarse_grain
from .rigidity.canonical import _source_state
from .tensor_core import StateVector, apply_local, random_state

LABELS = ("0", "1_0", "1_1", "2")
COARSE_MAP = {"0": "0", "1_0": "1", "1_1": "1", "2": "2"}
THETA_MAX_PARAM = np.pi / 4
COHERENCE_TOL = 1e-10


@dataclass(frozen=True)
class Rgb4Params:
    theta: float

    def __post_init__(self):
        t = float(self.theta)
        if not np.isfinite(t) or t < 0.0 or t > THETA_MAX_PARAM:
            raise DomainError(f"theta = {self.theta!r} outside [0, pi/4]")
        object.__setattr__(self, "theta", t)

    @property
    def u(self) -> np.ndarray:
        return np.array([np.cos(self.theta), np.sin(self.theta)])

    @property
    def v(self) -> np.ndarray:
        return np.array([np.sin(self.theta), -np.cos(self.theta)])

    def split_vector(self, i: int) -> np.ndarray:
        """``|1bar_i>`` in the two-qubit token basis ``|L R>``."""
        out = np.zeros(4)
        out[0b01] = self.u[i]
        out[0b10] = self.v[i]
        return out


def _rotations(o: tuple) -> list[tuple]:
    return [o, (o[2], o[0], o[1]), (o[1], o[2], o[0])]


def rgb4_closed_form(theta: float) -> OutcomeDistribution:
    """Exact 64-entry table; every entry not listed below is exactly zero.

    ``P(1_i,1_j,1_k) = (u_i u_j u_k + v_i v_j v_k)^2 / 8`` and, with their
    cyclic shifts, ``P(1_i,0,2) = u_i^2 / 8`` and ``P(1_i,2,0) = v_i^2 / 8``.
    """
    prm = Rgb4Params(theta)
    u, v = prm.u, prm.v
    table = {o: 0.0 for o in itertools.product(LABELS, repeat=3)}
    for i, j, k in itertools.product(range(2), repeat=3):
        table[(f"1_{i}", f"1_{j}", f"1_{k}")] = (u[i] * u[j] * u[k] + v[i] * v[j] * v[k]) ** 2 / 8
    for i in range(2):
        for o in _rotations((f"1_{i}", "0", "2")):
            table[o] = u[i] ** 2 / 8
        for o in _rotations((f"1_{i}", "2", "0")):
            table[o] = v[i] ** 2 / 8
    return OutcomeDistribution((LABELS,) * 3, table)


@dataclass(frozen=True)
class CanonicalRgb4Strategy:
    """Quantum triangle strategy in token-register plus junk form.

    ``junk[k] = (j_c, j_a)``: junk vectors of source ``k`` on ``J_R (x) J_L``
    for the token going to ``L_{k+1}`` (clockwise) and to ``R_k``
    (anticlockwise).  Each system is ordered ``(token qubit, junk)``.
    """

    params: Rgb4Params
    strategy: QuantumRingStrategy
    junk: tuple
    junk_dims: tuple
    custom_split: tuple[bool, ...] = field(default=(False, False, False))

    @property
    def n(self) -> int:
        return 3

    def projectors(self, k: int) -> dict:
        return self.strategy.party_measurements[k]


def _default_junk() -> tuple:
    one = StateVector((1, 1), np.ones(1))
    return (one, one)


def _party_op(tok_op: np.ndarray, jl: int, jr: int) -> np.ndarray:
    """Lift a token-pair operator (optionally with junk) to ``(tokL, JL, tokR, JR)`` ordering.

    ``tok_op`` acts on ``(tokL, tokR)`` or on ``(tokL, tokR, JL, JR)``.
    """
    d = 4 * jl * jr
    if tok_op.shape == (4, 4):
        tok_op = np.kron(tok_op, np.eye(jl * jr))
    if tok_op.shape != (d, d):
        raise ValidationError("bad split projector", [f"shape {tok_op.shape} != ({d}, {d})"])
    t = tok_op.reshape(2, 2, jl, jr, 2, 2, jl, jr)
    return t.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(d, d)


def rgb4_strategy(theta: float, junk_states=None, split_projectors=None) -> CanonicalRgb4Strategy:
    """Canonical strategy; with no extra arguments this is the ideal two-qubit model.

    Parameters
    ----------
    theta : float
        Measurement angle in ``[0, pi/4]``.
    junk_states : sequence of (StateVector, StateVector), optional
        ``(j_c, j_a)`` per source, each on ``J_R (x) J_L``.
    split_projectors : sequence of array or None, optional
        Per party, a projector for outcome ``1_0`` on
        ``(tokL, tokR, JL, JR)``; it must live inside the single-token
        subspace.  ``1_1`` gets the complement within that subspace.
    """
    prm = Rgb4Params(theta)
    junk = tuple(_default_junk() for _ in range(3)) if junk_states is None else tuple(tuple(j) for j in junk_states)
    if len(junk) != 3:
        raise ValidationError("invalid junk", [f"{len(junk)} junk pairs for 3 sources"])
    dims = []
    for k, (jc, ja) in enumerate(junk):
        if jc.dims != ja.dims or len(jc.dims) != 2:
            raise ValidationError("invalid junk", [f"source {k}: dims {jc.dims} vs {ja.dims}"])
        dims.append(tuple(jc.dims))
    amp = 1 / np.sqrt(2)
    # t = tokens sent to R_k: t=0 is the clockwise branch
    states = [_source_state(1, [amp, amp], [jc, ja]) for jc, ja in junk]
    layout = RingLayout(3, tuple(s.dims for s in states))

    one_tok = np.diag([0.0, 1.0, 1.0, 0.0])
    splits = [None] * 3 if split_projectors is None else list(split_projectors)
    meas = []
    custom = []
    for k in range(3):
        jr, jl = dims[k][0], dims[k - 1][1]
        p0 = _party_op(np.diag([1.0, 0, 0, 0]), jl, jr)
        p2 = _party_op(np.diag([0, 0, 0, 1.0]), jl, jr)
        single = _party_op(one_tok, jl, jr)
        if splits[k] is None:
            a = _party_op(np.outer(prm.split_vector(0), prm.split_vector(0)), jl, jr)
            b = _party_op(np.outer(prm.split_vector(1), prm.split_vector(1)), jl, jr)
            custom.append(False)
        else:
            a = _party_op(np.asarray(splits[k], dtype=complex), jl, jr)
            if np.max(np.abs(single @ a @ single - a)) > 1e-10:
                raise ValidationError("invalid split projector", [f"party {k}: leaves the single-token subspace"])
            b = single - a
            custom.append(True)
        meas.append({"0": p0, "1_0": a, "1_1": b, "2": p2})
    strat = QuantumRingStrategy(
        layout, tuple(states), tuple(meas), projective=True,
        metadata={"kind": "rgb4", "theta": prm.theta},
    )
    return CanonicalRgb4Strategy(prm, strat, junk, tuple(dims), tuple(custom))


def random_junk(seed: int, dims: Sequence[tuple[int, int]] = ((2, 2),) * 3) -> tuple:
    """Seeded ``(j_c, j_a)`` pairs with the given ``(J_R, J_L)`` dims per source."""
    rng = np.random.default_rng(seed)
    return tuple(
        (random_state(d, rng), random_state(d, rng)) for d in dims
    )


def check_junk_identity(s: CanonicalRgb4Strategy, tol: float = 1e-12) -> bool:
    """True iff every party's projectors are ``token operator (x) identity on junk``."""
    for k in range(3):
        jr, jl = s.junk_dims[k][0], s.junk_dims[k - 1][1]
        for op in s.projectors(k).values():
            t = op.reshape(2, jl, 2, jr, 2, jl, 2, jr).transpose(0, 2, 4, 6, 1, 3, 5, 7)
            tok = t.reshape(16, (jl * jr) ** 2)
            # product with identity iff the junk part is proportional to vec(I)
            ident = np.eye(jl * jr).reshape(-1)
            coeff = tok @ ident.conj() / (jl * jr)
            if np.max(np.abs(tok - np.outer(coeff, ident))) > tol:
                return False
    return True


def _require_canonical(s) -> CanonicalRgb4Strategy:
    if not isinstance(s, CanonicalRgb4Strategy):
        raise ValidationError("expected a canonical RGB4 strategy", [f"got {type(s).__name__}"])
    return s


def global_token_states(s: CanonicalRgb4Strategy) -> tuple[StateVector, StateVector]:
    """All tokens clockwise (to ``L_{k+1}``) and all anticlockwise (to ``R_k``)."""
    s = _require_canonical(s)
    out = []
    for amps in ([1.0, 0.0], [0.0, 1.0]):
        v = np.ones(1, dtype=complex)
        for jc, ja in s.junk:
            v = np.kron(v, _source_state(1, amps, [jc, ja]).amplitudes)
        out.append(StateVector(s.strategy.layout.source_major_dims(), v))
    return out[0], out[1]


def _apply(s: CanonicalRgb4Strategy, state: StateVector, ops: dict) -> np.ndarray:
    """Apply ``{party: operator}`` and return a party-major tensor."""
    t = s.strategy.party_major_tensor(state.amplitudes)
    for k, op in ops.items():
        t = apply_local(t, op, [k])
    return t


def coherence_terms(s: CanonicalRgb4Strategy) -> dict[tuple[int, int, int], float]:
    """``(-1)^(i+j+k) 2 Re <Psi^c| Pi^(1_i) Pi^(1_j) Pi^(1_k) |Psi^a>`` for all eight ``(i, j, k)``."""
    s = _require_canonical(s)
    psi_c, psi_a = global_token_states(s)
    c = s.strategy.party_major_tensor(psi_c.amplitudes)
    out = {}
    for idx in itertools.product(range(2), repeat=3):
        ops = {k: s.projectors(k)[f"1_{i}"] for k, i in enumerate(idx)}
        val = np.vdot(c, _apply(s, psi_a, ops))
        out[idx] = float((-1) ** sum(idx) * 2 * val.real)
    return out


def coherence_r(s: CanonicalRgb4Strategy, tol: float = COHERENCE_TOL) -> float:
    """The common value of the eight sign-adjusted coherence terms.

    Raises :class:`ConsistencyError` listing all eight when they spread by
    more than ``tol``.
    """
    terms = coherence_terms(s)
    vals = np.array(list(terms.values()))
    if vals.max() - vals.min() > tol:
        listing = ", ".join(f"{k}: {v:.3e}" for k, v in terms.items())
        raise ConsistencyError(f"coherence terms disagree beyond {tol}: {listing}")
    return float(vals.mean())


def consistency_probabilities(s: CanonicalRgb4Strategy) -> dict:
    """Compare the strategy's outcome table with its token-state decomposition.

    Returns residuals for the three-single-token events (``triple``), for
    the events with one ``0`` and one ``2`` (``edge``), for the expansion
    ``8 P = q_c + q_a + (-1)^(i+j+k) r`` (``expansion``), and their max.
    """
    from .ring_model import quantum_distribution

    s = _require_canonical(s)
    dist = quantum_distribution(s.strategy)
    psi_c, psi_a = global_token_states(s)
    both = psi_c.amplitudes + psi_a.amplitudes
    terms = coherence_terms(s)
    r = float(np.mean(list(terms.values())))
    triple = edge = expansion = 0.0
    for idx in itertools.product(range(2), repeat=3):
        ops = {k: s.projectors(k)[f"1_{i}"] for k, i in enumerate(idx)}
        outcome = tuple(f"1_{i}" for i in idx)
        t_both = s.strategy.party_major_tensor(both)
        for k, op in ops.items():
            t_both = apply_local(t_both, op, [k])
        p = dist[outcome]
        triple = max(triple, abs(p - np.linalg.norm(t_both) ** 2 / 8))
        qc = np.linalg.norm(_apply(s, psi_c, ops)) ** 2
        qa = np.linalg.norm(_apply(s, psi_a, ops)) ** 2
        expansion = max(expansion, abs(8 * p - (qc + qa + (-1) ** sum(idx) * r)))
    for i in range(2):
        lab = f"1_{i}"
        for k in range(3):
            na = np.linalg.norm(_apply(s, psi_a, {k: s.projectors(k)[lab]})) ** 2 / 8
            nc = np.linalg.norm(_apply(s, psi_c, {k: s.projectors(k)[lab]})) ** 2 / 8
            # party k holds 1_i; anticlockwise at k means the next party has 0
            o_a = [None] * 3
            o_a[k], o_a[(k + 1) % 3], o_a[(k + 2) % 3] = lab, "0", "2"
            o_c = [None] * 3
            o_c[k], o_c[(k + 1) % 3], o_c[(k + 2) % 3] = lab, "2", "0"
            edge = max(edge, abs(dist[tuple(o_a)] - na), abs(dist[tuple(o_c)] - nc))
    return {
        "triple": float(triple),
        "edge": float(edge),
        "expansion": float(expansion),
        "max_residual": float(max(triple, edge, expansion)),
    }


def ideal_coherence(theta: float) -> float:
    """``sin^3(2 theta) / 4``."""
    return float(np.sin(2 * theta) ** 3 / 4)


def coarse_grained(dist: OutcomeDistribution) -> OutcomeDistribution:
    return coarse_grain(dist, [COARSE_MAP] * dist.n_parties)
