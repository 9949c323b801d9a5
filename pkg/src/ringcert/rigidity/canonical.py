"""Reference quantum strategies that reproduce (parity) token counting.

Every system is a token register tensored with a junk space.  Source ``k``
prepares ``sum_t sqrt(p_k(t)) |t>_R |N_k - t>_L |j_t>``, and party ``k``
projects onto the total (or parity of) tokens found in its two registers.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import DimensionError, ValidationError
from ..ring_model import QuantumRingStrategy, RingLayout, TokenStrategy
from ..tensor_core import StateVector


def _junk_dims(junk: Sequence[StateVector] | None, count: int) -> tuple[int, int]:
    if junk is None:
        return 1, 1
    if len(junk) != count:
        raise DimensionError(f"{len(junk)} junk states for {count} token splits")
    dims = {tuple(j.dims) for j in junk}
    if len(dims) != 1 or len(next(iter(dims))) != 2:
        raise DimensionError(f"junk states must share bipartite dims, got {sorted(dims)}")
    return next(iter(dims))


def _source_state(n_tok: int, amps: Sequence[float], junk) -> StateVector:
    """Register state with amplitude ``amps[t]`` on ``|t, j_t>_R |n_tok - t, j_t>_L``."""
    jr, jl = _junk_dims(junk, len(amps))
    d = n_tok + 1
    t4 = np.zeros((d, jr, d, jl), dtype=complex)
    for t, a in enumerate(amps):
        jt = np.ones((1, 1)) if junk is None else junk[t].tensor()
        t4[t, :, n_tok - t, :] += a * jt
    return StateVector((d * jr, d * jl), t4.reshape(-1))


def _count_projectors(dl_tok: int, jl: int, dr_tok: int, jr: int, parity: bool) -> dict[str, np.ndarray]:
    """Projectors onto ``j + l`` (or its parity) on ``(L tokens, L junk, R tokens, R junk)``."""
    out: dict[str, np.ndarray] = {}
    el, er = np.eye(dl_tok), np.eye(dr_tok)
    for j in range(dl_tok):
        for l in range(dr_tok):
            lab = str((j + l) % 2 if parity else j + l)
            full = np.kron(np.kron(np.outer(el[j], el[j]), np.eye(jl)), np.kron(np.outer(er[l], er[l]), np.eye(jr)))
            out[lab] = out.get(lab, 0) + full
    return {k: out[k] for k in sorted(out, key=int)}


def canonical_tc_strategy(tokens: Sequence[int], probs: Sequence[Sequence[float]], junk_states=None) -> QuantumRingStrategy:
    """Quantum strategy reproducing token counting with distributions ``probs``.

    ``probs[k][t]`` is the probability that ``t`` of the ``tokens[k]``
    tokens go to ``R_k``.  ``junk_states[k]``, if given, lists one bipartite
    junk vector (on ``J_R (x) J_L``) per value of ``t``.
    """
    n = len(tokens)
    if len(probs) != n:
        raise DimensionError(f"{len(probs)} distributions for {n} sources")
    # validates probabilities and token counts
    TokenStrategy(n, tuple(tokens), tuple(tuple(p) for p in probs), "TC")
    junk = [None] * n if junk_states is None else list(junk_states)
    states = [
        _source_state(int(tokens[k]), [np.sqrt(p) for p in probs[k]], junk[k]) for k in range(n)
    ]
    layout = RingLayout(n, tuple(s.dims for s in states))
    meas = []
    for k in range(n):
        jr = _junk_dims(junk[k], tokens[k] + 1)[0]
        jl = _junk_dims(junk[k - 1], tokens[k - 1] + 1)[1]
        meas.append(_count_projectors(tokens[k - 1] + 1, jl, tokens[k] + 1, jr, parity=False))
    meta = {"kind": "canonical_tc", "tokens": [int(t) for t in tokens]}
    return QuantumRingStrategy(layout, tuple(states), tuple(meas), projective=True, metadata=meta)


def canonical_ptc_strategy(p: Sequence[float], junk_states=None) -> QuantumRingStrategy:
    """One token per source, sent to ``L_{k+1}`` with probability ``p[k]``; parties report parity.

    ``junk_states[k] = (j_c, j_a)`` are the junk vectors attached to the
    token going to ``L_{k+1}`` and to ``R_k`` respectively.  Sources with
    ``p = 1/2`` are listed under ``metadata["degenerate_sources"]``.
    """
    n = len(p)
    bad = [f"p[{k}] = {x}" for k, x in enumerate(p) if not 0.0 <= x <= 1.0]
    if n < 3:
        bad.append(f"n = {n} < 3")
    if bad:
        raise ValidationError("invalid parity token strategy", bad)
    junk = [None] * n if junk_states is None else [list(j) for j in junk_states]
    states = []
    for k in range(n):
        # amplitude index t = tokens sent to R_k: t=0 is the j_c branch
        amps = [np.sqrt(p[k]), np.sqrt(1.0 - p[k])]
        states.append(_source_state(1, amps, junk[k]))
    layout = RingLayout(n, tuple(s.dims for s in states))
    meas = []
    for k in range(n):
        jr = _junk_dims(junk[k], 2)[0]
        jl = _junk_dims(junk[k - 1], 2)[1]
        meas.append(_count_projectors(2, jl, 2, jr, parity=True))
    meta = {
        "kind": "canonical_ptc",
        "p": [float(x) for x in p],
        "degenerate_sources": [k for k, x in enumerate(p) if x == 0.5],
    }
    return QuantumRingStrategy(layout, tuple(states), tuple(meas), projective=True, metadata=meta)


def ptc_token_strategy(p: Sequence[float]) -> TokenStrategy:
    n = len(p)
    return TokenStrategy(n, (1,) * n, tuple((float(x), 1.0 - float(x)) for x in p), "PTC")


def locally_rotated(s: QuantumRingStrategy, seed=None) -> QuantumRingStrategy:
    """Same correlations in a seeded random local basis on every system."""
    from ..tensor_core import random_unitary

    rng = np.random.default_rng(seed)
    n = s.n
    vr = [random_unitary(st.dims[0], rng) for st in s.source_states]
    vl = [random_unitary(st.dims[1], rng) for st in s.source_states]
    states = tuple(
        StateVector(st.dims, np.kron(vr[k], vl[k]) @ st.amplitudes) for k, st in enumerate(s.source_states)
    )
    meas = []
    for k in range(n):
        w = np.kron(vl[(k - 1) % n], vr[k])
        meas.append({l: w @ e @ w.conj().T for l, e in s.party_measurements[k].items()})
    meta = dict(s.metadata, locally_rotated=True)
    return QuantumRingStrategy(s.layout, states, tuple(meas), s.projective, meta)
