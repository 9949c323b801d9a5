"""Recovering token counts from a classical message-passing model.

A classical ring model is given by, for every source ``k``, a joint
distribution ``joint[k][i, j]`` of the message ``i`` sent to ``R_k`` and
``j`` sent to ``L_{k+1}``, and for every party a response table
``responses[k][j, l]`` giving the output on left message ``j`` and right
message ``l``.  A token assignment maps every message to a token count so
that

(i)   messages of one source always carry ``N_k`` tokens in total,
(ii)  each party outputs the sum of the tokens it receives,
(iii) the number of tokens source ``k`` sends right is distributed as ``p_k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import CapacityError, DimensionError
from ..ring_model import TokenStrategy

MAX_ALPHABET = 5
MAX_TOKENS = 3
SUPPORT_TOL = 1e-12
PROB_TOL = 1e-9


@dataclass(frozen=True)
class TokenFunctions:
    """``right[k][i]``: tokens in message ``i`` on ``R_k``; ``left[k][j]``: tokens in message ``j`` on ``L_k``."""

    right: tuple[tuple[int, ...], ...]
    left: tuple[tuple[int, ...], ...]


def _as_arrays(joint, responses):
    joint = [np.asarray(p, dtype=float) for p in joint]
    responses = [np.asarray(a) for a in responses]
    return joint, responses


def _check_inputs(joint, responses, tokens, probs):
    n = len(joint)
    if len(responses) != n or len(tokens) != n:
        raise DimensionError("joint, responses and tokens need one entry per source/party")
    if probs is not None and len(probs) != n:
        raise DimensionError("need one token distribution per source")
    for k in range(n):
        if max(joint[k].shape) > MAX_ALPHABET:
            raise CapacityError(f"source {k} alphabet {joint[k].shape} exceeds {MAX_ALPHABET}")
        if tokens[k] > MAX_TOKENS:
            raise CapacityError(f"source {k} has {tokens[k]} tokens (limit {MAX_TOKENS})")
        want = (joint[(k - 1) % n].shape[1], joint[k].shape[0])
        if responses[k].shape != want:
            raise DimensionError(f"party {k} response table {responses[k].shape} != {want}")
        if probs is not None and len(probs[k]) != tokens[k] + 1:
            raise DimensionError(f"source {k}: {len(probs[k])} probabilities for {tokens[k]} tokens")


def _source_candidates(p: np.ndarray, nk: int, pk) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All ``(T^R, T^L)`` pairs for one source satisfying (i) and (iii), in lexicographic order."""
    a_r, a_l = p.shape
    supp = p > SUPPORT_TOL
    l_used = supp.any(axis=0)
    out = []
    for tr in itertools.product(range(nk + 1), repeat=a_r):
        forced: dict[int, int] = {}
        ok = True
        for i, j in zip(*np.nonzero(supp)):
            v = nk - tr[i]
            if forced.setdefault(int(j), v) != v:
                ok = False
                break
        if not ok:
            continue
        if pk is not None:
            induced = np.zeros(nk + 1)
            for i in range(a_r):
                induced[tr[i]] += p[i].sum()
            if np.max(np.abs(induced - np.asarray(pk))) > PROB_TOL:
                continue
        free = [j for j in range(a_l) if not l_used[j]]
        for fill in itertools.product(range(nk + 1), repeat=len(free)):
            tl = [0] * a_l
            for j, v in forced.items():
                tl[j] = v
            for j, v in zip(free, fill):
                tl[j] = v
            out.append((tuple(tr), tuple(tl)))
    return out


def _party_ok(resp: np.ndarray, tl, tr, l_used, r_used) -> bool:
    for j in np.nonzero(l_used)[0]:
        for l in np.nonzero(r_used)[0]:
            if resp[j, l] != tl[j] + tr[l]:
                return False
    return True


def find_token_functions(
    joint: Sequence,
    responses: Sequence,
    tokens: Sequence[int],
    probs: Sequence | None = None,
) -> TokenFunctions | None:
    """Lexicographically first token assignment, or ``None`` if there is none.

    The search runs source by source; candidates are ordered
    lexicographically by ``(T_k^R, T_{k+1}^L)``, so the first complete
    assignment found is the lexicographically smallest one.  ``probs`` are
    the target token distributions; without them (iii) is not imposed.
    Alphabets above 5 or more than 3 tokens per source raise
    :class:`CapacityError`.
    """
    joint, responses = _as_arrays(joint, responses)
    tokens = [int(t) for t in tokens]
    _check_inputs(joint, responses, tokens, probs)
    n = len(joint)
    cands = [_source_candidates(joint[k], tokens[k], None if probs is None else probs[k]) for k in range(n)]
    # message j on L_k is possible iff source k-1 emits it
    l_used = [joint[(k - 1) % n].sum(axis=0) > SUPPORT_TOL for k in range(n)]
    r_used = [joint[k].sum(axis=1) > SUPPORT_TOL for k in range(n)]

    chosen: list = [None] * n

    def dfs(k: int) -> bool:
        if k == n:
            tr0 = chosen[0][0]
            tl0 = chosen[n - 1][1]
            return _party_ok(responses[0], tl0, tr0, l_used[0], r_used[0])
        for tr, tl_next in cands[k]:
            if k > 0 and not _party_ok(responses[k], chosen[k - 1][1], tr, l_used[k], r_used[k]):
                continue
            chosen[k] = (tr, tl_next)
            if dfs(k + 1):
                return True
        chosen[k] = None
        return False

    if not dfs(0):
        return None
    right = tuple(chosen[k][0] for k in range(n))
    left = tuple(chosen[(k - 1) % n][1] for k in range(n))
    return TokenFunctions(right, left)


def check_token_functions(tf: TokenFunctions, joint, responses, tokens, probs=None) -> dict[str, bool]:
    """Evaluate the three properties directly on the supports."""
    joint, responses = _as_arrays(joint, responses)
    n = len(joint)
    total = all(
        tf.right[k][i] + tf.left[(k + 1) % n][j] == tokens[k]
        for k in range(n)
        for i, j in zip(*np.nonzero(joint[k] > SUPPORT_TOL))
    )
    additive = all(
        responses[k][j, l] == tf.left[k][j] + tf.right[k][l]
        for k in range(n)
        for j in range(responses[k].shape[0])
        for l in range(responses[k].shape[1])
        if joint[(k - 1) % n][:, j].sum() > SUPPORT_TOL and joint[k][l].sum() > SUPPORT_TOL
    )
    out = {"conservation": bool(total), "additivity": bool(additive)}
    if probs is not None:
        dist_ok = True
        for k in range(n):
            induced = np.zeros(tokens[k] + 1)
            for i, j in zip(*np.nonzero(joint[k] > SUPPORT_TOL)):
                induced[tf.right[k][i]] += joint[k][i, j]
            dist_ok &= bool(np.max(np.abs(induced - np.asarray(probs[k]))) <= PROB_TOL)
        out["distribution"] = dist_ok
    return out


def tc_message_model(t: TokenStrategy):
    """Message model where every message is the literal token count.

    Returns ``(joint, responses)``; ``joint[k][t, N_k - t] = p_k(t)`` and
    ``responses[k][j, l] = j + l``.
    """
    n = t.n
    joint = []
    for k in range(n):
        nk = t.tokens[k]
        p = np.zeros((nk + 1, nk + 1))
        for tt, w in enumerate(t.send_right_probs[k]):
            p[tt, nk - tt] = w
        joint.append(p)
    responses = [
        np.add.outer(np.arange(t.tokens[(k - 1) % n] + 1), np.arange(t.tokens[k] + 1)) for k in range(n)
    ]
    return joint, responses


def relabel_messages(joint, responses, right_perms, left_perms):
    """Rename messages: ``right_perms[k][i]`` is the new name of message ``i`` on ``R_k``.

    ``left_perms[k]`` renames the messages arriving on ``L_k``.  The
    returned model is the same physical strategy with permuted alphabets.
    """
    joint, responses = _as_arrays(joint, responses)
    n = len(joint)
    new_joint = []
    for k in range(n):
        p = np.zeros_like(joint[k])
        rp, lp = right_perms[k], left_perms[(k + 1) % n]
        for i in range(p.shape[0]):
            for j in range(p.shape[1]):
                p[rp[i], lp[j]] = joint[k][i, j]
        new_joint.append(p)
    new_resp = []
    for k in range(n):
        a = np.zeros_like(responses[k])
        for j in range(a.shape[0]):
            for l in range(a.shape[1]):
                a[left_perms[k][j], right_perms[k][l]] = responses[k][j, l]
        new_resp.append(a)
    return new_joint, new_resp
