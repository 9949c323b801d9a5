"""Randomized harness for the ring operator-factorization statement.

On ``n`` systems arranged in a ring, products of nearest-neighbour
operators on the two alternating pairings are compared.  When every
operator is a product, the two sides agree up to scalars; when one
operator is perturbed into an entangled operator the equality breaks.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from ..errors import DomainError
from ..tensor_core import embed_operator, operator_schmidt

FACTOR_TOL = 1e-8


def _rand_op(rng: np.random.Generator, d: int) -> np.ndarray:
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2 * d)


def _rand_scalar(rng: np.random.Generator) -> complex:
    return complex(np.exp(rng.uniform(-0.5, 0.5) + 1j * rng.uniform(0, 2 * np.pi)))


def _projective_gap(found: np.ndarray, planted: np.ndarray) -> float:
    """``1 - |<A, B>| / (|A| |B|)``: zero iff equal up to a scalar."""
    ov = abs(np.vdot(found, planted))
    return float(max(0.0, 1.0 - ov / (np.linalg.norm(found) * np.linalg.norm(planted))))


def _pairings(n: int):
    """Site pairs on each side of the identity."""
    if n % 2 == 0:
        side_a = [(i, i + 1) for i in range(0, n, 2)]
        side_b = [(i, (i + 1) % n) for i in range(1, n, 2)]
    else:
        side_a = [(i, i + 1) for i in range(0, n - 1, 2)] + [(n - 1, 0)]
        side_b = [(i, i + 1) for i in range(1, n - 1, 2)]
    return side_a, side_b


def lemma_chain_harness(
    seed: int,
    n: int,
    dims=2,
    parity: str | None = None,
    adversarial: bool = False,
    tol: float = 1e-10,
) -> dict:
    """Plant factorized operators on an ``n``-ring and test the factorization claims.

    Parameters
    ----------
    seed : int
        Seed for ``numpy.random.default_rng``.
    n : int
        Ring length, at least 3.
    dims : int or sequence of int
        Local dimension of every site, or one per site.
    parity : {"even", "odd", None}
        Must agree with ``n`` when given.
    adversarial : bool
        Replace one operator by a non-product perturbation.
    tol : float
        Threshold on the relative equality residual.

    Returns
    -------
    dict
        ``equality_residual`` (relative Frobenius distance between the two
        sides), ``schmidt_ranks`` per operator, ``factor_residual`` (worst
        recovery error of the planted factors, product operators only), and
        ``passed``: for honest instances the equality holds and every factor is
        recovered; for adversarial ones the equality is rejected.
    """
    if n < 3:
        raise DomainError(f"ring length {n} < 3")
    kind = "even" if n % 2 == 0 else "odd"
    if parity is not None and parity != kind:
        raise DomainError(f"parity {parity!r} does not match n={n}")
    d = [int(dims)] * n if np.isscalar(dims) else [int(x) for x in dims]
    if len(d) != n:
        raise DomainError(f"{len(d)} dims for {n} sites")
    rng = np.random.default_rng(seed)

    local = [_rand_op(rng, d[i]) for i in range(n)]
    side_a, side_b = _pairings(n)
    factors_a = [[local[i], local[j]] for i, j in side_a]
    factors_b = [[local[i], local[j]] for i, j in side_b]
    if kind == "odd":
        # site 0 appears twice on side A: an invertible Y and its inverse
        y = _rand_op(rng, d[0]) + 2 * np.eye(d[0])
        factors_a[0][0] = y
        factors_a[-1][1] = np.linalg.inv(y)
    scal_a = [_rand_scalar(rng) for _ in side_a]
    scal_b = [_rand_scalar(rng) for _ in side_b]
    scal_b[-1] = np.prod(scal_a) / np.prod(scal_b[:-1])
    ops_a = [c * np.kron(x, y) for c, (x, y) in zip(scal_a, factors_a)]
    ops_b = [c * np.kron(x, y) for c, (x, y) in zip(scal_b, factors_b)]

    bad_site = None
    if adversarial:
        pool = [("a", i) for i in range(len(ops_a))] + [("b", i) for i in range(len(ops_b))]
        side, idx = pool[int(rng.integers(len(pool)))]
        ops = ops_a if side == "a" else ops_b
        pert = _rand_op(rng, ops[idx].shape[0])
        ops[idx] = ops[idx] + 0.5 * np.linalg.norm(ops[idx]) * pert / np.linalg.norm(pert)
        bad_site = (side, idx)

    full_a = [embed_operator(o, d, pair) for o, pair in zip(ops_a, side_a)]
    full_b = [embed_operator(o, d, pair) for o, pair in zip(ops_b, side_b)]
    # side A's last operator (the wrap-around for odd rings) acts first
    lhs = reduce(np.matmul, full_a)
    rhs = reduce(np.matmul, full_b)
    resid = float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))

    ranks = {}
    factor_resid = 0.0
    for side, ops, pairs, planted in (("a", ops_a, side_a, factors_a), ("b", ops_b, side_b, factors_b)):
        for i, (o, (s0, s1), (x, y)) in enumerate(zip(ops, pairs, planted)):
            dec = operator_schmidt(o, (d[s0], d[s1]), FACTOR_TOL * np.linalg.norm(o))
            ranks[f"{side}{i}:{s0}-{s1}"] = dec.numerical_rank
            if (side, i) == bad_site:
                continue
            rebuilt = dec.coefficients[0] * np.kron(dec.left(0), dec.right(0))
            factor_resid = max(
                factor_resid,
                float(np.linalg.norm(o - rebuilt) / np.linalg.norm(o)),
                _projective_gap(dec.left(0), x),
                _projective_gap(dec.right(0), y),
            )

    if adversarial:
        passed = resid > tol
    else:
        passed = resid <= tol and factor_resid <= FACTOR_TOL and all(r == 1 for r in ranks.values())
    return {
        "seed": seed,
        "n": n,
        "parity": kind,
        "dims": d,
        "adversarial": adversarial,
        "perturbed": None if bad_site is None else f"{bad_site[0]}{bad_site[1]}",
        "equality_residual": resid,
        "schmidt_ranks": ranks,
        "factor_residual": factor_resid,
        "passed": bool(passed),
    }
