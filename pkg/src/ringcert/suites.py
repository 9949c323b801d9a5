"""Seeded verification suites behind ``ringcert verify``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import certify
from .errors import DomainError
from .rgb4 import rgb4_strategy
from .ring_model import (
    QuantumRingStrategy,
    RingLayout,
    TokenStrategy,
    binomial_probs,
    classical_distribution,
    quantum_distribution,
)
from .rigidity import (
    build_chain_operators,
    canonical_ptc_strategy,
    canonical_tc_strategy,
    check_token_functions,
    find_token_functions,
    lemma_chain_harness,
    locally_rotated,
    naimark_dilate_binary,
    parity_party_unitary,
    pvm_from_unitarity,
    relabel_messages,
    stabilizer_residual,
    tc_message_model,
    tc_party_unitaries,
)
from .rigidity.unitaries import rgb4_label_values
from .tensor_core import random_state, random_unitary

SUITES = ("lemmas", "rigidity", "oracles")
CHAIN_TOL = 1e-10
FACTOR_TOL = 1e-8
EXACT_TOL = 1e-12
ORACLE_TOL = 1e-6
XY_TOL = 1e-4


@dataclass
class VerificationReport:
    suite: str
    seed: int
    trials: int
    failures: list = field(default_factory=list)
    max_residual: float = 0.0
    flags: list = field(default_factory=list)

    def record(self, case: str, residual: float, ok: bool, counts: bool = True) -> None:
        """Log one check; ``counts=False`` keeps separation-type margins out of ``max_residual``."""
        if counts and np.isfinite(residual):
            self.max_residual = max(self.max_residual, float(residual))
        if not ok:
            self.failures.append({"case": case, "residual": float(residual)})

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        out = {
            "suite": self.suite,
            "seed": self.seed,
            "trials": self.trials,
            "failures": list(self.failures),
            "max_residual": self.max_residual,
        }
        if self.flags:
            out["flags"] = list(self.flags)
        return out


def _dims(rng, n, dims):
    if dims is None:
        return [int(d) for d in rng.integers(2, 4, size=n)]
    return [int(dims)] * n


# ------------------------------------------------------------------ lemmas


def run_lemmas(seed: int, trials: int, dims=None) -> VerificationReport:
    rep = VerificationReport("lemmas", seed, trials)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        for n, kind in ((4, "even"), (3, "odd")):
            d = _dims(rng, n, dims)
            sub = int(rng.integers(2**31))
            honest = lemma_chain_harness(sub, n, d, kind)
            rep.record(f"{kind}[{t}].equality", honest["equality_residual"], honest["equality_residual"] <= CHAIN_TOL)
            rep.record(f"{kind}[{t}].factors", honest["factor_residual"], honest["factor_residual"] <= FACTOR_TOL)
            ranks_ok = all(r == 1 for r in honest["schmidt_ranks"].values())
            rep.record(f"{kind}[{t}].ranks", 0.0 if ranks_ok else 1.0, ranks_ok)
            adv = lemma_chain_harness(sub, n, d, kind, adversarial=True)
            rep.record(f"{kind}[{t}].adversarial", adv["equality_residual"], adv["passed"], counts=False)
    return rep


# ---------------------------------------------------------------- rigidity


def random_chain_strategy(rng, n: int, dims=None) -> tuple[QuantumRingStrategy, list]:
    """Full-rank random sources with random party unitaries."""
    d = _dims(rng, n, dims)
    states = tuple(random_state((d[k], d[k]), rng) for k in range(n))
    layout = RingLayout(n, tuple(s.dims for s in states))
    meas = tuple({"0": np.eye(layout.party_dim(k))} for k in range(n))
    s = QuantumRingStrategy(layout, states, meas)
    units = [random_unitary(layout.party_dim(k), rng) for k in range(n)]
    return s, units


def projective_instance(rng):
    d = int(rng.integers(2, 5))
    m = int(rng.integers(2, d + 1))
    u = random_unitary(d, rng)
    cuts = np.sort(rng.choice(np.arange(1, d), size=m - 1, replace=False))
    groups = np.split(np.arange(d), cuts)
    povm = {str(i): u[:, g] @ u[:, g].conj().T for i, g in enumerate(groups)}
    phases = np.exp(1j * (np.arange(m) + rng.uniform(0, 1, m) * 0.5) * 2 * np.pi / m)
    return povm, phases


def noisy_instance(rng):
    povm, phases = projective_instance(rng)
    eps = float(rng.uniform(0.05, 0.5))
    d = next(iter(povm.values())).shape[0]
    m = len(povm)
    return {l: (1 - eps) * e + eps * np.eye(d) / m for l, e in povm.items()}, phases


def naimark_instance(rng):
    d = int(rng.integers(2, 5))
    rank = int(rng.integers(1, d + 1))
    u = random_unitary(d, rng)
    basis = u[:, :rank]
    w = random_unitary(rank, rng)
    lam = rng.uniform(0, 1, rank)
    e0 = basis @ w @ np.diag(lam) @ w.conj().T @ basis.conj().T
    pi = basis @ basis.conj().T
    return e0, pi - e0


def naimark_residual(e0, e1) -> float:
    nd = naimark_dilate_binary(e0, e1)
    v = nd.unitary
    big_pi = np.kron(nd.support, np.eye(2))
    return float(max(
        np.max(np.abs(nd.compress(0) - e0)),
        np.max(np.abs(nd.compress(1) - e1)),
        np.max(np.abs(v.conj().T @ v - np.eye(v.shape[0]))),
        max(np.max(np.abs(p @ p - p)) for p in nd.projectors),
        np.max(np.abs(nd.projectors[0] + nd.projectors[1] - big_pi)),
    ))


def run_rigidity(seed: int, trials: int, dims=None) -> VerificationReport:
    rep = VerificationReport("rigidity", seed, trials)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        n = 3 + t % 2

        s, units = random_chain_strategy(rng, n, dims)
        chain = build_chain_operators(s, units)
        for name, r in chain.local_residuals().items():
            rep.record(f"chain[{t}].{name}", r, r <= CHAIN_TOL)
        ring = chain.ring_residuals()
        for name in ("g_chain", "f_chain"):
            rep.record(f"chain[{t}].{name}", ring[name], ring[name] <= CHAIN_TOL)

        tokens = [int(x) for x in rng.integers(1, 3, size=n)]
        probs = [binomial_probs(nk, float(rng.uniform(0.2, 0.8))) for nk in tokens]
        tc = locally_rotated(canonical_tc_strategy(tokens, probs), rng)
        tc_units = tc_party_unitaries(tc, sum(tokens))
        r = stabilizer_residual(tc, tc_units)
        rep.record(f"tc[{t}].stabilizer", r, r <= EXACT_TOL)
        ring = build_chain_operators(tc, tc_units).ring_residuals()
        for name, val in ring.items():
            rep.record(f"tc[{t}].{name}", val, val <= CHAIN_TOL)
        cl = classical_distribution(TokenStrategy(n, tuple(tokens), tuple(probs)))
        dev = quantum_distribution(tc).max_abs_diff(cl)
        rep.record(f"tc[{t}].distribution", dev, dev <= EXACT_TOL)

        p = [float(x) for x in rng.uniform(0.1, 0.9, size=n)]
        if t % 5 == 0:
            p[0] = 0.5
            rep.flags.append(f"ptc[{t}]: p = 1/2 at source 0; uniqueness not checked")
        ptc = canonical_ptc_strategy(p)
        r = stabilizer_residual(ptc, [parity_party_unitary(m) for m in ptc.party_measurements])
        rep.record(f"ptc[{t}].stabilizer", r, r <= EXACT_TOL)

        theta = float(rng.uniform(0, np.pi / 4))
        rg = rgb4_strategy(theta).strategy
        r = stabilizer_residual(rg, tc_party_unitaries(rg, 3, rgb4_label_values()))
        rep.record(f"rgb4[{t}].stabilizer", r, r <= EXACT_TOL)

        povm, phases = projective_instance(rng)
        ok = pvm_from_unitarity(povm, phases)
        rep.record(f"pvm[{t}].projective", 0.0 if ok else 1.0, ok)
        povm, phases = noisy_instance(rng)
        ok = not pvm_from_unitarity(povm, phases)
        rep.record(f"pvm[{t}].noisy", 0.0 if ok else 1.0, ok)

        r = naimark_residual(*naimark_instance(rng))
        rep.record(f"naimark[{t}]", r, r <= EXACT_TOL)

        tri = tuple(int(x) for x in rng.integers(1, 3, size=3))
        ts = TokenStrategy(3, tri, tuple(binomial_probs(nk, float(rng.uniform(0.2, 0.8))) for nk in tri))
        joint, resp = tc_message_model(ts)
        rperm = [list(rng.permutation(nk + 1)) for nk in ts.tokens]
        lperm = [list(rng.permutation(ts.tokens[(k - 1) % 3] + 1)) for k in range(3)]
        joint2, resp2 = relabel_messages(joint, resp, rperm, lperm)
        found = find_token_functions(joint2, resp2, ts.tokens, ts.send_right_probs)
        ok = found is not None and all(
            found.right[k][rperm[k][i]] == i for k in range(3) for i in range(ts.tokens[k] + 1)
        ) and all(check_token_functions(found, joint2, resp2, ts.tokens, ts.send_right_probs).values())
        rep.record(f"tokens[{t}]", 0.0 if ok else 1.0, ok)
    return rep


# ------------------------------------------------------------------ oracles


def run_oracles(seed: int, trials: int, dims=None) -> VerificationReport:
    """Oracle versus closed form on a fixed angle grid plus ``trials`` seeded coherence values."""
    rep = VerificationReport("oracles", seed, trials)
    for th in np.linspace(0.05, 0.45, 5):
        floor = certify.r_lower_bound(th)
        margin = certify.r_feasibility_oracle(th) - floor
        rep.record(f"feasibility[{th:.3f}]", max(0.0, -margin), margin >= -1e-9)
    rng = np.random.default_rng(seed)
    rs = [0.0, 0.025, certify.r_floor_maximize()[1]] + [float(x) for x in rng.uniform(0, 0.25, size=trials)]
    for i, r in enumerate(rs):
        dev = abs(certify.entanglement_bound_oracle(r) - certify.entanglement_bound(r))
        rep.record(f"eof[{i}]", dev, dev <= ORACLE_TOL)
        dev = abs(certify.hmin_xy_oracle(r) - np.sqrt(4 * r))
        rep.record(f"hmin_xy[{i}]", dev, dev <= XY_TOL, counts=False)
    gap = certify.three_point_spot_check(0.025, seed=seed)
    rep.record("three_point", max(0.0, -gap), gap >= -1e-9)
    return rep


RUNNERS = {"lemmas": run_lemmas, "rigidity": run_rigidity, "oracles": run_oracles}


def run_suite(suite: str, seed: int, trials: int, dims=None) -> VerificationReport:
    """Run one suite, or all of them merged into a single report for ``"all"``."""
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if dims is not None and int(dims) not in (2, 3):
        raise DomainError(f"dims must be 2 or 3, got {dims}")
    if suite == "all":
        merged = VerificationReport("all", seed, trials)
        for name in SUITES:
            r = RUNNERS[name](seed, trials, dims)
            merged.failures += [{"case": f"{name}.{f['case']}", "residual": f["residual"]} for f in r.failures]
            merged.flags += [f"{name}.{x}" for x in r.flags]
            merged.max_residual = max(merged.max_residual, r.max_residual)
        return merged
    if suite not in RUNNERS:
        raise DomainError(f"unknown suite {suite!r}")
    return RUNNERS[suite](seed, trials, dims)
