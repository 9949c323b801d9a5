"""``ringcert`` command line.

Exit codes: 0 success, 1 verification failure, 2 usage or validation error.
Output goes to stdout unless ``--output`` is given; a relative output path
is resolved against ``$RINGCERT_OUTPUT_DIR`` when that is set.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import certify
from .errors import RingCertError
from .rgb4 import rgb4_closed_form, rgb4_strategy
from .ring_model import (
    TokenStrategy,
    binomial_probs,
    classical_distribution,
    parity_predicate,
    quantum_distribution,
    support_check,
    token_sum_predicate,
)
from .rigidity import ptc_token_strategy
from .serialization import distribution_to_dict, dumps, format_float
from .suites import run_suite

OUTPUT_DIR_ENV = "RINGCERT_OUTPUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    fmt: str = "json"
    output: str | None = None
    params: dict = field(default_factory=dict)


# ---------------------------------------------------------------- parsing helpers


def parse_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None
    if not math.isfinite(x):
        raise UsageError(f"not a finite number: {text!r}")
    return x


def parse_float_list(text: str) -> list[float]:
    return [parse_float(t) for t in text.split(",") if t.strip()]


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"not a list of integers: {text!r}") from None


def parse_sweep(text: str) -> list[float]:
    """``start:stop:step`` with both ends included when the step lands on ``stop``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"sweep must be start:stop:step, got {text!r}")
    start, stop, step = (parse_float(p) for p in parts)
    if step <= 0 or stop < start:
        raise UsageError(f"empty or ill-ordered sweep {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


# ---------------------------------------------------------------- output


def _csv(header: list[str], rows: list[list]) -> str:
    def cell(v):
        if isinstance(v, float):
            return format_float(v)
        return str(v)

    lines = [",".join(header)] + [",".join(cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
        return
    path = Path(cfg.output)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _dist_rows(d) -> list[list]:
    return [list(o) + [float(p)] for o, p in d.items()]


def _party_header(n: int) -> list[str]:
    return [f"a{k}" for k in range(n)]


# ---------------------------------------------------------------- commands


def cmd_rgb4(cfg: RunConfig) -> int:
    theta = cfg.params["theta"]
    closed = rgb4_closed_form(theta)
    payload = {"theta": theta, "mode": cfg.params["mode"]}
    if cfg.params["mode"] == "simulate":
        sim = quantum_distribution(rgb4_strategy(theta).strategy)
        payload["distribution"] = distribution_to_dict(sim)
        payload["max_deviation"] = closed.max_abs_diff(sim)
        rows = [list(o) + [float(p), float(sim[o])] for o, p in closed.items()]
        header = _party_header(3) + ["p_closed", "p_simulated"]
    else:
        payload["distribution"] = distribution_to_dict(closed)
        rows = _dist_rows(closed)
        header = _party_header(3) + ["p"]
    _emit(cfg, dumps(payload) + "\n" if cfg.fmt == "json" else _csv(header, rows))
    return EXIT_OK


def cmd_bounds(cfg: RunConfig) -> int:
    lo, hi = certify.THETA_DOMAIN
    thetas = cfg.params["thetas"]
    bad = [t for t in thetas if not lo < t < hi]
    if bad:
        raise UsageError(f"theta values {bad} outside ({lo}, {hi})")
    bundles = [certify.certificate(t, with_oracles=cfg.params["oracles"]) for t in thetas]
    if cfg.fmt == "json":
        _emit(cfg, dumps({"rows": [b.to_dict() for b in bundles]}) + "\n")
    else:
        header = ["theta", "r_ideal", "r_floor", "eof_bound", "hmin_bound"]
        _emit(cfg, _csv(header, [[b.row()[h] for h in header] for b in bundles]))
    return EXIT_OK


def _token_output(cfg: RunConfig, ts: TokenStrategy, verdict: str, ok: bool) -> int:
    d = classical_distribution(ts)
    if cfg.fmt == "json":
        payload = {
            "mode": ts.mode,
            "n": ts.n,
            "tokens": list(ts.tokens),
            "send_right_probs": [list(p) for p in ts.send_right_probs],
            "distribution": distribution_to_dict(d),
            "support_check": verdict,
        }
        _emit(cfg, dumps(payload) + "\n")
    else:
        _emit(cfg, _csv(_party_header(ts.n) + ["p"], _dist_rows(d)))
        sys.stderr.write(verdict + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def _verdict(n: int, lhs_sep: str, rhs: int, ok: bool) -> str:
    names = list("abc") if n == 3 else [f"a{k}" for k in range(n)]
    return f"{lhs_sep.join(names)}={rhs}: {'PASS' if ok else 'FAIL'}"


def cmd_tc(cfg: RunConfig) -> int:
    n, tokens, probs_text = cfg.params["n"], cfg.params["tokens"], cfg.params["probs"]
    if n is None:
        n = len(tokens)
    if len(tokens) != n:
        raise UsageError(f"--tokens has {len(tokens)} entries for n={n}")
    if ";" in probs_text:
        probs = [tuple(parse_float_list(chunk)) for chunk in probs_text.split(";")]
    else:
        qs = parse_float_list(probs_text)
        if len(qs) != n:
            raise UsageError(f"--probs has {len(qs)} entries for n={n}")
        bad = [q for q in qs if not 0.0 <= q <= 1.0]
        if bad:
            raise UsageError(f"probabilities {bad} outside [0, 1]")
        probs = [binomial_probs(nk, q) for nk, q in zip(tokens, qs)]
    ts = TokenStrategy(n, tuple(tokens), tuple(probs), "TC")
    ok = support_check(classical_distribution(ts), token_sum_predicate(ts.total_tokens))
    return _token_output(cfg, ts, _verdict(n, "+", ts.total_tokens, ok), ok)


def cmd_ptc(cfg: RunConfig) -> int:
    p = cfg.params["p"]
    bad = [x for x in p if not 0.0 <= x <= 1.0]
    if bad:
        raise UsageError(f"probabilities {bad} outside [0, 1]")
    n = len(p)
    ts = ptc_token_strategy(p)
    parity = n % 2
    ok = support_check(classical_distribution(ts), parity_predicate(parity))
    return _token_output(cfg, ts, _verdict(n, "⊕", parity, ok), ok)


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.params["trials"] < 1:
        raise UsageError(f"--trials must be >= 1, got {cfg.params['trials']}")
    rep = run_suite(cfg.params["suite"], cfg.params["seed"], cfg.params["trials"], cfg.params["dims"])
    if cfg.fmt == "json":
        _emit(cfg, dumps(rep.to_dict()) + "\n")
    else:
        _emit(cfg, _csv(["case", "residual"], [[f["case"], f["residual"]] for f in rep.failures]))
    return EXIT_OK if rep.passed else EXIT_FAIL


COMMANDS = {"rgb4": cmd_rgb4, "bounds": cmd_bounds, "tc": cmd_tc, "ptc": cmd_ptc, "verify": cmd_verify}


# ---------------------------------------------------------------- argparse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringcert", description="Token-counting ring networks: distributions, bounds, checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", help="write here instead of stdout")

    p = sub.add_parser("rgb4", help="four-outcome triangle distribution")
    p.add_argument("--theta", required=True, help="angle in radians, in [0, pi/4]")
    p.add_argument("--mode", choices=("closed", "simulate"), default="closed")
    common(p)

    p = sub.add_parser("bounds", help="coherence floor and certified entropies")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta")
    g.add_argument("--sweep", help="start:stop:step, stop included")
    p.add_argument("--oracles", action="store_true", help="also run the brute-force oracles")
    common(p)

    p = sub.add_parser("tc", help="token-counting distribution")
    p.add_argument("--n", type=int)
    p.add_argument("--tokens", required=True, help="comma list of token counts")
    p.add_argument(
        "--probs", required=True,
        help="comma list of per-token probabilities of going right, or ';'-separated full distributions",
    )
    common(p)

    p = sub.add_parser("ptc", help="parity token-counting distribution")
    p.add_argument("--p", required=True, help="comma list: probability the token goes to the next party")
    common(p)

    p = sub.add_parser("verify", help="seeded verification suites")
    p.add_argument("--suite", choices=("lemmas", "rigidity", "oracles", "all"), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--dims", type=int, choices=(2, 3), help="fix every local dimension")
    common(p)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(ns.command, ns.format, ns.output)
    if ns.command == "rgb4":
        cfg.params = {"theta": parse_float(ns.theta), "mode": ns.mode}
    elif ns.command == "bounds":
        thetas = [parse_float(ns.theta)] if ns.theta is not None else parse_sweep(ns.sweep)
        cfg.params = {"thetas": thetas, "oracles": ns.oracles}
    elif ns.command == "tc":
        cfg.params = {"n": ns.n, "tokens": parse_int_list(ns.tokens), "probs": ns.probs}
    elif ns.command == "ptc":
        cfg.params = {"p": parse_float_list(ns.p)}
    elif ns.command == "verify":
        cfg.params = {"suite": ns.suite, "seed": ns.seed, "trials": ns.trials, "dims": ns.dims}
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, RingCertError, ValueError) as exc:
        sys.stderr.write(f"ringcert {ns.command}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
