"""JSON encoding of strategies, distributions and reports.

Schema
------
distribution::

    {"party_labels": [[...], ...],
     "table": [{"outcome": [labels], "p": number}, ...]}   # sorted by outcome

quantum strategy::

    {"n": n, "source_dims": [[dR, dL], ...],
     "source_states": [[[re, im], ...], ...],
     "party_measurements": [[{"label": l, "operator": [[[re, im], ...], ...]}, ...], ...],
     "projective": bool, "metadata": {...}}

token strategy::

    {"n": n, "tokens": [...], "send_right_probs": [[...], ...], "mode": "TC" | "PTC"}

Numbers are written with 17 significant digits, which round-trips every
double exactly, and object keys are sorted.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .ring_model import (
    OutcomeDistribution,
    QuantumRingStrategy,
    RingLayout,
    TokenStrategy,
    label_sort_key,
)
from .tensor_core import StateVector


def format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        # not valid JSON numbers; encode as strings
        return json.dumps(repr(float(x)))
    s = "%.17g" % x
    if "." not in s and "e" not in s:
        s += ".0"
    return s


def _encode(obj: Any, indent: int | None, level: int) -> str:
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ","
    colon = ": "
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        parts = [json.dumps(str(k), ensure_ascii=False) + colon + _encode(v, indent, level + 1) for k, v in items]
        return "{" + pad + (sep + pad).join(parts) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [_encode(v, indent, level + 1) for v in obj]
        return "[" + pad + (sep + pad).join(parts) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int | None = 2) -> str:
    """Deterministic JSON text: sorted keys, 17-digit floats."""
    return _encode(obj, indent, 0)


def loads(text: str) -> Any:
    return json.loads(text)


def _complex_list(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [_complex_list(row) for row in a]


def _from_complex_list(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def distribution_to_dict(d: OutcomeDistribution) -> dict:
    return {
        "party_labels": [list(ls) for ls in d.party_labels],
        "table": [{"outcome": list(o), "p": float(p)} for o, p in d.items()],
    }


def distribution_from_dict(data: dict) -> OutcomeDistribution:
    labels = tuple(tuple(ls) for ls in data["party_labels"])
    table = {tuple(row["outcome"]): float(row["p"]) for row in data["table"]}
    return OutcomeDistribution(labels, table)


def strategy_to_dict(s: QuantumRingStrategy) -> dict:
    meas = []
    for m in s.party_measurements:
        labels = sorted(m, key=label_sort_key)
        meas.append([{"label": l, "operator": _complex_list(m[l])} for l in labels])
    return {
        "n": s.n,
        "source_dims": [list(d) for d in s.layout.source_dims],
        "source_states": [_complex_list(st.amplitudes) for st in s.source_states],
        "party_measurements": meas,
        "projective": bool(s.projective),
        "metadata": dict(s.metadata),
    }


def strategy_from_dict(data: dict) -> QuantumRingStrategy:
    dims = tuple(tuple(int(x) for x in d) for d in data["source_dims"])
    layout = RingLayout(int(data["n"]), dims)
    states = tuple(StateVector(d, _from_complex_list(a)) for d, a in zip(dims, data["source_states"]))
    meas = tuple({e["label"]: _from_complex_list(e["operator"]) for e in m} for m in data["party_measurements"])
    return QuantumRingStrategy(layout, states, meas, bool(data["projective"]), dict(data.get("metadata", {})))


def token_strategy_to_dict(t: TokenStrategy) -> dict:
    return {
        "n": t.n,
        "tokens": list(t.tokens),
        "send_right_probs": [list(p) for p in t.send_right_probs],
        "mode": t.mode,
    }


def token_strategy_from_dict(data: dict) -> TokenStrategy:
    return TokenStrategy(
        int(data["n"]),
        tuple(int(x) for x in data["tokens"]),
        tuple(tuple(float(p) for p in ps) for ps in data["send_right_probs"]),
        data.get("mode", "TC"),
    )
