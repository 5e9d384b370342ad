"""Deterministic JSON/CSV writers and the state round-trip format.

Floats are printed with 17 significant digits so written values reload
bit-exactly.
"""

from __future__ import annotations

import io
import json
import math

import numpy as np

from .lattice import LatticeDomain, build_domain


def fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def _encode(obj):
    if isinstance(obj, float):
        return _RawFloat(obj)
    if isinstance(obj, (np.floating,)):
        return _RawFloat(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_encode(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    return obj


class _RawFloat(float):
    def __repr__(self):
        return fmt(float(self))


def dumps_json(payload: dict) -> str:
    class E(json.JSONEncoder):
        def default(self, o):
            return _encode(o)

    def _default_float(o):
        return fmt(o)

    # json serializes floats via repr of the float subclass
    return json.dumps(_encode(payload), indent=2, sort_keys=True)


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_json(payload))
        fh.write("\n")


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def bond_measure_rows(domain: LatticeDomain, bond_measure: np.ndarray):
    """CSV rows (bond id, endpoints, direction, weight)."""
    for b in range(domain.n_bonds):
        i, j = domain.bonds[b]
        yield (
            b,
            int(i),
            int(j),
            int(domain.bond_dirs[b]),
            float(bond_measure[b]),
        )


def state_payload(domain: LatticeDomain, u: np.ndarray, meta: dict | None = None) -> dict:
    return {
        "domain": {
            "polygon": domain.polygon,
            "epsilon": domain.epsilon,
            "offset": domain.offset,
        },
        "displacement": np.asarray(u, float),
        "meta": meta or {},
    }


def load_state(payload: dict):
    d = payload["domain"]
    domain = build_domain(np.asarray(d["polygon"], float), float(d["epsilon"]),
                          np.asarray(d["offset"], float))
    u = np.asarray(payload["displacement"], float)
    if u.shape != domain.nodes.shape:
        raise ValueError("state displacement does not match the rebuilt lattice")
    return domain, u
