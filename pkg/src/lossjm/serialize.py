"""JSON encodings for operators, measurement sets, and parent POVMs.

Complex matrices serialize as row-major interleaved [re, im, re, im, ...]
with an explicit dimension, which round-trips bit-exactly through Python's
shortest-repr float formatting.
"""

from __future__ import annotations

import numpy as np

from .compat import ParentPovm
from .measurements import MeasurementSet, Povm


def matrix_to_json(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=complex)
    rows, cols = M.shape
    data = np.empty(2 * rows * cols)
    data[0::2] = M.real.ravel()
    data[1::2] = M.imag.ravel()
    return {"rows": rows, "cols": cols, "data": data.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = np.asarray(obj["data"], dtype=float)
    if data.size != 2 * rows * cols:
        raise ValueError("matrix payload length does not match its shape")
    return (data[0::2] + 1j * data[1::2]).reshape(rows, cols)


def povm_to_json(p: Povm) -> dict:
    return {"dim": p.dim, "elements": [matrix_to_json(E) for E in p.elements]}


def povm_from_json(obj: dict) -> Povm:
    return Povm(tuple(matrix_from_json(e) for e in obj["elements"]))


def measurement_set_to_json(mset: MeasurementSet) -> dict:
    return {"dim": mset.dim, "povms": [povm_to_json(p) for p in mset]}


def measurement_set_from_json(obj: dict) -> MeasurementSet:
    return MeasurementSet(tuple(povm_from_json(p) for p in obj["povms"]))


def parent_to_json(parent: ParentPovm) -> dict:
    elements = {
        ",".join(map(str, t)): matrix_to_json(parent.element(t))
        for t in parent.tuples()
    }
    return {
        "dim": parent.dim,
        "outcome_counts": list(parent.outcome_counts),
        "elements": elements,
    }


def parent_from_json(obj: dict) -> ParentPovm:
    counts = tuple(int(o) for o in obj["outcome_counts"])
    d = int(obj["dim"])
    T = int(np.prod(counts))
    blocks = np.zeros((T, d, d), dtype=complex)
    for key, payload in obj["elements"].items():
        t = tuple(int(x) for x in key.split(","))
        blocks[int(np.ravel_multi_index(t, counts))] = matrix_from_json(payload)
    return ParentPovm(counts, blocks)
